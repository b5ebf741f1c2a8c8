"""Build a depth-universal template, encode a small circuit into it, verify, then corrupt a bit.

Run: python3 demos/depth_universal_walkthrough.py
"""
import numpy as np

from uqc import (Circuit, Gate, Layer, build_universal, depth_report, encode_circuit, normalize,
                 serialize_circuit, verify_encoding)

n, d = 3, 2
circuit = Circuit(n, (
    Layer((Gate("h", (0,)), Gate("fanout", (1, 2)))),
    Layer((Gate("t", (0,)), Gate("zfanout", (2, 1)))),
), family="F")
print("input circuit:")
print(serialize_circuit(circuit))

nc = normalize(circuit)
print("normalized sublayers:", " ".join(nc.kinds()))

for family in ("F", "Fprime"):
    t = build_universal(n, d, family)
    print(depth_report(t).record(), f"family={family} slots={len(t.slot_map)}")

t = build_universal(n, d, "F")
x = encode_circuit(circuit, t)
print("encoding:", "".join(map(str, x)))
print("set slots:", [tuple(t.slot_map[k]) for k, b in enumerate(x) if b])

report = verify_encoding(t.circuit, t.layout, x.bits, circuit)
print(report.summary())

rng = np.random.default_rng(0)
k = int(rng.integers(len(x)))
bad = verify_encoding(t.circuit, t.layout, x.flip(k).bits, circuit)
print(f"flip slot {k} {tuple(t.slot_map[k])}:", bad.summary())
