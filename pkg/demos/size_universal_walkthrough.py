"""Edge-universal graph, one embedding, and a size-universal template running an {H, T, CNOT} circuit.

Run: python3 demos/size_universal_walkthrough.py [out.dot]
"""
import sys

import numpy as np

from uqc import Circuit, Gate, verify_encoding
from uqc.size_universal import (build_edge_universal, build_size_universal, circuit_to_gamma2,
                                embed, encode_size, encoding_length, random_gamma2)

N = 8
eu = build_edge_universal(N)
print(f"EU graph N={N}: {len(eu.vertices)} vertices, {len(eu.edges)} edges, "
      f"|V|/(N lg N) = {eu.size_constant():.3f}")
g = random_gamma2(N, np.random.default_rng(3))
e = embed(g, eu)
for (i, j), path in zip(g.edges, e.paths):
    print(f"  edge {i}->{j}: path {' '.join(map(str, path))}")
if len(sys.argv) > 1:
    with open(sys.argv[1], "w") as f:
        f.write(eu.to_dot(e))
    print("wrote", sys.argv[1])

circuit = Circuit.from_gates(2, [Gate("h", (0,)), Gate("cnot", (0, 1)), Gate("t", (1,))])
graph, labels = circuit_to_gamma2(circuit)
print("circuit graph edges:", graph.edges, "qubit labels:", labels.edge_qubit)

t = build_size_universal(2, 3)
print(f"template n=2 c=3: {t.circuit.size} gates (bound {t.size_bound():.0f}), "
      f"{len(t.slot_map)} slots = closed form "
      f"{encoding_length(2, 3, len(t.palette), t.n_switches)}")
x = encode_size(circuit, t)
print("encoding:", "".join(map(str, x)))
print(verify_encoding(t.circuit, t.layout, x.bits, circuit).summary())
