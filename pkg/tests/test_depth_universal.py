from itertools import product

import numpy as np
import pytest

from uqc.circuit import Circuit, CircuitError, FamilyError, Gate, Layer
from uqc.depth_universal import (K_NORM, CapacityError, UniversalTemplate, build_block_group,
                                 build_universal, depth_report, encode, encode_circuit,
                                 group_depth, normalize, qubit_count, scaling_grid)
from uqc.encoding import Encoding, Slot, SlotMap
from uqc.random_circuits import random_family_circuit
from uqc.simulator import run_sparse, specialize_classical, unitary_of, verify_encoding

from oracles import (block_group_action, circuit_matrix, z_block_phase, zfanout_block_phase)

TOL = 1e-12


def close(a, b):
    return np.max(np.abs(a - b)) <= TOL


def oracle(c):
    return circuit_matrix([(g.kind, g.qubits) for g in c.gates()], c.n_qubits)


# normalize

def test_normalize_fanout():
    c = Circuit.from_gates(3, [Gate("fanout", (0, 1, 2))])
    nc = normalize(c)
    assert nc.kinds() == ["H", "ZF", "H"]
    assert close(unitary_of(nc.to_circuit()), oracle(c))


def test_normalize_separates_kinds():
    c = Circuit(2, (Layer((Gate("h", (0,)), Gate("t", (1,)))),))
    nc = normalize(c)
    assert nc.kinds() == ["H", "T"]
    assert nc.sublayers[0][1].gates == (Gate("h", (0,)),)
    assert nc.sublayers[1][1].gates == (Gate("t", (1,)),)


def test_normalize_adjacent_fanouts_cancel_inner_h():
    c = Circuit.from_gates(3, [Gate("fanout", (0, 1, 2)), Gate("fanout", (0, 1, 2))])
    nc = normalize(c)
    assert len(nc.sublayers) <= 5
    assert nc.kinds() == ["H", "ZF", "ZF", "H"]
    assert close(unitary_of(nc.to_circuit()), oracle(c))


def test_normalize_toffoli_needs_fprime():
    c = Circuit.from_gates(3, [Gate("toffoli", (0, 1, 2))])
    assert normalize(c).kinds() == ["H", "Z", "H"]
    with pytest.raises(FamilyError):
        normalize(c, "F")


def test_normalize_rejects_phase_directive():
    with pytest.raises(CircuitError):
        normalize(Circuit(1, (), None, 1))


@pytest.mark.parametrize("family", ["F", "Fprime"])
def test_normalize_exact_and_bounded(family):
    rng = np.random.default_rng(3)
    for _ in range(60):
        n = int(rng.integers(1, 5))
        d = int(rng.integers(1, 4))
        c = random_family_circuit(n, d, family, rng, sugar=True)
        nc = normalize(c)
        assert len(nc.sublayers) <= K_NORM * d
        assert close(unitary_of(nc.to_circuit()), oracle(c))
        for kind, layer in nc.sublayers:
            want = {"H": {"h"}, "T": {"t"}, "ZF": {"zfanout"}, "Z": {"gz"}}[kind]
            assert {g.kind for g in layer} <= want
        if family == "F":
            assert "Z" not in nc.kinds()


# build

def test_build_n1_d1_structure():
    t = build_universal(1, 1, "F")
    kinds = {s.kind for s in t.slot_map.slots}
    assert kinds == {"H", "T", "ZF", "H2"}
    assert t.circuit.depth == group_depth("F") == 22
    r = verify_encoding(t.circuit, t.layout, Encoding.zeros(len(t.slot_map)).bits, Circuit(1))
    assert r.passed


def test_slot_map_covers_encoding_register():
    for family in ("F", "Fprime"):
        t = build_universal(3, 2, family)
        assert len(t.slot_map) == len(t.layout.encoding)
        assert len(set(t.slot_map.slots)) == len(t.slot_map)


def test_d0_template():
    t = build_universal(2, 0)
    assert t.circuit.depth == 0 and t.circuit.n_qubits == 2
    assert depth_report(t).depth == 0


def test_build_rejects_bad_sizes():
    with pytest.raises(ValueError):
        build_universal(0, 1)
    with pytest.raises(ValueError):
        build_universal(1, -1)


def _slot_matrix(n, bits):
    it = iter(bits)
    return [[next(it) for _ in range(n)] for _ in range(n)]


def _check_block_group(n, kind, d, c, circ, layout, slots):
    out = block_group_action(circ, layout, slots, d, c)
    key = sum(v << q for q, v in enumerate(d))
    for q, s in zip(layout.encoding, slots):
        key |= c[s.i][s.j] << q
    # basis in, same basis out: ancillas restored, data and slots untouched
    assert list(out) == [key]
    want = zfanout_block_phase(d, c) if kind == "ZF" else z_block_phase(d, c)
    assert abs(out[key] - want) <= TOL


@pytest.mark.parametrize("kind", ["ZF", "Z"])
def test_block_phase_formula_n2_exhaustive(kind):
    circ, layout, sm = build_block_group(2, kind)
    for bits in product((0, 1), repeat=2 + 4):
        d, c = bits[:2], _slot_matrix(2, bits[2:])
        _check_block_group(2, kind, d, c, circ, layout, sm.slots)


def test_zfanout_phase_example_n2():
    # d = (1, 1), block 0 with c00 = c01 = 1: phase (-1)^(1*1*1) = -1
    assert zfanout_block_phase((1, 1), [[1, 1], [0, 0]]) == -1
    circ, layout, sm = build_block_group(2, "ZF")
    _check_block_group(2, "ZF", (1, 1), [[1, 1], [0, 0]], circ, layout, sm.slots)


def test_unused_z_block_is_neutral():
    assert z_block_phase((1, 0, 1), [[0] * 3] * 3) == 1
    for kind in ("ZF", "Z"):
        for i in range(3):
            circ, layout, sm = build_block_group(3, kind, [i])
            for d in product((0, 1), repeat=3):
                _check_block_group(3, kind, d, [[0] * 3] * 3, circ, layout, sm.slots)


@pytest.mark.parametrize("family", ["F", "Fprime"])
def test_ancilla_hygiene_after_each_group(family):
    rng = np.random.default_rng(5)
    t = build_universal(2, 1, family)
    for _ in range(10):
        x = [int(v) for v in rng.integers(0, 2, len(t.slot_map))]
        offset = sum(b << q for q, b in zip(t.layout.encoding, x))
        anc_mask = sum(1 << q for q in t.layout.ancilla)
        outs = run_sparse(t.circuit, [([y | offset], [1.0]) for y in range(4)])
        for out in outs:
            for key, amp in out.items():
                if abs(amp) > 1e-12:
                    assert key & anc_mask == 0


@pytest.mark.parametrize("family", ["F", "Fprime"])
def test_encoding_qubits_stay_classical(family):
    rng = np.random.default_rng(9)
    for strict in (False, True):
        t = build_universal(2, 2, family, strict=strict)
        for _ in range(5):
            x = [int(v) for v in rng.integers(0, 2, len(t.slot_map))]
            specialize_classical(t.circuit, t.layout, x)


@pytest.mark.parametrize("family", ["F", "Fprime"])
def test_strict_template_family_and_exactness(family):
    t = build_universal(2, 1, family, strict=True)
    allowed = {"h", "t", "fanout"} | ({"toffoli"} if family == "Fprime" else set())
    assert {g.kind for g in t.circuit.gates()} <= allowed
    rng = np.random.default_rng(2)
    for _ in range(10):
        c = random_family_circuit(2, 1, family, rng)
        assert verify_encoding(t.circuit, t.layout, encode_circuit(c, t).bits, c).passed


# encode

def test_encode_empty_is_zero():
    t = build_universal(3, 2, "F")
    assert encode_circuit(Circuit(3), t) == Encoding.zeros(len(t.slot_map))


def test_encode_zfanout_block():
    t = build_universal(3, 1, "F")
    e = encode_circuit(Circuit.from_gates(3, [Gate("zfanout", (0, 1, 2))]), t)
    ones = {t.slot_map[k] for k, b in enumerate(e) if b}
    assert ones == {Slot(0, "ZF", 0, 0), Slot(0, "ZF", 0, 1), Slot(0, "ZF", 0, 2)}


def test_encode_parallel_gz_distinct_blocks():
    # two parallel gz gates with different first qubits use blocks 0 and 3
    c = Circuit(6, (Layer((Gate("gz", (0, 1, 2)), Gate("gz", (3, 4, 5)))),))
    t = build_universal(6, 1, "Fprime")
    e = encode_circuit(c, t)
    ones = [t.slot_map[k] for k, b in enumerate(e) if b]
    assert {s.kind for s in ones} == {"Z"}
    assert {s.i for s in ones} == {0, 3}
    assert {(s.i, s.j) for s in ones} == {(0, 0), (0, 1), (0, 2), (3, 3), (3, 4), (3, 5)}
    assert verify_encoding(t.circuit, t.layout, e.bits, c, mode="random", trials=4, seed=1).passed


def test_encode_capacity_exceeded():
    t = build_universal(1, 1, "F")
    c = Circuit.from_gates(1, [Gate("t", (0,)), Gate("h", (0,)), Gate("t", (0,)),
                               Gate("h", (0,)), Gate("t", (0,))])
    with pytest.raises(CapacityError):
        encode_circuit(c, t)


def test_encode_family_mismatch():
    t = build_universal(3, 1, "F")
    with pytest.raises(FamilyError):
        encode_circuit(Circuit.from_gates(3, [Gate("toffoli", (0, 1, 2))], family="Fprime"), t)


def test_encode_width_mismatch():
    t = build_universal(2, 1)
    with pytest.raises(ValueError):
        encode(normalize(Circuit(3)), t)


@pytest.mark.parametrize("family", ["F", "Fprime"])
def test_depth_d_circuit_fits_d_groups(family):
    rng = np.random.default_rng(13)
    for n, d in [(1, 3), (2, 3), (3, 2)]:
        t = build_universal(n, d, family)
        for _ in range(20):
            c = random_family_circuit(n, d, family, rng)
            assert verify_encoding(t.circuit, t.layout, encode_circuit(c, t).bits, c).passed


# resources

def test_depth_ratio_constant():
    for family, k in (("F", 22), ("Fprime", 31)):
        reps = scaling_grid(range(1, 7), range(1, 9), family)
        assert {r.K_U for r in reps} == {k}
        assert depth_report(build_universal(2, 4, family)).K_U == \
            depth_report(build_universal(5, 4, family)).K_U


def test_qubit_count_closed_form_and_bound():
    for family, kq in (("F", 8), ("Fprime", 9)):
        for n, d in product(range(1, 7), range(1, 9)):
            q = qubit_count(n, d, family)
            assert q == build_universal(n, d, family).circuit.n_qubits
            assert q <= kq * n * n * d


def test_report_record_format():
    r = depth_report(build_universal(2, 2))
    assert r.record().startswith("n=2 d=2 depth=44 ")


# serialization

@pytest.mark.parametrize("strict", [False, True])
def test_template_save_load(tmp_path, strict):
    t = build_universal(2, 1, "Fprime", strict=strict)
    files = t.save(tmp_path / "u")
    assert [f.suffix for f in files] == [".grid", ".slots", ".json"]
    u = UniversalTemplate.load(tmp_path / "u")
    assert u == t


def test_encoding_and_slot_map_roundtrip():
    t = build_universal(2, 2, "Fprime")
    assert SlotMap.from_text(t.slot_map.to_text()) == t.slot_map
    e = encode_circuit(Circuit.from_gates(2, [Gate("cnot", (1, 0)), Gate("t", (1,))]), t)
    assert Encoding.from_text(e.to_text()) == e
