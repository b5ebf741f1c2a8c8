from collections import Counter
from itertools import combinations_with_replacement, product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from uqc.circuit import Circuit, CircuitError, Gate
from uqc.random_circuits import random_palette_circuit
from uqc.simulator import run_sparse, specialize_classical, unitary_of, verify_encoding
from uqc.size_universal import (EU_SIZE_CONSTANT, SIZE_CONSTANT, EdgeEmbedding, EmbeddingError,
                                Gamma2Graph, GraphError, PaletteError, SizeUniversalTemplate,
                                build_edge_universal, build_size_universal, check_embedding,
                                circuit_to_gamma2, controlled_swap, decompose_for_size_universality,
                                embed, encode_size, encoding_length, random_gamma2, split_gamma2)

from oracles import circuit_matrix, gate_matrix, leak, restrict_to_clean

TOL = 1e-12


# Gamma2 graphs

def test_circuit_to_gamma2_examples():
    g, _ = circuit_to_gamma2(Circuit(2))
    assert (g.n, g.edges) == (2, ())
    g, _ = circuit_to_gamma2(Circuit.from_gates(1, [Gate("h", (0,)), Gate("h", (0,))]))
    assert (g.n, g.edges) == (3, ((0, 1), (1, 2)))
    g, labels = circuit_to_gamma2(Circuit.from_gates(2, [Gate("cnot", (0, 1))]))
    assert (g.n, set(g.edges)) == (3, {(0, 2), (1, 2)})
    assert labels.last == (2, 2)


def test_circuit_to_gamma2_multi_edge():
    g, _ = circuit_to_gamma2(Circuit.from_gates(2, [Gate("cnot", (0, 1)), Gate("cnot", (1, 0))]))
    assert Counter(g.edges)[(2, 3)] == 2


def test_circuit_to_gamma2_rejects_wide_gates():
    with pytest.raises(GraphError):
        circuit_to_gamma2(Circuit.from_gates(3, [Gate("toffoli", (0, 1, 2))]))


def test_gamma2_validation():
    with pytest.raises(GraphError):
        Gamma2Graph(2, ((1, 0),))
    with pytest.raises(GraphError):
        Gamma2Graph(4, ((0, 1), (0, 2), (0, 3)))


def _degree_ok(edges, cap):
    outs = Counter(i for i, _ in edges)
    ins = Counter(j for _, j in edges)
    return max(list(outs.values()) + list(ins.values()), default=0) <= cap


def test_split_examples():
    a, b = split_gamma2(Gamma2Graph(2, ((0, 1), (0, 1))))
    assert sorted((len(a), len(b))) == [1, 1]
    g = Gamma2Graph(3, ((0, 1), (1, 2)))
    a, b = split_gamma2(g)
    assert _degree_ok([g.edges[k] for k in a], 1) and _degree_ok([g.edges[k] for k in b], 1)


def test_split_property_1000_graphs():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        g = random_gamma2(int(rng.integers(1, 40)), rng, density=float(rng.uniform(0.3, 1.0)))
        a, b = split_gamma2(g)
        assert sorted(a + b) == list(range(len(g.edges)))
        assert _degree_ok([g.edges[k] for k in a], 1)
        assert _degree_ok([g.edges[k] for k in b], 1)


# edge-universal graphs

def _all_gamma2(n):
    slots = [(i, j) for i in range(n) for j in range(i + 1, n)]
    for m in range(0, 2 * n + 1):
        for edges in combinations_with_replacement(slots, m):
            if _degree_ok(edges, 2):
                yield Gamma2Graph(n, edges)


def test_eu_n1():
    eu = build_edge_universal(1)
    assert eu.vertices == (0,) and eu.edges == ()
    assert embed(Gamma2Graph(1, ()), eu).paths == ()


def test_eu_n2_structure_and_brute_force():
    eu = build_edge_universal(2)
    assert eu.vertices == (0, 1, 4, 7)
    assert eu.edges == ((0, 4), (0, 7), (4, 1), (7, 1))
    graphs = list(_all_gamma2(2))
    assert [g.edges for g in graphs] == [(), ((0, 1),), ((0, 1), (0, 1))]
    for g in graphs:
        e = embed(g, eu)
        check_embedding(g, eu, e)
    two = embed(graphs[2], eu)
    assert set(two.path_edges(0)).isdisjoint(two.path_edges(1))


@pytest.mark.parametrize("N, count", [(3, 14), (4, 95)])
def test_exhaustive_embedding_small(N, count):
    eu = build_edge_universal(N)
    graphs = list(_all_gamma2(N))
    assert len(graphs) == count
    for g in graphs:
        embed(g, eu)


@pytest.mark.parametrize("N, V", [(4, 16), (8, 52), (16, 148), (32, 388), (64, 964)])
def test_eu_vertex_counts(N, V):
    eu = build_edge_universal(N)
    assert len(eu.vertices) == V
    eu.check()
    assert eu.size_constant() <= EU_SIZE_CONSTANT


def test_eu_vertex_count_1024():
    eu = build_edge_universal(1024)
    assert len(eu.vertices) == 27652
    assert eu.size_constant() <= EU_SIZE_CONSTANT


def _assert_sound(g, eu, e):
    used = [s for k in range(len(e.paths)) for s in e.path_edges(k)]
    assert len(used) == len(set(used))
    assert all(s in eu.edge_set for s in used)
    for (i, j), p in zip(g.edges, e.paths):
        assert (p[0], p[-1]) == (i, j)
        assert not any(eu.is_pole(v) for v in p[1:-1])


@pytest.mark.parametrize("N", [4, 8, 16, 32, 64])
def test_random_embeddings(N):
    eu = build_edge_universal(N)
    rng = np.random.default_rng(N)
    for _ in range(100):
        g = random_gamma2(N, rng)
        e = embed(g, eu)
        _assert_sound(g, eu, e)
        assert embed(g, eu) == e


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 48), st.integers(0, 2 ** 32 - 1), st.floats(0.2, 1.0))
def test_embedding_property(N, seed, density):
    g = random_gamma2(N, np.random.default_rng(seed), density)
    eu = build_edge_universal(N)
    _assert_sound(g, eu, embed(g, eu))


def test_check_embedding_catches_shared_edges():
    eu = build_edge_universal(2)
    g = Gamma2Graph(2, ((0, 1), (0, 1)))
    e = embed(g, eu)
    bad = EdgeEmbedding(e.rho, (e.paths[0], e.paths[0]))
    with pytest.raises(EmbeddingError):
        check_embedding(g, eu, bad)
    with pytest.raises(EmbeddingError):
        check_embedding(g, eu, EdgeEmbedding(e.rho, ((0, 1), e.paths[1])))


def test_embed_pole_count_mismatch():
    with pytest.raises(GraphError):
        embed(Gamma2Graph(3, ()), build_edge_universal(4))


def test_eu_degree_bounds_and_order():
    for N in (3, 5, 9, 17, 33):
        eu = build_edge_universal(N)
        eu.check()
        pos = {v: k for k, v in enumerate(eu.topological_order())}
        assert all(pos[u] < pos[v] for u, v in eu.edges)


def test_dot_export():
    eu = build_edge_universal(2)
    e = embed(Gamma2Graph(2, ((0, 1), (0, 1))), eu)
    plain = eu.to_dot()
    assert plain.startswith("digraph eu {") and plain.count("doublecircle") == 2
    coloured = eu.to_dot(e)
    assert 'label="e0"' in coloured and 'label="e1"' in coloured


# gadgets

@pytest.mark.parametrize("e", [0, 1])
def test_controlled_swap(e):
    gates = [Gate("x", (0,))] * e + controlled_swap(0, 1, 2)
    U = circuit_matrix([(g.kind, g.qubits) for g in gates], 3)
    for a, b in product((0, 1), repeat=2):
        k = (a << 1) | (b << 2)
        want = ((b << 1) | (a << 2)) if e else k
        assert abs(U[want | e, k] - 1) <= TOL


def _data_unitary(t, x):
    spec = specialize_classical(t.circuit, t.layout, x)
    U = unitary_of(spec)
    assert leak(U, t.n, spec.n_qubits) <= TOL
    return restrict_to_clean(U, t.n, spec.n_qubits)


def test_pole_gadget_admits_exactly_palette_choices():
    t = build_size_universal(2, 1, ("h", "cnot"))
    base = list(encode_size(Circuit.from_gates(2, [Gate("cnot", (0, 1))]), t).bits)
    sm = t.slot_map
    role = sm.lookup(2, "role")
    sel = [sm.lookup(2, "sel", k) for k in range(2)]
    candidates = {
        "id": np.eye(4), "h0": gate_matrix("h", (0,), 2), "h1": gate_matrix("h", (1,), 2),
        "cx01": gate_matrix("cnot", (0, 1), 2), "cx10": gate_matrix("cnot", (1, 0), 2),
    }
    seen = {}
    for flip, choice in product((0, 1), (None, 0, 1)):
        x = list(base)
        # role is swapped back before the route swap, so it only picks operand order
        x[role] ^= flip
        for s in sel:
            x[s] = 0
        if choice is not None:
            x[sel[choice]] = 1
        U = _data_unitary(t, x)
        match = [k for k, V in candidates.items() if np.max(np.abs(U - V)) <= TOL]
        assert len(match) == 1
        seen[(flip, choice)] = match[0]
    assert set(seen.values()) == set(candidates)
    assert seen[(0, 1)] == "cx01" and seen[(1, 1)] == "cx10"
    assert seen[(0, None)] == seen[(1, None)] == "id"


@pytest.mark.parametrize("n, c", [(1, 0), (2, 0), (3, 0), (4, 0), (2, 2)])
def test_routing_is_a_permutation(n, c):
    # with every selector off, any routing bits move basis states to basis states
    t = build_size_universal(n, c, ("h", "cnot"))
    rng = np.random.default_rng(n * 10 + c)
    sels = [k for k, s in enumerate(t.slot_map.slots) if s.kind == "sel"]
    for _ in range(10):
        x = [int(v) for v in rng.integers(0, 2, len(t.slot_map))]
        for k in sels:
            x[k] = 0
        spec = specialize_classical(t.circuit, t.layout, x)
        outs = run_sparse(spec, [([y], [1.0]) for y in range(1 << n)])
        keys = []
        for out in outs:
            live = [(k, a) for k, a in out.items() if abs(a) > TOL]
            assert len(live) == 1 and abs(live[0][1] - 1) <= TOL
            keys.append(live[0][0])
        assert len(set(keys)) == len(keys)


def test_empty_circuit_routes_identity():
    for n, c in [(1, 0), (2, 0), (3, 2)]:
        t = build_size_universal(n, c)
        x = encode_size(Circuit(n), t).bits
        assert verify_encoding(t.circuit, t.layout, x, Circuit(n)).passed


# templates and encodings

def test_encode_single_cnot():
    t = build_size_universal(2, 1)
    c = Circuit.from_gates(2, [Gate("cnot", (0, 1))])
    e = encode_size(c, t)
    assert e[t.slot_map.lookup(2, "sel", t.palette.index("cnot"))] == 1
    assert sum(e[t.slot_map.lookup(2, "sel", k)] for k in range(3)) == 1
    assert verify_encoding(t.circuit, t.layout, e.bits, c).passed


@pytest.mark.parametrize("n, c", [(1, 1), (1, 4), (2, 3), (3, 3), (3, 6)])
def test_random_circuits_end_to_end(n, c):
    t = build_size_universal(n, c)
    rng = np.random.default_rng(100 * n + c)
    for _ in range(15):
        circ = random_palette_circuit(n, int(rng.integers(0, c + 1)), rng, t.palette)
        assert verify_encoding(t.circuit, t.layout, encode_size(circ, t).bits, circ).passed


def test_encode_errors():
    t = build_size_universal(2, 1)
    with pytest.raises(ValueError):
        encode_size(Circuit.from_gates(2, [Gate("h", (0,)), Gate("h", (1,))]), t)
    with pytest.raises(PaletteError):
        encode_size(Circuit.from_gates(2, [Gate("s", (0,))]), t)
    with pytest.raises(ValueError):
        encode_size(Circuit(3), t)
    with pytest.raises(GraphError):
        encode_size(Circuit.from_gates(2, [Gate("h", (0,))]), t, EdgeEmbedding((0,), ()))


def test_palette_validation():
    with pytest.raises(PaletteError):
        build_size_universal(2, 1, ("fanout",))
    with pytest.raises(PaletteError):
        build_size_universal(2, 1, ("h", "h"))
    with pytest.raises(PaletteError):
        build_size_universal(2, 1, ())
    assert build_size_universal(1, 1, ("H", "S")).palette == ("h", "s")


def test_encoding_length_closed_form():
    for n, c in product(range(1, 4), range(0, 7)):
        for pal in (("h", "cnot"), ("h", "t", "cnot")):
            t = build_size_universal(n, c, pal)
            assert len(t.slot_map) == encoding_length(n, c, len(pal), t.n_switches)


def test_size_law():
    for n, c in product(range(1, 4), range(0, 7)):
        t = build_size_universal(n, c)
        assert t.circuit.size <= t.size_bound(SIZE_CONSTANT)


def test_template_gate_set():
    t = build_size_universal(2, 2)
    assert {g.kind for g in t.circuit.gates()} <= {"cnot", "toffoli", "t", "h", "tdag", "s", "sdag"}


def test_size_template_save_load(tmp_path):
    t = build_size_universal(2, 2)
    t.save(tmp_path / "s")
    u = SizeUniversalTemplate.load(tmp_path / "s")
    assert u.circuit == t.circuit and u.slot_map == t.slot_map and u.layout == t.layout


# decomposition

def test_decompose_toffoli2():
    c = Circuit.from_gates(3, [Gate("h", (0,)), Gate("toffoli", (0, 1, 2))])
    d = decompose_for_size_universality(c)
    assert d.size == 1 + 15 and d.n_qubits == 3
    assert {g.kind for g in d.gates()} <= {"h", "t", "tdag", "cnot"}
    ref = circuit_matrix([(g.kind, g.qubits) for g in c.gates()], 3)
    assert np.max(np.abs(unitary_of(d) - ref)) <= TOL


def test_decompose_toffoli_free_unchanged():
    c = Circuit.from_gates(2, [Gate("h", (0,)), Gate("t", (1,)), Gate("cnot", (0, 1))])
    assert list(decompose_for_size_universality(c).gates()) == list(c.gates())


def test_decompose_toffoli3():
    c = Circuit.from_gates(4, [Gate("toffoli", (0, 1, 2, 3))])
    d = decompose_for_size_universality(c)
    assert d.size == 3 * 15 and d.n_qubits == 5
    U = unitary_of(d)
    assert np.max(np.abs(restrict_to_clean(U, 4, 5) - gate_matrix("toffoli", (0, 1, 2, 3), 4))) <= TOL
    assert leak(U, 4, 5) <= TOL


def test_decompose_fanout_forms():
    c = Circuit.from_gates(3, [Gate("fanout", (0, 1, 2)), Gate("zfanout", (1, 0, 2))])
    d = decompose_for_size_universality(c)
    ref = circuit_matrix([(g.kind, g.qubits) for g in c.gates()], 3)
    assert np.max(np.abs(unitary_of(d) - ref)) <= TOL
    with pytest.raises(CircuitError):
        decompose_for_size_universality(Circuit.from_gates(1, [Gate("x", (0,))]))
