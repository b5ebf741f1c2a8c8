"""
Exact gate gadgets shared by both universal constructions.

Every gadget here reproduces its target unitary exactly, global phase
included; the oracle tests compare full matrices entry by entry.
"""
from __future__ import annotations

from functools import lru_cache

from .circuit import (FAMILY_BASIS, Circuit, CircuitError, FamilyError, Gate, Layer,
                      normalize_family, parallel)

CONTROLLABLE = ("h", "t", "tdag", "s", "sdag", "x", "z")


def power_of_T(k: int) -> Circuit:
    """T^k on one qubit; T^8 = I, so k ranges over 0..7."""
    if not 0 <= k < 8:
        raise ValueError("T power must lie in 0..7")
    return Circuit.from_gates(1, [Gate("t", (0,))] * k)


def _doubling_schedule(control: int, targets) -> list[tuple[int, int]]:
    """(parent, child) copy edges; every round each holder feeds one new target."""
    holders, todo, edges = [control], list(targets), []
    while todo:
        fresh = []
        for h in holders:
            if not todo:
                break
            t = todo.pop(0)
            edges.append((h, t))
            fresh.append(t)
        holders += fresh
    return edges


def expand_fanout(g: Gate, n_qubits: int | None = None, clean_targets: bool = False) -> Circuit:
    """Fanout as a log-depth CNOT tree.

    With ``clean_targets`` the plain copy-doubling tree is emitted, depth
    ceil(log2(w+1)); it equals the fanout only when every target starts in
    |0>, which is how the universal templates use fanout. Otherwise a
    difference pass runs first so the result is exact on every input, at
    depth at most 2*ceil(log2(w+1)) - 1.
    """
    if g.kind not in ("fanout", "cnot"):
        raise CircuitError(f"expand_fanout needs a fanout gate, got {g.kind}")
    n = n_qubits if n_qubits is not None else max(g.qubits) + 1
    c = g.qubits[0]
    edges = _doubling_schedule(c, g.qubits[1:])
    gates = []
    if not clean_targets:
        gates += [Gate("cnot", (p, v)) for p, v in reversed(edges) if p != c]
    gates += [Gate("cnot", e) for e in edges]
    return Circuit.from_gates(n, gates)


def conjugate_fanout_zfanout(g: Gate) -> list[Layer]:
    """Fanout <-> Z-fanout by Hadamards on every target."""
    swap = {"fanout": "zfanout", "cnot": "zfanout", "zfanout": "fanout"}
    if g.kind not in swap:
        raise CircuitError(f"not a fanout or Z-fanout gate: {g.kind}")
    hs = tuple(Gate("h", (t,)) for t in g.qubits[1:])
    return [Layer(hs), Layer((Gate(swap[g.kind], g.qubits),)), Layer(hs)]


def toffoli_z_conjugation(g: Gate) -> list[Layer]:
    """Toffoli <-> generalized Z by Hadamards on the Toffoli target."""
    if g.kind == "toffoli":
        mid = Gate("gz", g.qubits)
    elif g.kind == "gz":
        if len(g.qubits) == 1:
            mid = Gate("x", g.qubits)
        elif len(g.qubits) == 2:
            mid = Gate("cnot", g.qubits)
        else:
            mid = Gate("toffoli", g.qubits)
    else:
        raise CircuitError(f"not a Toffoli or Z gate: {g.kind}")
    h = (Gate("h", (g.qubits[-1],)),)
    return [Layer(h), Layer((mid,)), Layer(h)]


def controlled_T_gadget() -> Circuit:
    """Controlled-T on (control 0, target 1) through an ancilla (2) that starts and ends in |0>."""
    tof = Gate("toffoli", (0, 1, 2))
    return Circuit.from_gates(3, [tof, Gate("t", (2,)), tof])


def controlled_gadget(kind: str) -> Circuit:
    """Exact controlled-``kind`` with control 0 and target 1.

    Phase gates borrow an ancilla on qubit 2 (must be |0>); the others are
    two-qubit circuits.
    """
    kind = kind.lower()
    if kind not in CONTROLLABLE:
        raise CircuitError(f"no controlled gadget for {kind!r}")
    if kind == "x":
        return Circuit.from_gates(2, [Gate("cnot", (0, 1))])
    if kind == "z":
        return Circuit.from_gates(2, [Gate("h", (1,)), Gate("cnot", (0, 1)), Gate("h", (1,))])
    if kind == "h":
        # A X A^dag = H with A = S H T, so A . CNOT . A^dag is exactly controlled-H
        pre = [Gate("sdag", (1,)), Gate("h", (1,)), Gate("tdag", (1,))]
        post = [Gate("t", (1,)), Gate("h", (1,)), Gate("s", (1,))]
        return Circuit.from_gates(2, pre + [Gate("cnot", (0, 1))] + post)
    tof = Gate("toffoli", (0, 1, 2))
    return Circuit.from_gates(3, [tof, Gate(kind, (2,)), tof])


def decompose_toffoli_n(w: int) -> Circuit:
    """Toffoli_w from w-1 two-control Toffolis computing an AND chain, then uncomputing.

    Qubits: controls 0..w-1, target w, ancillas w+1..2w-2 (all |0>).
    """
    if w < 2:
        raise ValueError("need at least two controls")
    t = w
    anc = list(range(w + 1, 2 * w - 1))
    if w == 2:
        return Circuit.from_gates(3, [Gate("toffoli", (0, 1, 2))])
    chain = [Gate("toffoli", (0, 1, anc[0]))]
    for k in range(2, w - 1):
        chain.append(Gate("toffoli", (anc[k - 2], k, anc[k - 1])))
    core = Gate("toffoli", (anc[-1], w - 1, t))
    return Circuit.from_gates(2 * w - 1, chain + [core] + chain[::-1])


def toffoli3_to_standard() -> Circuit:
    """The textbook 15-gate Clifford+T Toffoli on (control 0, control 1, target 2)."""
    a, b, t = 0, 1, 2
    seq = [("h", t), ("cnot", a, t), ("t", a), ("tdag", t), ("cnot", b, t), ("cnot", b, a),
           ("tdag", a), ("t", t), ("cnot", b, a), ("cnot", a, t), ("tdag", t), ("cnot", b, t),
           ("t", t), ("t", b), ("h", t)]
    return Circuit.from_gates(3, [Gate(k, qs) for k, *qs in seq])


def embed(local: Circuit, qubits, n_qubits: int) -> Circuit:
    """Place a gadget's local qubits 0..k-1 onto ``qubits`` of a wider register."""
    return local.remap(list(qubits), n_qubits)


# strict expansion into a family's basis gates

def _t_run(q, k):
    return [Gate("t", (q,))] * k


def _expand_gate(g: Gate, family: str) -> list[Gate]:
    k, qs = g.kind, g.qubits
    basis = FAMILY_BASIS[family]
    if k in basis and not (k == "toffoli" and family == "F"):
        return [g]
    if k in ("tdag", "s", "sdag", "z"):
        return _t_run(qs[0], {"tdag": 7, "s": 2, "sdag": 6, "z": 4}[k])
    if k == "x":
        return [Gate("h", qs)] + _t_run(qs[0], 4) + [Gate("h", qs)]
    if k == "cnot":
        return [Gate("fanout", qs)]
    if k == "zfanout":
        hs = [Gate("h", (t,)) for t in qs[1:]]
        return hs + [Gate("fanout", qs)] + hs
    if k == "toffoli":
        if len(qs) != 3:
            raise FamilyError("Toffoli_n with n > 2 has no exact constant-depth form over F")
        out = []
        for sub in toffoli3_to_standard().remap(list(qs), max(qs) + 1).gates():
            out += _expand_gate(sub, family)
        return out
    if k == "gz":
        if len(qs) == 1:
            return _t_run(qs[0], 4)
        h = Gate("h", (qs[-1],))
        if len(qs) == 2:
            return [h, Gate("fanout", qs), h]
        if family == "F":
            raise FamilyError("generalized Z on 3+ qubits needs Toffoli_n")
        return [h, Gate("toffoli", qs), h]
    raise FamilyError(f"cannot express {k} over {family}")


@lru_cache(maxsize=None)
def slab_height(family: str) -> int:
    """Depth every template layer occupies after strict expansion."""
    family = normalize_family(family)
    probes = [Gate(k, (0,)) for k in ("h", "t", "tdag", "s", "sdag", "x", "z")]
    probes += [Gate("cnot", (0, 1)), Gate("fanout", (0, 1, 2)), Gate("zfanout", (0, 1, 2)),
               Gate("gz", (0,)), Gate("gz", (0, 1)), Gate("toffoli", (0, 1, 2))]
    if family == "Fprime":
        probes += [Gate("gz", (0, 1, 2)), Gate("toffoli", (0, 1, 2, 3))]
    return max(Circuit.from_gates(4, _expand_gate(g, family)).depth for g in probes)


def expand_to_family(c: Circuit, family: str) -> Circuit:
    """Rewrite every gate into the family's basis (H, T, Fanout[, Toffoli_n]).

    Each input layer becomes a slab of exactly ``slab_height(family)`` layers,
    so depth scales by a constant independent of the circuit.
    """
    family = normalize_family(family)
    h = slab_height(family)
    layers: list[Layer] = []
    for layer in c.layers:
        parts = [Circuit.from_gates(c.n_qubits, _expand_gate(g, family)) for g in layer]
        slab = parallel(c.n_qubits, parts)
        layers.extend(slab.layers)
        layers.extend(Layer() for _ in range(h - slab.depth))
    return Circuit(c.n_qubits, tuple(layers), family, c.phase)
