"""
Size-universal templates built on an edge-universal graph.

The graph has N = 2n + c poles: n input poles, c gate poles and n output
poles. Every graph edge is a wire. Each vertex sees two strands (its
in-wires, padded with fresh |0> workspace) and emits them on its out-wires:

    non-pole      controlled swap on bit ``switch``
    input pole    controlled swap on bit ``route``
    gate pole     cswap(role); one controlled palette gate per one-hot
                  selector; cswap(role); cswap(route)
    output pole   cswap(role); strand 0 is the output wire

Strands are assigned to physical qubits in topological order with a free
list, so the layout does not depend on the encoding. A fixed swap network
at the end returns the outputs to qubits 0..n-1.
"""
from __future__ import annotations

from dataclasses import dataclass
import json
import math
from pathlib import Path

from ..circuit import Circuit, CircuitError, Gate, parse_circuit, serialize_circuit
from ..encoding import Encoding, Slot, SlotMap
from ..gadgets import CONTROLLABLE, controlled_gadget, decompose_toffoli_n, toffoli3_to_standard
from ..simulator import RegisterLayout
from .graphs import (EdgeEmbedding, EUGraph, Gamma2Graph, GraphError, WireLabels,
                     build_edge_universal, circuit_to_gamma2, embed)

DEFAULT_PALETTE = ("h", "t", "cnot")
TWO_QUBIT = ("cnot",)
# pinned constant for SIZE <= K (n + c) lg(n + c); see tests for the scan
SIZE_CONSTANT = 30


class PaletteError(ValueError):
    pass


def check_palette(palette) -> tuple[str, ...]:
    pal = tuple(k.strip().lower() for k in palette)
    if not pal:
        raise PaletteError("empty palette")
    for k in pal:
        if k not in CONTROLLABLE and k not in TWO_QUBIT:
            raise PaletteError(f"palette gate {k!r} has no controlled form in this library")
    if len(set(pal)) != len(pal):
        raise PaletteError("repeated palette entry")
    return pal


def controlled_swap(e: int, a: int, b: int) -> list[Gate]:
    """Swap a and b when e = 1: CNOT(b->a) Toffoli(e, a->b) CNOT(b->a)."""
    return [Gate("cnot", (b, a)), Gate("toffoli", (e, a, b)), Gate("cnot", (b, a))]


def swap_gates(a: int, b: int) -> list[Gate]:
    return [Gate("cnot", (a, b)), Gate("cnot", (b, a)), Gate("cnot", (a, b))]


@dataclass(frozen=True)
class SizeUniversalTemplate:
    circuit: Circuit
    layout: RegisterLayout
    slot_map: SlotMap
    palette: tuple[str, ...]
    n: int
    c: int
    graph: EUGraph

    @property
    def n_switches(self) -> int:
        return sum(1 for s in self.slot_map.slots if s.kind == "switch")

    def size_bound(self, K: float = SIZE_CONSTANT) -> float:
        m = self.n + self.c
        return K * m * max(1.0, math.log2(m))

    def save(self, prefix: str | Path) -> list[Path]:
        prefix = Path(prefix)
        files = [prefix.with_suffix(".grid"), prefix.with_suffix(".slots"),
                 prefix.with_suffix(".json")]
        files[0].write_text(serialize_circuit(self.circuit))
        files[1].write_text(self.slot_map.to_text())
        meta = {"kind": "size-universal", "n": self.n, "c": self.c,
                "palette": list(self.palette), "layout": self.layout.to_dict()}
        files[2].write_text(json.dumps(meta, indent=1, sort_keys=True) + "\n")
        return files

    @classmethod
    def load(cls, prefix: str | Path) -> "SizeUniversalTemplate":
        # the graph is not stored; rebuild deterministically and cross-check
        prefix = Path(prefix)
        meta = json.loads(prefix.with_suffix(".json").read_text())
        if meta.get("kind") != "size-universal":
            raise ValueError(f"{prefix}: not a size-universal template")
        t = build_size_universal(meta["n"], meta["c"], meta["palette"])
        if parse_circuit(prefix.with_suffix(".grid").read_text()) != t.circuit:
            raise ValueError(f"{prefix}: stored circuit does not match its parameters")
        return t


def encoding_length(n: int, c: int, palette_size: int, n_switches: int) -> int:
    """Closed form: c (|palette| + 2) + 2n + one bit per switch vertex."""
    return c * (palette_size + 2) + 2 * n + n_switches


def _template_graph(n: int, c: int) -> EUGraph:
    N = 2 * n + c
    eu = build_edge_universal(N)
    return eu.without(drop_in=range(n), drop_out=range(n + c, N))


def _role(v: int, n: int, c: int) -> str:
    if v < n:
        return "input"
    if v < n + c:
        return "gate"
    if v < 2 * n + c:
        return "output"
    return "switch"


def _vertex_slots(v, role, graph, palette) -> list[Slot]:
    if role == "input":
        return [Slot(v, "route")]
    if role == "output":
        return [Slot(v, "role")]
    if role == "gate":
        return [Slot(v, "role")] + [Slot(v, "sel", k) for k in range(len(palette))] + [Slot(v, "route")]
    if max(len(graph.in_edges[v]), len(graph.out_edges[v])) == 2:
        return [Slot(v, "switch")]
    return []


def build_size_universal(n: int, c: int, palette=DEFAULT_PALETTE) -> SizeUniversalTemplate:
    if n < 1 or c < 0:
        raise ValueError("need n >= 1 and c >= 0")
    palette = check_palette(palette)
    graph = _template_graph(n, c)
    order = graph.topological_order()
    roles = {v: _role(v, n, c) for v in order}
    slots = [s for v in order for s in _vertex_slots(v, roles[v], graph, palette)]

    # strand allocation; qubit ids here are provisional, data first
    free: list[int] = []
    counter = [n]
    wire: dict[tuple[int, int], int] = {}
    strands: dict[int, tuple[int, int]] = {}
    outputs = [None] * n

    def fresh():
        if free:
            return free.pop()
        counter[0] += 1
        return counter[0] - 1

    for v in order:
        ins = [wire.pop(e) for e in graph.in_edges[v]]
        if roles[v] == "input":
            ins = [v]
        needs = 2 if (_vertex_slots(v, roles[v], graph, palette) or roles[v] != "switch") else len(ins)
        while len(ins) < needs:
            ins.append(fresh())
        strands[v] = (ins[0], ins[1]) if len(ins) == 2 else (ins[0], -1) if ins else (-1, -1)
        if roles[v] == "output":
            outputs[v - n - c] = ins[0]
            free.append(ins[1])
            continue
        outs = graph.out_edges[v]
        for k, e in enumerate(outs):
            wire[e] = ins[k]
        free.extend(sorted(ins[len(outs):], reverse=True))
    n_strands = counter[0]
    anc_t = n_strands
    enc0 = n_strands + 1
    qubit = {s: enc0 + k for k, s in enumerate(slots)}

    gates: list[Gate] = []
    for v in order:
        a, b = strands[v]
        r = roles[v]
        if r == "switch":
            if Slot(v, "switch") in qubit:
                gates += controlled_swap(qubit[Slot(v, "switch")], a, b)
        elif r == "input":
            gates += controlled_swap(qubit[Slot(v, "route")], a, b)
        elif r == "output":
            gates += controlled_swap(qubit[Slot(v, "role")], a, b)
        else:
            role = qubit[Slot(v, "role")]
            gates += controlled_swap(role, a, b)
            for k, kind in enumerate(palette):
                e = qubit[Slot(v, "sel", k)]
                if kind == "cnot":
                    gates.append(Gate("toffoli", (e, a, b)))
                else:
                    gadget = controlled_gadget(kind)
                    gates += gadget.remap([e, a, anc_t][:gadget.n_qubits], enc0 + len(slots)).gates()
            gates += controlled_swap(role, a, b)
            gates += controlled_swap(qubit[Slot(v, "route")], a, b)

    # fixed permutation bringing output q to qubit q
    pos = list(outputs)
    where = {p: q for q, p in enumerate(pos)}
    for q in range(n):
        if pos[q] == q:
            continue
        gates += swap_gates(pos[q], q)
        other = where.get(q)
        if other is not None:
            pos[other] = pos[q]
            where[pos[q]] = other
        where[q] = q
        pos[q] = q

    total = enc0 + len(slots)
    layout = RegisterLayout(tuple(range(n)), tuple(range(enc0, total)),
                            tuple(range(n, n_strands)) + (anc_t,))
    circuit = Circuit.from_gates(total, gates)
    return SizeUniversalTemplate(circuit, layout, SlotMap(slots), palette, n, c, graph)


def _with_outputs(g: Gamma2Graph, labels: WireLabels, n: int, c: int):
    """Place gate vertices at poles n..n+c-1 and add output vertices n+c..2n+c-1."""
    edges = list(g.edges)
    qubits = list(labels.edge_qubit)
    for q in range(n):
        edges.append((labels.last[q], n + c + q))
        qubits.append(q)
    return Gamma2Graph(2 * n + c, tuple(edges)), qubits


def encode_size(c_in: Circuit, t: SizeUniversalTemplate, e: EdgeEmbedding | None = None) -> Encoding:
    """Encoding that makes ``t`` act as ``c_in``."""
    if c_in.n_qubits != t.n:
        raise ValueError(f"circuit has {c_in.n_qubits} qubits, template has {t.n}")
    if c_in.phase:
        raise CircuitError("size-universal templates cannot carry a global phase")
    for g in c_in.gates():
        if g.kind not in t.palette:
            raise PaletteError(f"gate {g.kind} is not in the palette {','.join(t.palette)}")
    if c_in.size > t.c:
        raise ValueError(f"circuit has {c_in.size} gates, template supports {t.c}")
    g, labels = circuit_to_gamma2(c_in)
    full, edge_qubit = _with_outputs(g, labels, t.n, t.c)
    if e is None:
        e = embed(full, t.graph)
    elif len(e.paths) != len(full.edges):
        raise GraphError("embedding does not match the circuit graph")
    G = t.graph

    def in_pos(v, edge):
        return G.in_edges[v].index(edge)

    def out_pos(v, edge):
        return G.out_edges[v].index(edge)

    ones: list[Slot] = []
    arrive: dict[tuple[int, int], int] = {}   # (pole, qubit) -> in position
    leave: dict[tuple[int, int], int] = {}    # (pole, qubit) -> out position
    for k, path in enumerate(e.paths):
        q = edge_qubit[k]
        steps = list(zip(path, path[1:]))
        leave[(path[0], q)] = out_pos(path[0], steps[0])
        arrive[(path[-1], q)] = in_pos(path[-1], steps[-1])
        for (u, v), (_, w) in zip(steps, steps[1:]):
            if in_pos(v, (u, v)) != out_pos(v, (v, w)):
                ones.append(Slot(v, "switch"))
    for q in range(t.n):
        if leave[(q, q)]:
            ones.append(Slot(q, "route"))
        if arrive[(t.n + t.c + q, q)]:
            ones.append(Slot(t.n + t.c + q, "role"))
    for idx, gate in enumerate(c_in.gates()):
        v = t.n + idx
        ops = gate.qubits
        role = arrive[(v, ops[0])]
        if role:
            ones.append(Slot(v, "role"))
        ones.append(Slot(v, "sel", t.palette.index(gate.kind)))
        if role != leave[(v, ops[0])]:
            ones.append(Slot(v, "route"))
    return t.slot_map.encode(ones)


def decompose_for_size_universality(c: Circuit) -> Circuit:
    """Rewrite Toffoli_n into H, T, Tdag, CNOT with clean ancillas appended.

    Each Toffoli_w becomes the AND chain of w-1 two-control Toffolis (using
    qubits n..n+w-3 as ancillas), then each of those becomes the 15-gate
    standard circuit. The result acts as ``c`` whenever the ancillas start in
    |0>, and returns them to |0>. Fanout and Z-fanout are written as CNOT runs.
    """
    n = c.n_qubits
    widest = max((len(g.qubits) - 1 for g in c.gates() if g.kind == "toffoli"), default=0)
    total = n + max(0, widest - 2)
    std = toffoli3_to_standard()
    out: list[Gate] = []
    for g in c.gates():
        k, qs = g.kind, g.qubits
        if k == "toffoli":
            w = len(qs) - 1
            chain = decompose_toffoli_n(w)
            qmap = list(qs) + list(range(n, n + w - 2))
            for t3 in chain.gates():
                out += std.remap([qmap[q] for q in t3.qubits], total).gates()
        elif k == "fanout":
            out += [Gate("cnot", (qs[0], t)) for t in qs[1:]]
        elif k == "zfanout":
            for t in qs[1:]:
                out += [Gate("h", (t,)), Gate("cnot", (qs[0], t)), Gate("h", (t,))]
        elif k == "gz" or k in ("x", "z", "s", "sdag"):
            raise CircuitError(f"{k} is outside the H, T, Toffoli input family")
        else:
            out.append(g)
    return Circuit.from_gates(total, out)
