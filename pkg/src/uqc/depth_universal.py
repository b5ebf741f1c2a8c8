"""
Depth-universal templates over F = {H, T, Fanout} and F' = F + {Toffoli}.

A template with capacity d is d copies of one layer group. Each group
offers five slot families, visited in this order:

    H    controlled-H on every data qubit (control c_q)
    T    controlled-T on every data qubit (control c_q, workspace t_q)
    ZF   Z-fanout block group: n blocks, slots c_ij
    Z    generalized-Z block group (F' only): n blocks, slots c_ij
    H2   a second controlled-H layer

Every source layer normalizes to sublayers of kind H, T, ZF, Z, and the
sublayers are packed greedily into the slot sequence. Each source layer of a
circuit over the strict family fits one group, so a depth-d circuit fits a
template with d groups. Sugar gates (S, Tdag, X, Z) cost extra T sublayers.

Register layout: data 0..n-1, then workspace (b_ij, a_ij, t_q), then the
encoding slots group by group in slot-map order.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
import json
from pathlib import Path

from .circuit import (Circuit, CircuitError, FamilyError, Gate, Layer, normalize_family,
                      parse_circuit, serialize_circuit)
from .encoding import Encoding, Slot, SlotMap
from .gadgets import controlled_gadget, expand_to_family
from .simulator import RegisterLayout

SUBLAYER_KINDS = ("H", "T", "ZF", "Z")
T_COST = {"t": 1, "s": 2, "z": 4, "sdag": 6, "tdag": 7, "x": 4}
# worst case per source layer: H, seven T powers, ZF, Z, H
K_NORM = 11


class CapacityError(ValueError):
    pass


# normalization

@dataclass(frozen=True)
class NormalizedCircuit:
    n: int
    sublayers: tuple[tuple[str, Layer], ...]
    source_depth: int
    family: str

    def kinds(self) -> list[str]:
        return [k for k, _ in self.sublayers]

    def to_circuit(self) -> Circuit:
        """The normalized circuit as plain layers (for oracle comparison)."""
        return Circuit(self.n, tuple(l for _, l in self.sublayers), family=None)


def _infer_family(c: Circuit) -> str:
    big = any(g.kind == "toffoli" or (g.kind == "gz" and len(g.qubits) > 2) for g in c.gates())
    return "Fprime" if big else "F"


def normalize(c: Circuit, family: str | None = None) -> NormalizedCircuit:
    """Split every layer into H / T / ZF / Z sublayers.

    Fanouts become H-conjugated Z-fanouts, Toffolis become H-conjugated
    generalized Z gates, X becomes H T^4 H and phase gates become T powers.
    Adjacent H sublayers are merged; Hadamards that meet cancel.
    """
    family = normalize_family(family or c.family) or _infer_family(c)
    if c.phase:
        raise CircuitError("circuits with a global phase directive cannot be normalized")
    subs: list[tuple[str, set | list]] = []

    def push_h(qs: set[int]):
        if subs and subs[-1][0] == "H":
            subs[-1] = ("H", subs[-1][1] ^ qs)
        else:
            subs.append(("H", set(qs)))

    for layer in c.layers:
        pre, post = set(), set()
        tpow: dict[int, int] = {}
        zf, zz = [], []
        for g in layer:
            k, qs = g.kind, g.qubits
            if k == "h":
                pre.add(qs[0])
            elif k in T_COST:
                tpow[qs[0]] = T_COST[k]
                if k == "x":
                    pre.add(qs[0])
                    post.add(qs[0])
            elif k in ("cnot", "fanout"):
                pre.update(qs[1:])
                post.update(qs[1:])
                zf.append(Gate("zfanout", qs))
            elif k == "zfanout":
                zf.append(g)
            elif k == "gz" and len(qs) == 1:
                tpow[qs[0]] = 4
            elif k == "gz" and len(qs) == 2:
                zf.append(Gate("zfanout", qs))
            elif k in ("gz", "toffoli"):
                if family != "Fprime":
                    raise FamilyError(f"{k} on {len(qs)} qubits needs gate family F'")
                if k == "toffoli":
                    pre.add(qs[-1])
                    post.add(qs[-1])
                zz.append(Gate("gz", qs))
            else:
                raise FamilyError(f"cannot normalize gate kind {k}")
        if pre:
            push_h(pre)
        for p in range(1, max(tpow.values(), default=0) + 1):
            subs.append(("T", [Gate("t", (q,)) for q, m in sorted(tpow.items()) if m >= p]))
        if zf:
            subs.append(("ZF", zf))
        if zz:
            subs.append(("Z", zz))
        if post:
            push_h(post)

    out = []
    for kind, content in subs:
        if kind == "H":
            if not content:
                continue
            content = [Gate("h", (q,)) for q in sorted(content)]
        out.append((kind, Layer(tuple(content))))
    return NormalizedCircuit(c.n_qubits, tuple(out), c.depth, family)


# template construction

@dataclass(frozen=True)
class UniversalTemplate:
    circuit: Circuit
    layout: RegisterLayout
    slot_map: SlotMap
    family: str
    n: int
    d_capacity: int
    strict: bool = False

    @property
    def group_slots(self) -> tuple[str, ...]:
        return group_slot_kinds(self.family)

    def save(self, prefix: str | Path) -> list[Path]:
        prefix = Path(prefix)
        files = [prefix.with_suffix(".grid"), prefix.with_suffix(".slots"),
                 prefix.with_suffix(".json")]
        files[0].write_text(serialize_circuit(self.circuit))
        files[1].write_text(self.slot_map.to_text())
        meta = {"kind": "depth-universal", "n": self.n, "d": self.d_capacity,
                "family": self.family, "strict": self.strict, "layout": self.layout.to_dict()}
        files[2].write_text(json.dumps(meta, indent=1, sort_keys=True) + "\n")
        return files

    @classmethod
    def load(cls, prefix: str | Path) -> "UniversalTemplate":
        prefix = Path(prefix)
        meta = json.loads(prefix.with_suffix(".json").read_text())
        if meta.get("kind") != "depth-universal":
            raise ValueError(f"{prefix}: not a depth-universal template")
        return cls(parse_circuit(prefix.with_suffix(".grid").read_text()),
                   RegisterLayout.from_dict(meta["layout"]),
                   SlotMap.from_text(prefix.with_suffix(".slots").read_text()),
                   meta["family"], meta["n"], meta["d"], meta.get("strict", False))


def group_slot_kinds(family: str) -> tuple[str, ...]:
    if normalize_family(family) == "Fprime":
        return ("H", "T", "ZF", "Z", "H2")
    return ("H", "T", "ZF", "H2")


def _group_slots(g: int, n: int, family: str) -> list[Slot]:
    out = []
    for kind in group_slot_kinds(family):
        if kind in ("ZF", "Z"):
            out += [Slot(g, kind, i, j) for i in range(n) for j in range(n)]
        else:
            out += [Slot(g, kind, q) for q in range(n)]
    return out


@dataclass(frozen=True)
class Workspace:
    """Qubit indices of the reusable workspace registers."""
    b: tuple[tuple[int, ...], ...]
    a: tuple[tuple[int, ...], ...]
    t: tuple[int, ...]

    @classmethod
    def allocate(cls, n: int, start: int) -> "Workspace":
        b = tuple(tuple(start + i * n + j for j in range(n)) for i in range(n))
        start += n * n
        a = tuple(tuple(start + i * n + j for j in range(n)) for i in range(n))
        start += n * n
        return cls(b, a, tuple(range(start, start + n)))

    @property
    def qubits(self) -> list[int]:
        return [q for row in self.b for q in row] + [q for row in self.a for q in row] + list(self.t)


def controlled_h_layers(n: int, ctrl) -> list[Layer]:
    gadget = controlled_gadget("h")
    return [Layer(tuple(g.remap([ctrl[q], q]) for q in range(n) for g in l))
            for l in gadget.layers]


def controlled_t_layers(n: int, ctrl, t) -> list[Layer]:
    # encoding control goes second so that strict expansion keeps it classical
    tof = Layer(tuple(Gate("toffoli", (q, ctrl[q], t[q])) for q in range(n)))
    return [tof, Layer(tuple(Gate("t", (t[q],)) for q in range(n))), tof]


def _fanout_layer(n, b, blocks):
    if not blocks:
        return Layer()
    return Layer(tuple(Gate("fanout", (j,) + tuple(b[i][j] for i in blocks)) for j in range(n)))


def zfanout_block_layers(n: int, ws: Workspace, c, blocks=None) -> list[Layer]:
    """Z-fanout block group: phase (-1)^(sum_i d_i c_ii sum_{j!=i} d_j c_ij).

    ``c[i][j]`` is the encoding qubit of slot (i, j); ``blocks`` restricts the
    group to a subset of blocks (all by default).
    """
    blocks = list(range(n)) if blocks is None else list(blocks)
    b, a = ws.b, ws.a
    fan = _fanout_layer(n, b, blocks)
    tof = Layer(tuple(Gate("toffoli", (b[i][j], c[i][j], a[i][j]))
                      for i in blocks for j in range(n)))
    core = Layer(tuple(Gate("zfanout", (a[i][i],) + tuple(a[i][j] for j in range(n) if j != i))
                       for i in blocks if n > 1))
    return [fan, tof, core, tof, fan]


def z_block_layers(n: int, ws: Workspace, c, blocks=None) -> list[Layer]:
    """Generalized-Z block group: phase (-1)^(sum_i (not c_ii + prod_{j: c_ij} b_ij)).

    Contact a_ij is prepared in NOT(NOT(b_ij) AND c_ij), so a block whose
    slots are all zero contributes (-1)^(1 + 1) = +1.
    """
    blocks = list(range(n)) if blocks is None else list(blocks)
    b, a = ws.b, ws.a
    fan = _fanout_layer(n, b, blocks)
    flips = Layer(tuple(Gate("x", (q,)) for i in blocks for j in range(n) for q in (a[i][j], b[i][j])))
    tof = Layer(tuple(Gate("toffoli", (b[i][j], c[i][j], a[i][j]))
                      for i in blocks for j in range(n)))
    xc = Layer(tuple(Gate("x", (c[i][i],)) for i in blocks))
    core = Layer(tuple(Gate("z", (c[i][i],)) for i in blocks)
                 + tuple(Gate("gz", a[i]) for i in blocks))
    return [fan, flips, tof, xc, core, xc, tof, flips, fan]


def group_depth(family: str) -> int:
    """Unexpanded depth of one layer group."""
    extra = 9 if normalize_family(family) == "Fprime" else 0
    return 7 + 3 + 5 + extra + 7


def build_block_group(n: int, kind: str, blocks=None) -> tuple[Circuit, RegisterLayout, SlotMap]:
    """A single ZF or Z block group on its own register, for isolated checks.

    Register: data 0..n-1, workspace, then one encoding qubit per slot of
    the selected blocks.
    """
    blocks = list(range(n)) if blocks is None else list(blocks)
    ws = Workspace.allocate(n, n)
    anc = [q for row in ws.b for q in row] + [q for row in ws.a for q in row]
    start = n + 2 * n * n
    slots = [Slot(0, kind, i, j) for i in blocks for j in range(n)]
    c = [[-1] * n for _ in range(n)]
    for k, s in enumerate(slots):
        c[s.i][s.j] = start + k
    builder = {"ZF": zfanout_block_layers, "Z": z_block_layers}[kind]
    # unselected blocks are never touched; give their slots dummy indices
    layers = builder(n, ws, c, blocks)
    total = start + len(slots)
    layout = RegisterLayout(tuple(range(n)), tuple(range(start, total)), tuple(anc))
    return Circuit(total, tuple(layers)), layout, SlotMap(slots)


def build_universal(n: int, d: int, family: str = "F", strict: bool = False) -> UniversalTemplate:
    """The depth-universal template U_{n,d}.

    With ``strict`` every gate is rewritten into the family basis (H, T,
    Fanout, plus Toffoli for F'); each template layer becomes a fixed-height
    slab, so the depth stays a constant multiple of d.
    """
    if n < 1 or d < 0:
        raise ValueError("need n >= 1 and d >= 0")
    family = normalize_family(family)
    if d == 0:
        layout = RegisterLayout(tuple(range(n)), (), ())
        return UniversalTemplate(Circuit(n, (), None), layout, SlotMap([]), family, n, 0, strict)
    ws = Workspace.allocate(n, n)
    slots = [s for g in range(d) for s in _group_slots(g, n, family)]
    enc0 = n + len(ws.qubits)
    qubit = {s: enc0 + k for k, s in enumerate(slots)}
    layers: list[Layer] = []
    for g in range(d):
        for kind in group_slot_kinds(family):
            if kind in ("H", "H2"):
                layers += controlled_h_layers(n, [qubit[Slot(g, kind, q)] for q in range(n)])
            elif kind == "T":
                layers += controlled_t_layers(n, [qubit[Slot(g, "T", q)] for q in range(n)], ws.t)
            else:
                c = [[qubit[Slot(g, kind, i, j)] for j in range(n)] for i in range(n)]
                builder = zfanout_block_layers if kind == "ZF" else z_block_layers
                layers += builder(n, ws, c)
    total = enc0 + len(slots)
    layout = RegisterLayout(tuple(range(n)), tuple(range(enc0, total)), tuple(ws.qubits))
    circ = Circuit(total, tuple(layers))
    if strict:
        circ = _strict(circ, set(layout.encoding), family)
    return UniversalTemplate(circ, layout, SlotMap(slots), family, n, d, strict)


def _strict(c: Circuit, encoding: set[int], family: str) -> Circuit:
    # X Z X = -Z: X pairs on encoding wires would need Hadamards there, so
    # they are dropped and their sign moves into the global phase
    dropped = 0
    layers = []
    for layer in c.layers:
        keep = []
        for g in layer:
            if g.kind == "x" and g.qubits[0] in encoding:
                dropped += 1
            else:
                keep.append(g)
        layers.append(Layer(tuple(keep)))
    if dropped % 2:
        raise CircuitError("unpaired X on an encoding qubit")
    flat = Circuit(c.n_qubits, tuple(layers), None, c.phase + 2 * dropped)
    return expand_to_family(flat, family)


# encoding

def encode(nc: NormalizedCircuit, t: UniversalTemplate) -> Encoding:
    """Pack normalized sublayers into the template's slots, earliest fit first."""
    if nc.n != t.n:
        raise ValueError(f"circuit has {nc.n} qubits, template has {t.n}")
    if nc.family == "Fprime" and t.family == "F" and "Z" in nc.kinds():
        raise FamilyError("circuit needs generalized-Z blocks; template is over F")
    order = [(g, k) for g in range(t.d_capacity) for k in t.group_slots]
    pos = 0
    ones: list[Slot] = []
    for kind, layer in nc.sublayers:
        want = ("H", "H2") if kind == "H" else (kind,)
        while pos < len(order) and order[pos][1] not in want:
            pos += 1
        if pos == len(order):
            raise CapacityError(f"circuit needs more than {t.d_capacity} layer groups")
        g, slot_kind = order[pos]
        pos += 1
        for gate in layer:
            if kind in ("H", "T"):
                ones.append(Slot(g, slot_kind, gate.qubits[0]))
            else:
                i = gate.qubits[0]
                ones.append(Slot(g, slot_kind, i, i))
                ones += [Slot(g, slot_kind, i, j) for j in gate.qubits[1:]]
    return t.slot_map.encode(ones)


def encode_circuit(c: Circuit, t: UniversalTemplate) -> Encoding:
    return encode(normalize(c, t.family if c.family is None else c.family), t)


# resource accounting

@dataclass(frozen=True)
class DepthReport:
    n: int
    d: int
    depth: int
    qubits: int
    K_U: float
    k_q: float

    def record(self) -> str:
        return (f"n={self.n} d={self.d} depth={self.depth} qubits={self.qubits} "
                f"K_U={self.K_U:g} k_q={self.k_q:.4f}")


def depth_report(t: UniversalTemplate) -> DepthReport:
    depth, q = t.circuit.depth, t.circuit.n_qubits
    if t.d_capacity == 0:
        return DepthReport(t.n, 0, depth, q, 0.0, 0.0)
    return DepthReport(t.n, t.d_capacity, depth, q, depth / t.d_capacity,
                       q / (t.n * t.n * t.d_capacity))


def qubit_count(n: int, d: int, family: str = "F") -> int:
    """Closed form for the template register size."""
    if d == 0:
        return n
    per_group = (2 if normalize_family(family) == "Fprime" else 1) * n * n + 3 * n
    return n + 2 * n * n + n + d * per_group


def scaling_grid(ns, ds, family: str = "F") -> list[DepthReport]:
    return [depth_report(build_universal(n, d, family)) for n, d in product(ns, ds)]
