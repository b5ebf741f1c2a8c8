"""
Layered circuit IR and the grid text format.

A circuit is an ordered list of layers; each layer is a set of gates acting on
pairwise disjoint qubits. Qubit lists follow the gate definitions: controls
first, then targets.

    fanout   c t1 .. tn     |c, t_i>        -> |c, c ^ t_i>
    zfanout  c t1 .. tn     |c, t_i>        -> (-1)^(c * sum t_i) |c, t_i>
    toffoli  c1 .. cn t     |c_i, t>        -> |c_i, t ^ AND c_i>
    gz       x1 .. xn       |x>             -> (-1)^(x1 * .. * xn) |x>

Grid format::

    qubits 3
    layer
    h 0
    h 1
    layer
    cnot 0 1

``family`` and ``phase`` directives may appear between the header and the
first ``layer``. ``phase k`` is a global factor exp(i*pi*k/4).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

SINGLE_QUBIT = frozenset({"h", "t", "tdag", "s", "sdag", "x", "z"})
MULTI_QUBIT = frozenset({"cnot", "toffoli", "fanout", "zfanout", "gz"})
KINDS = SINGLE_QUBIT | MULTI_QUBIT

# kinds a family admits; everything but toffoli/gz is expressible over F
FAMILIES = {
    "F": frozenset({"h", "t", "fanout", "tdag", "s", "sdag", "x", "z", "cnot", "zfanout"}),
    "Fprime": frozenset({"h", "t", "fanout", "tdag", "s", "sdag", "x", "z", "cnot",
                         "zfanout", "toffoli", "gz"}),
}
# strict members, with no sugar
FAMILY_BASIS = {
    "F": frozenset({"h", "t", "fanout"}),
    "Fprime": frozenset({"h", "t", "fanout", "toffoli"}),
}

_INVERSE = {"t": "tdag", "tdag": "t", "s": "sdag", "sdag": "s"}


class CircuitError(ValueError):
    pass


class FamilyError(CircuitError):
    pass


class GridFormatError(CircuitError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


def normalize_family(family: str | None) -> str | None:
    if family is None:
        return None
    key = family.strip().lower().replace("'", "prime").replace("′", "prime")
    if key == "f":
        return "F"
    if key in ("fprime", "f-prime"):
        return "Fprime"
    raise FamilyError(f"unknown gate family {family!r}")


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        k, qs = self.kind, self.qubits
        if k not in KINDS:
            raise CircuitError(f"unknown gate kind {k!r}")
        if len(set(qs)) != len(qs):
            raise CircuitError(f"{k}: repeated qubit in {qs}")
        if any(q < 0 for q in qs):
            raise CircuitError(f"{k}: negative qubit index in {qs}")
        if k in SINGLE_QUBIT and len(qs) != 1:
            raise CircuitError(f"{k} acts on exactly one qubit, got {len(qs)}")
        if k == "cnot" and len(qs) != 2:
            raise CircuitError("cnot acts on exactly two qubits")
        if k in ("fanout", "zfanout") and len(qs) < 2:
            raise CircuitError(f"{k} needs a control and at least one target")
        if k == "toffoli" and len(qs) < 3:
            raise CircuitError("toffoli needs at least two controls and a target")
        if k == "gz" and len(qs) < 1:
            raise CircuitError("gz needs at least one qubit")

    @property
    def width(self) -> int:
        """Subscript width: n for Fanout_n / ZFanout_n / Toffoli_n, qubit count for gz."""
        if self.kind in ("fanout", "zfanout", "toffoli", "cnot"):
            return len(self.qubits) - 1
        return len(self.qubits)

    @property
    def controls(self) -> tuple[int, ...]:
        if self.kind in ("fanout", "zfanout", "cnot"):
            return self.qubits[:1]
        if self.kind == "toffoli":
            return self.qubits[:-1]
        return ()

    @property
    def targets(self) -> tuple[int, ...]:
        if self.kind in ("fanout", "zfanout", "cnot"):
            return self.qubits[1:]
        if self.kind == "toffoli":
            return self.qubits[-1:]
        return self.qubits

    @property
    def is_diagonal(self) -> bool:
        return self.kind in ("t", "tdag", "s", "sdag", "z", "zfanout", "gz")

    def inverse(self) -> "Gate":
        return Gate(_INVERSE.get(self.kind, self.kind), self.qubits)

    def remap(self, mapping) -> "Gate":
        return Gate(self.kind, tuple(mapping[q] for q in self.qubits))

    def __str__(self):
        return " ".join([self.kind, *map(str, self.qubits)])


@dataclass(frozen=True)
class Layer:
    gates: tuple[Gate, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        seen: set[int] = set()
        for g in self.gates:
            clash = seen.intersection(g.qubits)
            if clash:
                raise CircuitError(f"qubit {min(clash)} used twice in one layer")
            seen.update(g.qubits)

    @property
    def qubits(self) -> set[int]:
        return {q for g in self.gates for q in g.qubits}

    def __iter__(self) -> Iterator[Gate]:
        return iter(self.gates)

    def __len__(self):
        return len(self.gates)


@dataclass(frozen=True)
class CircuitMetrics:
    depth: int
    size: int
    width: int


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    layers: tuple[Layer, ...] = ()
    family: str | None = None
    phase: int = 0

    def __post_init__(self):
        layers = tuple(l if isinstance(l, Layer) else Layer(tuple(l)) for l in self.layers)
        object.__setattr__(self, "layers", layers)
        object.__setattr__(self, "family", normalize_family(self.family))
        object.__setattr__(self, "phase", int(self.phase) % 8)
        if self.n_qubits < 0:
            raise CircuitError("negative qubit count")
        allowed = FAMILIES[self.family] if self.family else KINDS
        for layer in layers:
            for g in layer:
                if max(g.qubits) >= self.n_qubits:
                    raise CircuitError(f"{g}: qubit index out of range for {self.n_qubits} qubits")
                if g.kind not in allowed:
                    raise FamilyError(f"{g.kind} is not in gate family {self.family}")

    # construction helpers

    @classmethod
    def from_gates(cls, n_qubits: int, gates: Iterable[Gate], **kw) -> "Circuit":
        """Layer a gate sequence as-soon-as-possible, preserving per-qubit order."""
        front = [0] * n_qubits
        slots: list[list[Gate]] = []
        for g in gates:
            at = max((front[q] for q in g.qubits), default=0)
            if at == len(slots):
                slots.append([])
            slots[at].append(g)
            for q in g.qubits:
                front[q] = at + 1
        return cls(n_qubits, tuple(Layer(tuple(s)) for s in slots), **kw)

    def gates(self) -> Iterator[Gate]:
        for layer in self.layers:
            yield from layer

    def then(self, other: "Circuit") -> "Circuit":
        if other.n_qubits != self.n_qubits:
            raise CircuitError("qubit count mismatch")
        return Circuit(self.n_qubits, self.layers + other.layers, self.family,
                       self.phase + other.phase)

    def inverse(self) -> "Circuit":
        layers = tuple(Layer(tuple(g.inverse() for g in l)) for l in reversed(self.layers))
        return Circuit(self.n_qubits, layers, self.family, -self.phase)

    def remap(self, mapping: Sequence[int] | dict, n_qubits: int) -> "Circuit":
        layers = tuple(Layer(tuple(g.remap(mapping) for g in l)) for l in self.layers)
        return Circuit(n_qubits, layers, self.family, self.phase)

    def with_family(self, family: str | None) -> "Circuit":
        return Circuit(self.n_qubits, self.layers, family, self.phase)

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def size(self) -> int:
        return sum(len(l) for l in self.layers)


def parallel(n_qubits: int, parts: Iterable[Circuit]) -> Circuit:
    """Run circuits side by side, aligning their layers from the left."""
    parts = list(parts)
    depth = max((p.depth for p in parts), default=0)
    layers = []
    for k in range(depth):
        gs = []
        for p in parts:
            if k < p.depth:
                gs.extend(p.layers[k].gates)
        layers.append(Layer(tuple(gs)))
    return Circuit(n_qubits, tuple(layers), phase=sum(p.phase for p in parts))


def sequence(n_qubits: int, parts: Iterable[Circuit]) -> Circuit:
    out = Circuit(n_qubits)
    for p in parts:
        out = out.then(p)
    return out


def metrics(c: Circuit) -> CircuitMetrics:
    return CircuitMetrics(depth=c.depth, size=c.size, width=c.n_qubits)


# grid format

def parse_circuit(text: str) -> Circuit:
    n = None
    family = None
    phase = 0
    layers: list[list[Gate]] = []
    used: list[set[int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        toks = line.split()
        if not toks:
            continue
        col = len(line) - len(line.lstrip()) + 1
        head = toks[0].lower()
        if n is None:
            if head != "qubits" or len(toks) != 2:
                raise GridFormatError("expected header 'qubits <N>'", lineno, col)
            n = _int(toks[1], lineno, line)
            continue
        if head == "family" and not layers:
            if len(toks) != 2:
                raise GridFormatError("expected 'family <f|fprime>'", lineno, col)
            try:
                family = normalize_family(toks[1])
            except FamilyError as e:
                raise GridFormatError(str(e), lineno, col) from None
            continue
        if head == "phase" and not layers:
            if len(toks) != 2:
                raise GridFormatError("expected 'phase <k>'", lineno, col)
            phase = _int(toks[1], lineno, line)
            continue
        if head == "layer":
            if len(toks) != 1:
                raise GridFormatError("'layer' takes no arguments", lineno, col)
            layers.append([])
            used.append(set())
            continue
        if not layers:
            raise GridFormatError(f"gate {head!r} before first 'layer'", lineno, col)
        if head not in KINDS:
            raise GridFormatError(f"unknown gate kind {head!r}", lineno, col)
        qs = [_int(t, lineno, line) for t in toks[1:]]
        for t, q in zip(toks[1:], qs):
            qcol = _column(line, t)
            if q >= n:
                raise GridFormatError(f"qubit index {q} out of range for {n} qubits", lineno, qcol)
            if q in used[-1]:
                raise GridFormatError(f"qubit {q} used twice in one layer", lineno, qcol)
        try:
            g = Gate(head, tuple(qs))
        except CircuitError as e:
            raise GridFormatError(str(e), lineno, col) from None
        used[-1].update(qs)
        layers[-1].append(g)
    if n is None:
        raise GridFormatError("missing 'qubits <N>' header", 1)
    try:
        return Circuit(n, tuple(Layer(tuple(l)) for l in layers), family, phase)
    except CircuitError as e:
        raise GridFormatError(str(e), 1) from None


def _int(tok: str, lineno: int, line: str) -> int:
    if not tok.isdigit():
        raise GridFormatError(f"expected a non-negative integer, got {tok!r}", lineno,
                              _column(line, tok))
    return int(tok)


def _column(line: str, tok: str) -> int:
    return line.find(tok) + 1


def serialize_circuit(c: Circuit) -> str:
    out = [f"qubits {c.n_qubits}"]
    if c.family:
        out.append(f"family {c.family.lower()}")
    if c.phase:
        out.append(f"phase {c.phase}")
    for layer in c.layers:
        out.append("layer")
        out.extend(str(g) for g in layer)
    return "\n".join(out) + "\n"
