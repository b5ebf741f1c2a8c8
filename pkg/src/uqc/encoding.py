"""
Classical encodings and the slot maps that explain them.

Encoding file::

    slots 5
    01001

Slot-map file, one line per slot (``-`` marks an unused coordinate)::

    # index group kind i j
    0 0 H 0 -
    1 0 ZF 1 2
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple


class EncodingError(ValueError):
    pass


class Slot(NamedTuple):
    group: int
    kind: str
    i: int = -1
    j: int = -1


@dataclass(frozen=True)
class Encoding:
    bits: tuple[int, ...]

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if any(b not in (0, 1) for b in bits):
            raise EncodingError("encoding bits must be 0 or 1")
        object.__setattr__(self, "bits", bits)

    def __len__(self):
        return len(self.bits)

    def __iter__(self):
        return iter(self.bits)

    def __getitem__(self, k):
        return self.bits[k]

    def flip(self, k: int) -> "Encoding":
        b = list(self.bits)
        b[k] ^= 1
        return Encoding(tuple(b))

    def to_text(self) -> str:
        return f"slots {len(self.bits)}\n{''.join(map(str, self.bits))}\n"

    @classmethod
    def from_text(cls, text: str) -> "Encoding":
        lines = [l.split("#", 1)[0].strip() for l in text.splitlines()]
        lines = [l for l in lines if l]
        if not lines or not lines[0].startswith("slots"):
            raise EncodingError("expected 'slots <m>' header")
        try:
            m = int(lines[0].split()[1])
        except (IndexError, ValueError):
            raise EncodingError("malformed 'slots' header") from None
        body = "".join(lines[1:])
        if len(body) != m or set(body) - {"0", "1"}:
            raise EncodingError(f"expected {m} bits, got {body!r}")
        return cls(tuple(int(c) for c in body))

    @classmethod
    def zeros(cls, m: int) -> "Encoding":
        return cls((0,) * m)


class SlotMap:
    """Ordered slot descriptions; position k describes encoding bit k."""

    def __init__(self, slots: Iterable[Slot]):
        self.slots = tuple(Slot(*s) for s in slots)
        self.index = {s: k for k, s in enumerate(self.slots)}
        if len(self.index) != len(self.slots):
            raise EncodingError("duplicate slot in slot map")

    def __len__(self):
        return len(self.slots)

    def __getitem__(self, k):
        return self.slots[k]

    def __eq__(self, other):
        return isinstance(other, SlotMap) and self.slots == other.slots

    def lookup(self, group, kind, i=-1, j=-1) -> int:
        try:
            return self.index[Slot(group, kind, i, j)]
        except KeyError:
            raise EncodingError(f"no slot {Slot(group, kind, i, j)}") from None

    def encode(self, ones: Iterable[Slot]) -> Encoding:
        bits = [0] * len(self.slots)
        for s in ones:
            bits[self.lookup(*s)] = 1
        return Encoding(tuple(bits))

    def to_text(self) -> str:
        def f(v):
            return "-" if v < 0 else str(v)
        lines = ["# index group kind i j"]
        lines += [f"{k} {s.group} {s.kind} {f(s.i)} {f(s.j)}" for k, s in enumerate(self.slots)]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "SlotMap":
        slots = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].split()
            if not line:
                continue
            if len(line) != 5 or int(line[0]) != len(slots):
                raise EncodingError(f"line {lineno}: malformed slot entry")
            g = lambda v: -1 if v == "-" else int(v)
            slots.append(Slot(int(line[1]), line[2], g(line[3]), g(line[4])))
        return cls(slots)
