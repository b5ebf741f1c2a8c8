"""Seeded random circuit generators used by tests, demos and the CLI."""
from __future__ import annotations

import numpy as np

from .circuit import Circuit, Gate, Layer, normalize_family

SUGAR = ("tdag", "s", "sdag", "x", "z")


def random_family_circuit(n: int, d: int, family: str, rng: np.random.Generator,
                          sugar: bool = False) -> Circuit:
    """Exactly d layers; each layer packs random gates over a shuffled qubit list.

    Over F the gates are H, T and Fanout (any width); F' adds Toffoli (any
    width). Idle qubits are allowed, so layers may be sparse or empty.
    """
    family = normalize_family(family)
    layers = []
    for _ in range(d):
        free = [int(q) for q in rng.permutation(n)]
        gates = []
        while free:
            r = rng.random()
            if r < 0.3 and len(free) >= 2:
                k = int(rng.integers(2, len(free) + 1))
                gates.append(Gate("fanout", tuple(free.pop() for _ in range(k))))
            elif r < 0.45 and family == "Fprime" and len(free) >= 3:
                k = int(rng.integers(3, len(free) + 1))
                gates.append(Gate("toffoli", tuple(free.pop() for _ in range(k))))
            elif r < 0.65:
                gates.append(Gate("h", (free.pop(),)))
            elif r < 0.85:
                kind = str(rng.choice(SUGAR)) if sugar and rng.random() < 0.5 else "t"
                gates.append(Gate(kind, (free.pop(),)))
            else:
                free.pop()
        layers.append(Layer(tuple(gates)))
    return Circuit(n, tuple(layers), family)


def random_palette_circuit(n: int, c: int, rng: np.random.Generator,
                           palette=("h", "t", "cnot")) -> Circuit:
    """c gates drawn uniformly from the palette, on random qubits."""
    singles = [k for k in palette if k != "cnot"]
    gates = []
    for _ in range(c):
        use_cnot = "cnot" in palette and n >= 2 and (not singles or rng.random() < 0.4)
        if use_cnot:
            a, b = rng.choice(n, 2, replace=False)
            gates.append(Gate("cnot", (int(a), int(b))))
        else:
            gates.append(Gate(str(rng.choice(singles)), (int(rng.integers(n)),)))
    return Circuit.from_gates(n, gates)
