"""Independent reference matrices built straight from the gate definitions.

Nothing here imports the simulator: every matrix is assembled by looping
over basis states, so it can serve as an oracle for the simulator and for
the gadgets.
"""
from __future__ import annotations

import numpy as np

W = np.exp(1j * np.pi / 4)
PHASE = {"t": W, "tdag": W.conjugate(), "s": 1j, "sdag": -1j, "z": -1}


def bits(k: int, n: int) -> list[int]:
    return [(k >> i) & 1 for i in range(n)]


def index(b) -> int:
    return sum(v << i for i, v in enumerate(b))


def gate_matrix(kind: str, qubits, n: int) -> np.ndarray:
    dim = 1 << n
    U = np.zeros((dim, dim), dtype=complex)
    qs = list(qubits)
    for k in range(dim):
        b = bits(k, n)
        if kind == "h":
            q = qs[0]
            for v in (0, 1):
                out = list(b)
                out[q] = v
                U[index(out), k] += (-1) ** (b[q] * v) / np.sqrt(2)
            continue
        out, amp = list(b), 1.0 + 0j
        if kind in PHASE:
            amp = PHASE[kind] if b[qs[0]] else 1
        elif kind == "x":
            out[qs[0]] ^= 1
        elif kind in ("cnot", "fanout"):
            for t in qs[1:]:
                out[t] ^= b[qs[0]]
        elif kind == "toffoli":
            out[qs[-1]] ^= int(all(b[q] for q in qs[:-1]))
        elif kind == "zfanout":
            amp = (-1) ** (b[qs[0]] * sum(b[t] for t in qs[1:]))
        elif kind == "gz":
            amp = (-1) ** int(all(b[q] for q in qs))
        else:
            raise ValueError(kind)
        U[index(out), k] = amp
    return U


def circuit_matrix(gates, n: int) -> np.ndarray:
    U = np.eye(1 << n, dtype=complex)
    for kind, qs in gates:
        U = gate_matrix(kind, qs, n) @ U
    return U


def controlled(V: np.ndarray) -> np.ndarray:
    """Controlled-V with the control as qubit 0 (little-endian), V on qubit 1."""
    U = np.eye(4, dtype=complex)
    # indices with qubit 0 set: 1 (target 0) and 3 (target 1)
    U[np.ix_([1, 3], [1, 3])] = V
    return U


SINGLE = {
    "h": np.array([[1, 1], [1, -1]]) / np.sqrt(2),
    "t": np.diag([1, W]),
    "tdag": np.diag([1, W.conjugate()]),
    "s": np.diag([1, 1j]),
    "sdag": np.diag([1, -1j]),
    "x": np.array([[0, 1], [1, 0]]),
    "z": np.diag([1, -1]),
}


def restrict_to_clean(U: np.ndarray, n_main: int, n_total: int) -> np.ndarray:
    """Block of U on inputs and outputs whose qubits >= n_main are all zero."""
    keep = [k for k in range(1 << n_total) if k >> n_main == 0]
    return U[np.ix_(keep, keep)]


def leak(U: np.ndarray, n_main: int, n_total: int) -> float:
    """Largest amplitude that clean inputs send outside the clean subspace."""
    keep = [k for k in range(1 << n_total) if k >> n_main == 0]
    dirty = [k for k in range(1 << n_total) if k >> n_main != 0]
    if not dirty:
        return 0.0
    return float(np.max(np.abs(U[np.ix_(dirty, keep)])))


def zfanout_block_phase(d, c) -> int:
    """Sign of the Z-fanout block group on data d with slot matrix c."""
    n = len(d)
    e = sum(d[i] * c[i][i] * sum(d[j] * c[i][j] for j in range(n) if j != i) for i in range(n))
    return (-1) ** e


def z_block_phase(d, c) -> int:
    """Sign of the generalized-Z block group; contact j of block i reads b_ij = d_j."""
    n = len(d)
    e = 0
    for i in range(n):
        prod = 1
        for j in range(n):
            if c[i][j]:
                prod *= d[j]
        e += (1 - c[i][i]) + prod
    return (-1) ** e


def block_group_action(circ, layout, slots, d, c):
    """Run a block-group circuit on |d>|0>|c> and return the output {key: amp}.

    ``slots`` lists the (i, j) coordinate of each encoding qubit in order.
    Uses only the circuit's gate list and the basis definitions above.
    """
    key = sum(v << q for q, v in enumerate(d))
    for q, s in zip(layout.encoding, slots):
        key |= c[s.i][s.j] << q
    state = {key: 1.0 + 0j}
    for g in circ.gates():
        state = _apply_basis(state, g.kind, g.qubits)
    return {k: v for k, v in state.items() if abs(v) > 1e-12}


def _apply_basis(state, kind, qs):
    out: dict[int, complex] = {}
    for k, amp in state.items():
        b = lambda q: (k >> q) & 1
        if kind == "h":
            q = qs[0]
            for v in (0, 1):
                k2 = (k & ~(1 << q)) | (v << q)
                out[k2] = out.get(k2, 0) + amp * (-1) ** (b(q) * v) / np.sqrt(2)
            continue
        k2, a2 = k, amp
        if kind in PHASE:
            a2 = amp * (PHASE[kind] if b(qs[0]) else 1)
        elif kind == "x":
            k2 = k ^ (1 << qs[0])
        elif kind in ("cnot", "fanout"):
            if b(qs[0]):
                for t in qs[1:]:
                    k2 ^= 1 << t
        elif kind == "toffoli":
            if all(b(q) for q in qs[:-1]):
                k2 ^= 1 << qs[-1]
        elif kind == "zfanout":
            a2 = amp * (-1) ** (b(qs[0]) * sum(b(t) for t in qs[1:]))
        elif kind == "gz":
            a2 = amp * (-1) ** int(all(b(q) for q in qs))
        else:
            raise ValueError(kind)
        out[k2] = out.get(k2, 0) + a2
    return out
