"""
Exact statevector simulation and the universal-circuit equivalence oracle.

Qubit i is bit i of the basis index (little-endian). Everything except H is a
signed permutation of basis states, so those gates are applied as index
arithmetic plus an eighth-root-of-unity phase; no gate matrix is ever built.

Two backends share the same kernels:

* ``StateVector``: dense amplitudes, optionally with trailing batch axes.
* ``SparseState``: (basis key, amplitude) pairs. Templates keep data-sized
  superpositions on registers of dozens of qubits, which this handles cheaply.
  Keys may carry tag bits above ``n_qubits`` to run many inputs in one pass.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .circuit import Circuit, CircuitError, Gate

OMEGA = np.array([1, (1 + 1j) / np.sqrt(2), 1j, (-1 + 1j) / np.sqrt(2),
                  -1, (-1 - 1j) / np.sqrt(2), -1j, (1 - 1j) / np.sqrt(2)], dtype=complex)
_SQRT1_2 = 1 / np.sqrt(2)

# single-qubit diagonal gates as a power of T on |1>
T_POWER = {"t": 1, "s": 2, "z": 4, "sdag": 6, "tdag": 7}

MAX_UNITARY_QUBITS = 12
PRUNE = 1e-13


class SimulationError(ValueError):
    pass


class ClassicalityError(SimulationError):
    """An encoding qubit would leave the computational basis."""


def _mask(qubits: Iterable[int]) -> int:
    m = 0
    for q in qubits:
        m |= 1 << q
    return m


def _bit(keys, q: int):
    return (keys >> q) & 1


def _popcount(a):
    if a.dtype == object:
        return np.array([int(k).bit_count() for k in a], dtype=np.int64)
    return np.bitwise_count(a).astype(np.int64)


def basis_action(g: Gate, keys):
    """Apply a non-H gate to basis indices.

    Returns (new_keys, phase_exponent) where the amplitude picks up
    OMEGA[phase_exponent]; phase_exponent is None when the gate is a pure
    permutation.
    """
    k, qs = g.kind, g.qubits
    if k == "x":
        return keys ^ (1 << qs[0]), None
    if k in T_POWER:
        return keys, _bit(keys, qs[0]).astype(np.int64) * T_POWER[k]
    if k in ("cnot", "fanout"):
        tm = _mask(qs[1:])
        return np.where(_bit(keys, qs[0]) == 1, keys ^ tm, keys), None
    if k == "toffoli":
        cm = _mask(qs[:-1])
        return np.where((keys & cm) == cm, keys ^ (1 << qs[-1]), keys), None
    if k == "zfanout":
        tm = _mask(qs[1:])
        par = _popcount(keys & tm) & 1
        return keys, 4 * (_bit(keys, qs[0]).astype(np.int64) * par)
    if k == "gz":
        m = _mask(qs)
        return keys, 4 * ((keys & m) == m).astype(np.int64)
    raise SimulationError(f"no basis action for {k}")


def _phase_array(exps):
    return OMEGA[np.asarray(exps, dtype=np.int64) % 8]


# dense backend

@dataclass(frozen=True)
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex)
        if a.shape[0] != 1 << self.n_qubits:
            raise SimulationError(f"expected {1 << self.n_qubits} amplitudes, got {a.shape[0]}")
        object.__setattr__(self, "amplitudes", a)

    def norm2(self):
        return np.sum(np.abs(self.amplitudes) ** 2, axis=0)


def basis_state(bits: str | Sequence[int]) -> StateVector:
    """``bits[i]`` is the value of qubit i."""
    vals = [int(b) for b in bits]
    if any(v not in (0, 1) for v in vals):
        raise SimulationError(f"not a bitstring: {bits!r}")
    a = np.zeros(1 << len(vals), dtype=complex)
    a[sum(v << i for i, v in enumerate(vals))] = 1
    return StateVector(len(vals), a)


def _dense_apply(a: np.ndarray, n: int, g: Gate) -> np.ndarray:
    if g.kind == "h":
        q = g.qubits[0]
        v = a.reshape((1 << (n - q - 1), 2, 1 << q) + a.shape[1:])
        lo, hi = v[:, 0], v[:, 1]
        out = np.empty_like(v)
        out[:, 0] = (lo + hi) * _SQRT1_2
        out[:, 1] = (lo - hi) * _SQRT1_2
        return out.reshape(a.shape)
    idx = np.arange(1 << n, dtype=np.int64)
    new, ph = basis_action(g, idx)
    if ph is not None:
        a = a * _phase_array(ph).reshape((-1,) + (1,) * (a.ndim - 1))
    if new is idx:
        return a
    out = np.empty_like(a)
    out[new] = a
    return out


def apply_gate(s: StateVector, g: Gate) -> StateVector:
    if g.qubits and max(g.qubits) >= s.n_qubits:
        raise SimulationError(f"{g} outside a {s.n_qubits}-qubit register")
    return StateVector(s.n_qubits, _dense_apply(s.amplitudes, s.n_qubits, g))


def run(c: Circuit, s: StateVector) -> StateVector:
    if c.n_qubits != s.n_qubits:
        raise SimulationError(f"circuit has {c.n_qubits} qubits, state has {s.n_qubits}")
    a = s.amplitudes
    for g in c.gates():
        a = _dense_apply(a, c.n_qubits, g)
    if c.phase:
        a = a * OMEGA[c.phase]
    return StateVector(c.n_qubits, a)


def unitary_of(c: Circuit) -> np.ndarray:
    if c.n_qubits > MAX_UNITARY_QUBITS:
        raise SimulationError(f"unitary_of limited to {MAX_UNITARY_QUBITS} qubits")
    dim = 1 << c.n_qubits
    u = run(c, StateVector(c.n_qubits, np.eye(dim, dtype=complex))).amplitudes
    if not np.allclose(u.conj().T @ u, np.eye(dim), atol=1e-10):
        raise SimulationError("simulated matrix is not unitary")
    return u


# sparse backend

class SparseState:
    """Sparse amplitudes over basis keys; bits >= n_qubits are untouched tags."""

    def __init__(self, n_qubits: int, keys, amps):
        self.n_qubits = n_qubits
        self.keys = keys
        self.amps = np.asarray(amps, dtype=complex)

    @staticmethod
    def key_dtype(total_bits: int):
        return np.int64 if total_bits <= 62 else object

    @classmethod
    def batch(cls, n_qubits: int, columns: Sequence[tuple[Sequence[int], Sequence[complex]]]):
        """One tagged state per column; column b is tagged with b << n_qubits."""
        tag_bits = max(1, (len(columns) - 1).bit_length())
        dt = cls.key_dtype(n_qubits + tag_bits)
        ks, amps = [], []
        for b, (k, a) in enumerate(columns):
            ks.extend(int(x) | (b << n_qubits) for x in k)
            amps.extend(a)
        keys = np.array(ks, dtype=dt) if ks else np.zeros(0, dtype=dt)
        return cls(n_qubits, keys, amps)

    def copy(self):
        return SparseState(self.n_qubits, self.keys.copy(), self.amps.copy())

    def apply(self, g: Gate):
        if g.kind == "h":
            self._hadamard(g.qubits[0])
            return
        new, ph = basis_action(g, self.keys)
        if ph is not None:
            self.amps = self.amps * _phase_array(ph)
        self.keys = new

    def _hadamard(self, q: int):
        m = 1 << q
        b = _bit(self.keys, q)
        k0 = self.keys & ~m
        keys = np.concatenate([k0, k0 | m])
        sign = np.where(b == 1, -1.0, 1.0)
        amps = np.concatenate([self.amps, self.amps * sign]) * _SQRT1_2
        self.keys, self.amps = _merge(keys, amps)

    def run(self, c: Circuit):
        if c.n_qubits > self.n_qubits:
            raise SimulationError("circuit wider than state")
        for g in c.gates():
            self.apply(g)
        if c.phase:
            self.amps = self.amps * OMEGA[c.phase]
        return self

    def split(self, n_columns: int) -> list[dict[int, complex]]:
        out: list[dict[int, complex]] = [dict() for _ in range(n_columns)]
        low = (1 << self.n_qubits) - 1
        for k, a in zip(self.keys.tolist(), self.amps.tolist()):
            out[k >> self.n_qubits][k & low] = a
        return out


def _merge(keys, amps):
    uniq, inv = np.unique(keys, return_inverse=True)
    re = np.bincount(inv, weights=amps.real, minlength=len(uniq))
    im = np.bincount(inv, weights=amps.imag, minlength=len(uniq))
    summed = re + 1j * im
    keep = np.abs(summed) > PRUNE
    return uniq[keep], summed[keep]


def run_sparse(c: Circuit, columns: Sequence[tuple[Sequence[int], Sequence[complex]]]):
    """Run every input column through ``c``; returns one {key: amp} dict per column."""
    st = SparseState.batch(c.n_qubits, columns).run(c)
    return st.split(len(columns))


# register layouts, classical specialization, verification

@dataclass(frozen=True)
class RegisterLayout:
    data: tuple[int, ...]
    encoding: tuple[int, ...]
    ancilla: tuple[int, ...]

    def __post_init__(self):
        for name in ("data", "encoding", "ancilla"):
            object.__setattr__(self, name, tuple(int(q) for q in getattr(self, name)))
        everything = self.data + self.encoding + self.ancilla
        if len(set(everything)) != len(everything):
            raise SimulationError("register layout sets overlap")
        if sorted(everything) != list(range(len(everything))):
            raise SimulationError("register layout does not cover 0..n-1")
        if self.data != tuple(range(len(self.data))):
            raise SimulationError("data qubits must be the leading register indices")

    @property
    def n_qubits(self) -> int:
        return len(self.data) + len(self.encoding) + len(self.ancilla)

    @property
    def n_data(self) -> int:
        return len(self.data)

    def to_dict(self):
        return {"data": list(self.data), "encoding": list(self.encoding),
                "ancilla": list(self.ancilla)}

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(d["data"]), tuple(d["encoding"]), tuple(d["ancilla"]))


def _classical_specialize(c: Circuit, layout: RegisterLayout, x: Sequence[int]):
    """Fold the encoding register into the circuit.

    Returns (specialized circuit on data+ancilla, final encoding bits).
    """
    if len(x) != len(layout.encoding):
        raise SimulationError(f"encoding has {len(x)} bits, layout has {len(layout.encoding)} slots")
    val = {q: int(b) for q, b in zip(layout.encoding, x)}
    kept = sorted(layout.data + layout.ancilla)
    new = {q: i for i, q in enumerate(kept)}
    phase = c.phase
    out: list[Gate] = []

    def emit(kind, qs):
        out.append(Gate(kind, tuple(new[q] for q in qs)))

    for g in c.gates():
        enc = [q for q in g.qubits if q in val]
        if not enc:
            out.append(g.remap(new))
            continue
        quant = [q for q in g.qubits if q not in val]
        k, qs = g.kind, g.qubits
        if not quant:
            # gate purely on the classical register: permute bits, collect phase
            key = sum(val[q] << i for i, q in enumerate(qs))
            local = Gate(k, tuple(range(len(qs))))
            if k == "h":
                raise ClassicalityError(f"{g}: Hadamard on an encoding qubit")
            nk, ph = basis_action(local, np.array([key], dtype=np.int64))
            for i, q in enumerate(qs):
                val[q] = (int(nk[0]) >> i) & 1
            if ph is not None:
                phase += int(ph[0])
            continue
        if k in ("cnot", "fanout"):
            if qs[0] not in val:
                raise ClassicalityError(f"{g}: encoding qubit used as a target of a quantum control")
            if val[qs[0]]:
                for q in qs[1:]:
                    if q in val:
                        val[q] ^= 1
                    else:
                        emit("x", [q])
        elif k == "toffoli":
            if qs[-1] in val:
                raise ClassicalityError(f"{g}: encoding qubit used as a Toffoli target")
            if all(val[q] for q in enc):
                rest = [q for q in qs[:-1] if q not in val]
                if not rest:
                    emit("x", [qs[-1]])
                elif len(rest) == 1:
                    emit("cnot", [rest[0], qs[-1]])
                else:
                    emit("toffoli", rest + [qs[-1]])
        elif k == "zfanout":
            if qs[0] in val:
                if val[qs[0]]:
                    for q in qs[1:]:
                        if q in val:
                            phase += 4 * val[q]
                        else:
                            emit("z", [q])
            else:
                flips = sum(val[q] for q in enc) & 1
                rest = [q for q in qs[1:] if q not in val]
                if rest:
                    emit("zfanout", [qs[0]] + rest)
                if flips:
                    emit("z", [qs[0]])
        elif k == "gz":
            if all(val[q] for q in enc):
                emit("gz", quant)
        else:
            raise ClassicalityError(f"{g}: cannot fold encoding qubits through {k}")
    spec = Circuit.from_gates(len(kept), out, phase=phase)
    final = [val[q] for q in layout.encoding]
    return spec, final


def specialize_classical(c: Circuit, layout: RegisterLayout, x: Sequence[int]) -> Circuit:
    """Replace every encoding-controlled gate by its fixed classical outcome.

    The returned circuit acts on the data and ancilla qubits only, renumbered
    in ascending register order (data first). Classical phase contributions
    are kept in ``Circuit.phase``. Raises ClassicalityError if an encoding
    qubit would be put into superposition.
    """
    return _classical_specialize(c, layout, x)[0]


@dataclass(frozen=True)
class EquivalenceReport:
    mode: str
    trials: int
    max_component_error: float
    tolerance: float
    passed: bool
    encoding_restored: bool = True

    @property
    def pass_(self) -> bool:
        return self.passed

    def record(self) -> str:
        return (f"mode={self.mode} trials={self.trials} "
                f"max_component_error={self.max_component_error:.3e} "
                f"tolerance={self.tolerance:.1e} encoding_restored={int(self.encoding_restored)} "
                f"pass={int(self.passed)}")

    def summary(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return (f"{verdict}: {self.trials} {self.mode} input(s), worst amplitude error "
                f"{self.max_component_error:.3g} (tolerance {self.tolerance:g})")


def random_superpositions(n: int, trials: int, rng: np.random.Generator) -> np.ndarray:
    """Columns of normalized complex Gaussian vectors, shape (2**n, trials)."""
    v = rng.normal(size=(1 << n, trials)) + 1j * rng.normal(size=(1 << n, trials))
    return v / np.linalg.norm(v, axis=0)


def verify_encoding(template: Circuit, layout: RegisterLayout, x: Sequence[int], c_ref: Circuit,
                    mode: str = "all-basis", trials: int = 0, seed: int = 0,
                    tolerance: float = 1e-9, specialize: bool = True) -> EquivalenceReport:
    """Check U(|y, 0..0, x>) == C|y> (x) |0..0, x> component by component.

    ``all-basis`` checks every data basis state. ``random`` additionally runs
    ``trials`` seeded random superpositions. Global phase is not discarded.
    With ``specialize=False`` the encoding register is simulated as qubits
    instead of being folded in classically.
    """
    n = layout.n_data
    if c_ref.n_qubits != n:
        raise SimulationError(f"reference circuit has {c_ref.n_qubits} qubits, template has {n} data qubits")
    if template.n_qubits != layout.n_qubits:
        raise SimulationError("template and layout disagree on register size")
    if mode not in ("all-basis", "random"):
        raise SimulationError(f"unknown verification mode {mode!r}")
    dim = 1 << n
    inputs = np.eye(dim, dtype=complex)
    if mode == "random" and trials > 0:
        inputs = np.hstack([inputs, random_superpositions(n, trials, np.random.default_rng(seed))])
    expected = run(c_ref, StateVector(n, inputs)).amplitudes

    if specialize:
        circ, final = _classical_specialize(template, layout, x)
        restored = list(final) == [int(b) for b in x]
        width = circ.n_qubits
        offset = 0
    else:
        circ = template
        restored = True
        width = template.n_qubits
        offset = sum(int(b) << q for q, b in zip(layout.encoding, x))

    cols = []
    for j in range(inputs.shape[1]):
        nz = np.nonzero(inputs[:, j])[0]
        cols.append(([int(y) | offset for y in nz], inputs[nz, j]))
    outs = run_sparse(circ, cols)

    worst = 0.0
    for j, out in enumerate(outs):
        got = np.zeros(dim, dtype=complex)
        stray = 0.0
        for key, amp in out.items():
            if key & ~(dim - 1) == offset:
                got[key & (dim - 1)] = amp
            else:
                stray = max(stray, abs(amp))
        if not restored:
            # output lives entirely on a different encoding value
            stray = max(stray, float(np.max(np.abs(got))) if dim else 0.0)
            got[:] = 0
        worst = max(worst, stray, float(np.max(np.abs(got - expected[:, j]))))
    return EquivalenceReport(mode, inputs.shape[1], worst, tolerance,
                             worst <= tolerance and restored, restored)
