"""Pure states of N qubits and their reduced density matrices.

Basis order is lexicographic in the ket string: qubit 0 (label ``A``) is
the leftmost character and the most significant bit of the amplitude
index, so ``|1000>`` sits at index 8 for four qubits.
"""
from __future__ import annotations

import string
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

MIN_QUBITS = 2
MAX_QUBITS = 14
NORM_TOL = 1e-12
DENSITY_TOL = 1e-12

PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)


class ValidationError(ValueError):
    """Input violates a state or density-matrix invariant."""


class NullStateError(ValidationError):
    """Amplitude vector has zero norm."""

    def __init__(self, message="null state"):
        super().__init__(message)


def default_labels(n):
    return tuple(string.ascii_uppercase[k] for k in range(n))


@dataclass(frozen=True)
class PureState:
    """Dense amplitude vector over ``n_qubits`` qubits.

    The vector is stored read-only. It need not be normalised (local
    operators produce unnormalised vectors); measure functions insist on
    unit norm via :func:`require_normalized`.
    """

    n_qubits: int
    amplitudes: np.ndarray
    labels: tuple = field(default=())

    def __post_init__(self):
        n = self.n_qubits
        if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
            raise ValidationError(f"n_qubits must be an integer, got {n!r}")
        if not MIN_QUBITS <= n <= MAX_QUBITS:
            raise ValidationError(f"n_qubits must be in [{MIN_QUBITS}, {MAX_QUBITS}], got {n}")
        amps = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.shape[0] != 2 ** n:
            raise ValidationError(f"expected {2 ** n} amplitudes for {n} qubits, got {amps.shape[0]}")
        if not np.all(np.isfinite(amps)):
            raise ValidationError("amplitudes must be finite")
        amps.setflags(write=False)
        object.__setattr__(self, "n_qubits", int(n))
        object.__setattr__(self, "amplitudes", amps)
        labels = tuple(self.labels) if self.labels else default_labels(n)
        if len(labels) != n or len(set(labels)) != n:
            raise ValidationError(f"need {n} distinct labels, got {labels!r}")
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_amplitudes(cls, amplitudes, labels=()):
        amps = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
        n = int(round(np.log2(amps.shape[0]))) if amps.shape[0] else 0
        if amps.shape[0] != 2 ** n:
            raise ValidationError(f"amplitude count {amps.shape[0]} is not a power of two")
        return cls(n, amps, labels)

    @property
    def dim(self):
        return self.amplitudes.shape[0]

    @property
    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    @property
    def is_normalized(self):
        return abs(self.norm ** 2 - 1.0) <= NORM_TOL

    @property
    def tensor(self):
        return self.amplitudes.reshape((2,) * self.n_qubits)

    def qubit_index(self, qubit):
        """Resolve a qubit given by index or label."""
        if isinstance(qubit, str):
            try:
                return self.labels.index(qubit)
            except ValueError:
                raise IndexError(f"no qubit labelled {qubit!r}") from None
        if isinstance(qubit, bool) or not isinstance(qubit, (int, np.integer)):
            raise IndexError(f"qubit must be an index or label, got {qubit!r}")
        if not 0 <= qubit < self.n_qubits:
            raise IndexError(f"qubit index {qubit} out of range for {self.n_qubits} qubits")
        return int(qubit)

    def __eq__(self, other):
        if not isinstance(other, PureState):
            return NotImplemented
        return (
            self.n_qubits == other.n_qubits
            and self.labels == other.labels
            and np.array_equal(self.amplitudes, other.amplitudes)
        )

    def __hash__(self):
        return hash((self.n_qubits, self.labels, self.amplitudes.tobytes()))


@dataclass(frozen=True)
class SubsystemSet:
    """Ordered, duplicate-free qubit indices of one state."""

    indices: tuple

    @classmethod
    def of(cls, state: PureState, qubits: Iterable) -> "SubsystemSet":
        if isinstance(qubits, SubsystemSet):
            qubits = qubits.indices
        if isinstance(qubits, str):
            qubits = [qubits] if qubits in state.labels else list(qubits)
        elif isinstance(qubits, (int, np.integer)):
            qubits = [qubits]
        idx = tuple(state.qubit_index(q) for q in qubits)
        if not idx:
            raise ValidationError("subsystem must be non-empty")
        if len(set(idx)) != len(idx):
            raise ValidationError(f"duplicate qubits in subsystem {idx}")
        return cls(idx)

    def __len__(self):
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)


@dataclass(frozen=True)
class DensityMatrix:
    """Validated density matrix: Hermitian, unit trace, positive semidefinite."""

    entries: np.ndarray

    def __post_init__(self):
        m = np.array(self.entries, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValidationError(f"density matrix must be square, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValidationError("density matrix must be finite")
        if np.abs(m - m.conj().T).max() > DENSITY_TOL:
            raise ValidationError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1.0) > DENSITY_TOL:
            raise ValidationError(f"density matrix trace is {np.trace(m).real:.15g}, not 1")
        if np.linalg.eigvalsh(m).min() < -DENSITY_TOL:
            raise ValidationError("density matrix has a negative eigenvalue")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def dim(self):
        return self.entries.shape[0]

    def purity(self):
        return float(np.sum(np.abs(self.entries) ** 2))


def require_normalized(state: PureState):
    if not state.is_normalized:
        raise ValidationError(f"state is not normalized (norm {state.norm:.15g})")


def normalize(state: PureState) -> PureState:
    norm = state.norm
    if norm == 0.0:
        raise NullStateError()
    return PureState(state.n_qubits, state.amplitudes / norm, state.labels)


def reduced_matrix(state: PureState, keep: Sequence[int]) -> np.ndarray:
    """Partial trace as a raw array; ``keep`` must already be validated indices."""
    keep = list(keep)
    other = [k for k in range(state.n_qubits) if k not in keep]
    m = np.transpose(state.tensor, keep + other).reshape(2 ** len(keep), -1)
    return m @ m.conj().T


def partial_trace(state: PureState, keep) -> DensityMatrix:
    """Reduced density matrix over ``keep``, in the order given.

    ``keep`` may hold indices or labels, e.g. ``[1, 2]`` or ``"BC"``.
    """
    require_normalized(state)
    sub = SubsystemSet.of(state, keep)
    return DensityMatrix(reduced_matrix(state, sub.indices))


def apply_local_operator(state: PureState, op, qubit) -> PureState:
    """Apply a 2x2 operator to one qubit; the result is left unnormalised."""
    q = state.qubit_index(qubit)
    op = np.asarray(op, dtype=np.complex128)
    if op.shape != (2, 2):
        raise ValidationError(f"local operator must be 2x2, got shape {op.shape}")
    t = np.tensordot(op, state.tensor, axes=([1], [q]))
    t = np.moveaxis(t, 0, q)
    return PureState(state.n_qubits, t.reshape(-1), state.labels)


def permute_qubits(state: PureState, order: Sequence[int]) -> PureState:
    """Relabel qubits: new qubit ``k`` is old qubit ``order[k]``."""
    order = [state.qubit_index(q) for q in order]
    if sorted(order) != list(range(state.n_qubits)):
        raise ValidationError(f"{order} is not a permutation of the qubits")
    t = np.transpose(state.tensor, order)
    return PureState(state.n_qubits, t.reshape(-1))


def bloch_vector(rho) -> np.ndarray:
    """Polarisation vector ``(<X>, <Y>, <Z>)`` of a single-qubit state."""
    if not isinstance(rho, DensityMatrix):
        rho = DensityMatrix(rho)
    if rho.dim != 2:
        raise ValidationError(f"Bloch vector needs a 2x2 density matrix, got {rho.dim}x{rho.dim}")
    m = rho.entries
    return np.array([np.trace(m @ p).real for p in (PAULI_X, PAULI_Y, PAULI_Z)])


def _rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _check_n(n_qubits):
    if isinstance(n_qubits, bool) or not isinstance(n_qubits, (int, np.integer)):
        raise ValidationError(f"n_qubits must be an integer, got {n_qubits!r}")
    if not MIN_QUBITS <= n_qubits <= MAX_QUBITS:
        raise ValidationError(f"n_qubits must be in [{MIN_QUBITS}, {MAX_QUBITS}], got {n_qubits}")


def random_amplitudes(n_qubits: int, count: int, seed=None) -> np.ndarray:
    """``(count, 2**n)`` Haar-random unit vectors from complex Gaussians."""
    _check_n(n_qubits)
    rng = _rng(seed)
    z = rng.standard_normal((count, 2 ** n_qubits)) + 1j * rng.standard_normal((count, 2 ** n_qubits))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def random_pure_state(n_qubits: int, seed=None) -> PureState:
    """Haar-random pure state; identical seeds give identical states."""
    return PureState(n_qubits, random_amplitudes(n_qubits, 1, seed)[0])


def random_unitary(dim: int = 2, seed=None) -> np.ndarray:
    """Haar-random unitary via QR of a complex Gaussian matrix with phase fix."""
    rng = _rng(seed)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))
