"""Scalar correlation measures of pure qubit states.

Everything is built from two arrays produced by the kernel backend: the
per-qubit linear entropies ``tau[k] = 2 (1 - tr rho_k^2)`` and the
symmetric matrix of squared pairwise concurrences ``c2[i, j]``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from multicorr import _backend
from multicorr.state import (
    DensityMatrix,
    PureState,
    ValidationError,
    bloch_vector,
    reduced_matrix,
    require_normalized,
)

QCR_TOL = 1e-10


class ConsistencyError(RuntimeError):
    """Two independent routes to the same quantity disagree."""


def _as_density(rho, dim):
    if not isinstance(rho, DensityMatrix):
        rho = DensityMatrix(rho)
    if rho.dim != dim:
        raise ValidationError(f"expected a {dim}x{dim} density matrix, got {rho.dim}x{rho.dim}")
    return rho


def linear_entropy(rho) -> float:
    """``2 (1 - tr rho^2)`` of a single-qubit density matrix, in [0, 1]."""
    rho = _as_density(rho, 2)
    return 2.0 * (1.0 - rho.purity())


def concurrence(rho) -> float:
    """Wootters concurrence of a two-qubit density matrix."""
    rho = _as_density(rho, 4)
    return _backend.concurrence_batch(rho.entries)


def correlations(state: PureState):
    """``(tau, c2)`` for a single normalised state."""
    require_normalized(state)
    tau, c2 = _backend.correlation_core(state.amplitudes[None, :], state.n_qubits)
    return tau[0], c2[0]


def tangle3_pure(state: PureState, pivot=0) -> float:
    """Three-tangle ``tau_pivot - sum of C^2 between the pivot and the others``."""
    if state.n_qubits != 3:
        raise ValidationError(f"3-tangle needs exactly 3 qubits, got {state.n_qubits}")
    k = state.qubit_index(pivot)
    tau, c2 = correlations(state)
    return float(tau[k] - c2[k].sum())


def residual_correlation(state: PureState, k) -> float:
    """``M_k = tau_k - sum_l C_kl^2``, the multipartite remainder around qubit k."""
    q = state.qubit_index(k)
    tau, c2 = correlations(state)
    return float(tau[q] - c2[q].sum())


def residual_sum_n(state: PureState):
    """``(M_N, M_N / N)`` with ``M_N = sum_k tau_k - 2 sum_{i>j} C_ij^2``."""
    tau, c2 = correlations(state)
    m = float(tau.sum() - 2.0 * np.triu(c2, 1).sum())
    return m, m / state.n_qubits


@dataclass(frozen=True)
class MeasureReport:
    labels: tuple
    tau: np.ndarray
    s2: np.ndarray
    c2: np.ndarray
    m_k: np.ndarray
    m_total: float
    e_ms: float

    @property
    def qcr_residuals(self):
        """``tau_k + S_k^2 - 1`` per qubit; zero up to rounding for pure states."""
        return self.tau + self.s2 - 1.0

    def to_dict(self):
        n = len(self.labels)
        return {
            "labels": list(self.labels),
            "tau": dict(zip(self.labels, self.tau.tolist())),
            "s2": dict(zip(self.labels, self.s2.tolist())),
            "c2": {
                self.labels[i] + self.labels[j]: float(self.c2[i, j])
                for i in range(n)
                for j in range(i + 1, n)
            },
            "m_k": dict(zip(self.labels, self.m_k.tolist())),
            "m_total": self.m_total,
            "e_ms": self.e_ms,
            "qcr_residuals": dict(zip(self.labels, self.qcr_residuals.tolist())),
        }


def measure_report(state: PureState) -> MeasureReport:
    """All per-state scalars in one record.

    ``S_k^2`` is taken from the Bloch vector of each marginal and checked
    against ``1 - tau_k``; disagreement beyond 1e-10 raises
    :class:`ConsistencyError`.
    """
    tau, c2 = correlations(state)
    s2 = np.array(
        [float(np.sum(bloch_vector(reduced_matrix(state, [k])) ** 2)) for k in range(state.n_qubits)]
    )
    worst = np.abs(tau + s2 - 1.0).max()
    if worst > QCR_TOL:
        raise ConsistencyError(f"tau + S^2 deviates from 1 by {worst:.3g}")
    m_k = tau - c2.sum(axis=1)
    m_total = float(m_k.sum())
    for arr in (tau, s2, c2, m_k):
        arr.setflags(write=False)
    return MeasureReport(
        labels=state.labels,
        tau=tau,
        s2=s2,
        c2=c2,
        m_k=m_k,
        m_total=m_total,
        e_ms=m_total / state.n_qubits,
    )


class Measure:
    """A scalar functional of pure states, evaluable one state or a batch at a time.

    ``from_correlations`` maps ``tau (batch, n)`` and ``c2 (batch, n, n)``
    to a ``(batch,)`` array. Any plain callable ``PureState -> float``
    works wherever a measure is expected; this class only adds the batch
    path used by grid scans.
    """

    def __init__(self, name: str, from_correlations: Callable):
        self.name = name
        self.from_correlations = from_correlations

    def __call__(self, state: PureState) -> float:
        require_normalized(state)
        return float(self.batch(state.amplitudes[None, :], state.n_qubits)[0])

    def batch(self, amplitudes, n_qubits):
        tau, c2 = _backend.correlation_core(amplitudes, n_qubits)
        return self.from_correlations(tau, c2)

    def __repr__(self):
        return f"Measure({self.name!r})"


def _residuals(tau, c2):
    return tau - c2.sum(axis=2)


def residual_measure(k: int) -> Measure:
    return Measure(f"M_{k}", lambda tau, c2: _residuals(tau, c2)[:, k])


TOTAL_RESIDUAL = Measure("M", lambda tau, c2: _residuals(tau, c2).sum(axis=1))
AVERAGE_RESIDUAL = Measure("ems", lambda tau, c2: _residuals(tau, c2).sum(axis=1) / tau.shape[1])


def xi_measures(pivot: int = 0):
    """Split of ``M`` around ``pivot`` into three additive pieces.

    ``xi1`` is the pivot's residual, ``xi2`` collects the other qubits'
    entropies minus twice their mutual squared concurrences, and ``xi3``
    is minus the pivot's squared concurrences. ``xi1 + xi2 + xi3 = M``.
    """

    def xi1(tau, c2):
        return tau[:, pivot] - c2[:, pivot].sum(axis=1)

    def xi2(tau, c2):
        rest = [k for k in range(tau.shape[1]) if k != pivot]
        sub = c2[:, rest][:, :, rest]
        return tau[:, rest].sum(axis=1) - sub.sum(axis=(1, 2))

    def xi3(tau, c2):
        return -c2[:, pivot].sum(axis=1)

    return Measure("xi1", xi1), Measure("xi2", xi2), Measure("xi3", xi3)
