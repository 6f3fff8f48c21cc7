"""Local two-outcome POVMs and monotonicity tests of correlation measures.

A two-outcome POVM on one qubit is ``A1 = U1 diag(alpha, beta) V`` and
``A2 = U2 diag(sqrt(1 - alpha^2), sqrt(1 - beta^2)) V``. For local-unitary
invariant measures only the diagonal core matters, which is what the grid
scans sweep.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from multicorr.measures import TOTAL_RESIDUAL, residual_measure, xi_measures
from multicorr.state import (
    PureState,
    ValidationError,
    apply_local_operator,
    require_normalized,
)

ZERO_PROBABILITY = 1e-14
COMPLETENESS_TOL = 1e-12


def _check_unitary(u, name):
    if u is None:
        return None
    u = np.asarray(u, dtype=np.complex128)
    if u.shape != (2, 2) or np.abs(u.conj().T @ u - np.eye(2)).max() > COMPLETENESS_TOL:
        raise ValidationError(f"{name} must be a 2x2 unitary")
    u.setflags(write=False)
    return u


@dataclass(frozen=True)
class TwoOutcomePovm:
    alpha: float
    beta: float
    target: object = 0
    pre: Optional[np.ndarray] = None
    post1: Optional[np.ndarray] = None
    post2: Optional[np.ndarray] = None

    def __post_init__(self):
        for name in ("alpha", "beta"):
            v = getattr(self, name)
            if not (np.isfinite(v) and 0.0 <= v <= 1.0):
                raise ValidationError(f"{name} must lie in [0, 1], got {v!r}")
            object.__setattr__(self, name, float(v))
        for name in ("pre", "post1", "post2"):
            object.__setattr__(self, name, _check_unitary(getattr(self, name), name))

    @property
    def is_diagonal(self):
        return self.pre is None and self.post1 is None and self.post2 is None

    @property
    def complements(self):
        return float(np.sqrt(1.0 - self.alpha ** 2)), float(np.sqrt(1.0 - self.beta ** 2))

    def operators(self):
        eye = np.eye(2, dtype=np.complex128)
        v = eye if self.pre is None else self.pre
        u1 = eye if self.post1 is None else self.post1
        u2 = eye if self.post2 is None else self.post2
        a1 = u1 @ np.diag([self.alpha, self.beta]) @ v
        a2 = u2 @ np.diag(self.complements) @ v
        return a1, a2

    def completeness_error(self):
        a1, a2 = self.operators()
        return float(np.abs(a1.conj().T @ a1 + a2.conj().T @ a2 - np.eye(2)).max())


def make_diag_povm(alpha, beta, target=0) -> TwoOutcomePovm:
    return TwoOutcomePovm(alpha, beta, target)


@dataclass(frozen=True)
class PovmOutcome:
    branch: int
    probability: float
    state: Optional[PureState]

    @property
    def is_null(self):
        return self.state is None


def apply_povm(state: PureState, povm: TwoOutcomePovm):
    """Both post-measurement branches with their probabilities.

    A branch whose probability is below 1e-14 is returned with
    ``state=None``; it contributes nothing to averages.
    """
    require_normalized(state)
    outcomes = []
    for branch, op in enumerate(povm.operators(), start=1):
        raw = apply_local_operator(state, op, povm.target)
        p = raw.norm ** 2
        if p <= ZERO_PROBABILITY:
            outcomes.append(PovmOutcome(branch, float(p), None))
        else:
            outcomes.append(
                PovmOutcome(branch, float(p), PureState(state.n_qubits, raw.amplitudes / np.sqrt(p), state.labels))
            )
    return tuple(outcomes)


def _average_after(outcomes, measure):
    return sum(o.probability * measure(o.state) for o in outcomes if not o.is_null)


def delta_measure(state: PureState, povm: TwoOutcomePovm, measure: Callable) -> float:
    """``mu(psi) - p1 mu(phi1) - p2 mu(phi2)``; negative means mu grew on average."""
    outcomes = apply_povm(state, povm)
    return float(measure(state) - _average_after(outcomes, measure))


def delta_components(state: PureState, povm: TwoOutcomePovm):
    """Average changes of the three pieces of ``M`` around the measured qubit."""
    pivot = state.qubit_index(povm.target)
    outcomes = apply_povm(state, povm)
    return tuple(
        float(xi(state) - _average_after(outcomes, xi)) for xi in xi_measures(pivot)
    )


def slocc_scaling_check(state: PureState, povm: TwoOutcomePovm) -> float:
    """Largest deviation from ``M_t(phi_i) = |det A_i|^2 / p_i^2 * M_t(psi)``.

    ``t`` is the measured qubit. Branches of zero probability are skipped.
    """
    if not povm.is_diagonal:
        raise ValidationError("the scaling check expects a diagonal POVM")
    pivot = state.qubit_index(povm.target)
    m_t = residual_measure(pivot)
    base = m_t(state)
    ca, cb = povm.complements
    dets2 = ((povm.alpha * povm.beta) ** 2, (ca * cb) ** 2)
    worst = 0.0
    for outcome, d2 in zip(apply_povm(state, povm), dets2):
        if outcome.is_null:
            continue
        scale = d2 / outcome.probability ** 2
        worst = max(worst, abs(m_t(outcome.state) - scale * base))
    return worst


@dataclass(frozen=True)
class Axis:
    start: float = 0.05
    end: float = 0.95
    step: float = 0.01

    def __post_init__(self):
        if not self.step > 0:
            raise ValidationError(f"grid step must be positive, got {self.step}")
        if self.start > self.end:
            raise ValidationError(f"grid start {self.start} exceeds end {self.end}")

    def values(self):
        count = int(round((self.end - self.start) / self.step)) + 1
        last = self.start + (count - 1) * self.step
        if abs(last - self.end) > 1e-9 * max(1.0, abs(self.end)):
            raise ValidationError(f"grid step {self.step} does not land on end {self.end}")
        return np.round(self.start + self.step * np.arange(count), 12)

    @classmethod
    def parse(cls, text):
        try:
            start, end, step = (float(x) for x in text.split(":"))
        except ValueError:
            raise ValidationError(f"grid axis must be start:end:step, got {text!r}") from None
        return cls(start, end, step)


@dataclass(frozen=True)
class GridSpec:
    """Inclusive ``alpha`` x ``beta`` grid; defaults give 91 x 91 points."""

    alpha: Axis = field(default_factory=Axis)
    beta: Axis = field(default_factory=Axis)

    @classmethod
    def uniform(cls, start=0.05, end=0.95, step=0.01):
        axis = Axis(start, end, step)
        return cls(axis, axis)

    def points(self):
        """``(alphas, betas)`` flattened in alpha-major order."""
        a, b = np.meshgrid(self.alpha.values(), self.beta.values(), indexing="ij")
        return a.reshape(-1), b.reshape(-1)

    @property
    def shape(self):
        return len(self.alpha.values()), len(self.beta.values())


@dataclass(frozen=True)
class DeltaRecord:
    alpha: float
    beta: float
    measure_id: str
    delta: float


def _default_workers():
    return max(1, min(8, os.cpu_count() or 1))


def _measure_name(measure):
    return getattr(measure, "name", getattr(measure, "__name__", repr(measure)))


def _diag_branches(amps, n, target, alphas, betas):
    """Normalised branch amplitudes ``(k, 2**n)`` and probabilities for diagonal cores."""
    t = amps.reshape(2 ** target, 2, -1)
    part0 = t[:, 0, :].reshape(-1)
    part1 = t[:, 1, :].reshape(-1)
    w0 = np.vdot(part0, part0).real
    w1 = np.vdot(part1, part1).real
    probs = alphas ** 2 * w0 + betas ** 2 * w1
    null = probs <= ZERO_PROBABILITY
    safe = np.where(null, 1.0, probs)
    k = alphas.shape[0]
    out = np.empty((k, 2 ** target, 2, t.shape[2]), dtype=np.complex128)
    out[:, :, 0, :] = alphas[:, None, None] * t[None, :, 0, :]
    out[:, :, 1, :] = betas[:, None, None] * t[None, :, 1, :]
    out = out.reshape(k, -1) / np.sqrt(safe)[:, None]
    # null branches are replaced by the input state and weighted by zero
    out[null] = amps
    probs = np.where(null, 0.0, probs)
    return out, probs


def _scan_chunk(amps, n, target, alphas, betas, measure, base):
    if hasattr(measure, "batch"):
        b1, p1 = _diag_branches(amps, n, target, alphas, betas)
        b2, p2 = _diag_branches(amps, n, target, np.sqrt(1.0 - alphas ** 2), np.sqrt(1.0 - betas ** 2))
        mu = measure.batch(np.concatenate([b1, b2]), n)
        k = alphas.shape[0]
        return base - p1 * mu[:k] - p2 * mu[k:]
    state = PureState(n, amps)
    return np.array(
        [delta_measure(state, make_diag_povm(a, b, target), measure) for a, b in zip(alphas, betas)]
    )


def scan_deltas(state: PureState, target=0, grid: GridSpec = None, measure: Callable = TOTAL_RESIDUAL, workers=None):
    """Vectorised scan; returns ``(alphas, betas, deltas)`` in alpha-major order.

    Cells are split into contiguous chunks evaluated on a thread pool; the
    kernels release the GIL. Output order does not depend on scheduling.
    """
    require_normalized(state)
    grid = grid or GridSpec()
    q = state.qubit_index(target)
    alphas, betas = grid.points()
    base = float(measure(state))
    workers = workers or _default_workers()
    nchunks = max(1, min(workers * 4, alphas.shape[0]))
    bounds = np.linspace(0, alphas.shape[0], nchunks + 1).astype(int)
    jobs = [(lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
    amps = np.asarray(state.amplitudes)

    def run(job):
        lo, hi = job
        return _scan_chunk(amps, state.n_qubits, q, alphas[lo:hi], betas[lo:hi], measure, base)

    if workers == 1 or len(jobs) == 1:
        parts = [run(j) for j in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, jobs))
    return alphas, betas, np.concatenate(parts)


def scan_grid(state: PureState, target=0, grid: GridSpec = None, measure: Callable = TOTAL_RESIDUAL, workers=None):
    """One :class:`DeltaRecord` per grid cell, alpha-major."""
    alphas, betas, deltas = scan_deltas(state, target, grid, measure, workers)
    name = _measure_name(measure)
    return [DeltaRecord(float(a), float(b), name, float(d)) for a, b, d in zip(alphas, betas, deltas)]


def scan_minimum(deltas, alphas, betas):
    """``(min delta, (alpha, beta) at the minimum)``."""
    i = int(np.argmin(deltas))
    return float(deltas[i]), (float(alphas[i]), float(betas[i]))


def apply_sequence(state: PureState, steps: Sequence):
    """Follow chosen branches of successive POVMs.

    ``steps`` holds ``(povm, branch)`` pairs with ``branch`` 1 or 2.
    Returns the final normalised state and the product of the branch
    probabilities.
    """
    prob = 1.0
    current = state
    for i, (povm, branch) in enumerate(steps):
        if branch not in (1, 2):
            raise ValidationError(f"step {i}: branch must be 1 or 2, got {branch!r}")
        outcome = apply_povm(current, povm)[branch - 1]
        if outcome.is_null:
            raise ValidationError(f"step {i}: branch {branch} has zero probability")
        prob *= outcome.probability
        current = outcome.state
    return current, prob


def scan_second_level(state: PureState, first: TwoOutcomePovm, target, grid: GridSpec = None,
                      measure: Callable = TOTAL_RESIDUAL, workers=None):
    """Grid scan on each non-null branch of a first POVM.

    Returns ``[(outcome, alphas, betas, deltas), ...]`` for branches 1 and 2.
    """
    results = []
    for outcome in apply_povm(state, first):
        if outcome.is_null:
            continue
        results.append((outcome,) + scan_deltas(outcome.state, target, grid, measure, workers))
    return results
