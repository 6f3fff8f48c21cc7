"""Four-qubit complementarity system for three- and four-qubit correlations.

With ``S_k^2 = 1 - tau_k`` substituted, the four relations read

    M_k = t4 + sum of t3[i] over the three-qubit subsystems i containing k,

where ``t3[i]`` belongs to the subsystem that omits qubit ``i``. Four
equations cannot fix five unknowns, so one unknown is pinned and the
remaining four follow in closed form. The split is only the unique
solution under that pin; it is not claimed to be a physical measure.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from multicorr.measures import Measure, correlations
from multicorr.state import PureState, ValidationError

FEASIBILITY_TOL = -1e-9
UNKNOWNS = ("t4", "t3_1", "t3_2", "t3_3", "t3_4")

# Columns: t4, t3_1..t3_4. Row k omits the subsystem that excludes qubit k.
COEFFICIENTS = np.array(
    [
        [1, 0, 1, 1, 1],
        [1, 1, 0, 1, 1],
        [1, 1, 1, 0, 1],
        [1, 1, 1, 1, 0],
    ],
    dtype=float,
)
COEFFICIENTS.setflags(write=False)


@dataclass(frozen=True)
class QcrSystem:
    m: np.ndarray  # (M_A, M_B, M_C, M_D)

    coefficients = COEFFICIENTS

    @property
    def total(self):
        return float(self.m.sum())


@dataclass(frozen=True)
class CorrelationSplit:
    t4: float
    t3: np.ndarray  # indexed by omitted qubit: t3[0] lives on BCD
    pinned: tuple
    feasible: bool
    residual: float

    @property
    def vector(self):
        return np.concatenate([[self.t4], self.t3])

    def reconstructed_m(self):
        return COEFFICIENTS @ self.vector


def build_system(state: PureState) -> QcrSystem:
    if state.n_qubits != 4:
        raise ValidationError(f"the QCR system is defined for 4 qubits, got {state.n_qubits}")
    tau, c2 = correlations(state)
    m = tau - c2.sum(axis=1)
    m.setflags(write=False)
    return QcrSystem(m)


def _parse_pin(pin):
    name, value = pin
    if isinstance(name, int):
        name = UNKNOWNS[name]
    if name not in UNKNOWNS:
        raise ValidationError(f"pinned unknown must be one of {UNKNOWNS}, got {name!r}")
    return name, float(value)


def solve_arrays(m, pin):
    """Vectorised closed form: ``m`` is ``(batch, 4)``; returns ``(t4, t3)``."""
    name, value = _parse_pin(pin)
    m = np.asarray(m, dtype=float)
    total = m.sum(axis=-1)
    if name == "t4":
        t4 = np.full_like(total, value)
    else:
        j = UNKNOWNS.index(name) - 1
        t4 = total - 3.0 * (value + m[..., j])
    t3 = ((total - t4) / 3.0)[..., None] - m
    return t4, t3


def solve_pinned(system: QcrSystem, pin) -> CorrelationSplit:
    """Unique split with one unknown fixed, e.g. ``pin=("t4", 0.0)``."""
    name, value = _parse_pin(pin)
    t4, t3 = solve_arrays(system.m, (name, value))
    t4 = float(t4)
    if name != "t4":
        # pinned component is exact by construction
        t3[UNKNOWNS.index(name) - 1] = value
    vec = np.concatenate([[t4], t3])
    residual = float(np.abs(COEFFICIENTS @ vec - system.m).max())
    t3.setflags(write=False)
    return CorrelationSplit(
        t4=t4,
        t3=t3,
        pinned=(name, value),
        feasible=bool(np.all(vec >= FEASIBILITY_TOL)),
        residual=residual,
    )


def split_correlations(state: PureState, pin=("t4", 0.0)) -> CorrelationSplit:
    return solve_pinned(build_system(state), pin)


def pinned_measure(component: str, pin) -> Measure:
    """Measure returning one component of the pinned split."""
    pin = _parse_pin(pin)
    if component not in UNKNOWNS:
        raise ValidationError(f"component must be one of {UNKNOWNS}, got {component!r}")
    idx = UNKNOWNS.index(component)

    def fn(tau, c2):
        if tau.shape[1] != 4:
            raise ValidationError("pinned splits need 4-qubit states")
        t4, t3 = solve_arrays(tau - c2.sum(axis=2), pin)
        return t4 if idx == 0 else t3[:, idx - 1]

    return Measure(f"{component}@{pin[0]}={pin[1]:g}", fn)


def phi_family_relation_check(a, b, c, e) -> float:
    """Residual of ``t3_1 = -t4 / 3`` on ``a|0000> + b|0101> + c|1000> + e|1110>``.

    From the closed form, ``t3_1 + t4 / 3 = (M_B + M_C + M_D - 2 M_A) / 3``
    whatever the pin, so this is computed from the residuals directly.
    """
    amps = np.zeros(16, dtype=np.complex128)
    amps[[0b0000, 0b0101, 0b1000, 0b1110]] = [a, b, c, e]
    norm = np.linalg.norm(amps)
    if norm == 0.0:
        raise ValidationError("null state")
    m = build_system(PureState(4, amps / norm)).m
    return float((m[1] + m[2] + m[3] - 2.0 * m[0]) / 3.0)
