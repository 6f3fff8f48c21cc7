"""Data behind the monotonicity scans of the representative states and the E_ms surface."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from multicorr.families import make_family, representative_states, StateFamily, REPRESENTATIVES
from multicorr.measures import AVERAGE_RESIDUAL, TOTAL_RESIDUAL
from multicorr.povm import Axis, GridSpec, make_diag_povm, scan_deltas, scan_minimum, scan_second_level

SECOND_LEVEL_FAMILIES = ("Gabcd", "Labc2", "Lab3")
FIRST_LEVEL = (0.4, 0.7)


@dataclass(frozen=True)
class ScanSummary:
    family: str
    target: int
    min_delta: float
    argmin: tuple
    branch: int = 0  # 0 for a single-level scan
    branch_probability: float = 1.0


def representative_scan(grid: GridSpec = None, measure=TOTAL_RESIDUAL, workers=None):
    out = []
    for name, state, target in representative_states():
        a, b, d = scan_deltas(state, target, grid, measure, workers)
        lo, arg = scan_minimum(d, a, b)
        out.append(ScanSummary(name, target, lo, arg))
    return out


def second_level_scan(grid: GridSpec = None, targets=(0, 1, 2, 3), families=SECOND_LEVEL_FAMILIES,
                      first=FIRST_LEVEL, measure=TOTAL_RESIDUAL, workers=None):
    """Scan every branch of a fixed first POVM on qubit A, on each second-level target."""
    params = {name: p for name, p, _ in REPRESENTATIVES}
    out = []
    for name in families:
        state = make_family(StateFamily(name, params[name]))
        povm = make_diag_povm(first[0], first[1], 0)
        for target in targets:
            for outcome, a, b, d in scan_second_level(state, povm, target, grid, measure, workers):
                lo, arg = scan_minimum(d, a, b)
                out.append(ScanSummary(name, target, lo, arg, outcome.branch, outcome.probability))
    return out


def gabcd_amplitudes(a, b, c, d):
    """Unnormalised G_abcd amplitudes for arrays ``a``, ``d`` (broadcast) -> ``(k, 16)``."""
    a, b, c, d = np.broadcast_arrays(*(np.asarray(x, dtype=np.complex128) for x in (a, b, c, d)))
    amps = np.zeros(a.shape + (16,), dtype=np.complex128)
    for idx in (0b0000, 0b1111):
        amps[..., idx] = (a + d) / 2
    for idx in (0b0011, 0b1100):
        amps[..., idx] = (a - d) / 2
    for idx in (0b0101, 0b1010):
        amps[..., idx] = (b + c) / 2
    for idx in (0b0110, 0b1001):
        amps[..., idx] = (b - c) / 2
    return amps.reshape(-1, 16)


def ems_surface(b=0.0, c=0.5, a_axis: Axis = None, d_axis: Axis = None):
    """E_ms of G_abcd over an ``a`` x ``d`` grid, a-major.

    Returns ``(a, d, ems)``; cells where the state vanishes hold ``nan``.
    """
    a_axis = a_axis or Axis(0.0, 5.0, 0.05)
    d_axis = d_axis or Axis(0.0, 5.0, 0.05)
    aa, dd = np.meshgrid(a_axis.values(), d_axis.values(), indexing="ij")
    aa = aa.reshape(-1)
    dd = dd.reshape(-1)
    amps = gabcd_amplitudes(aa, b, c, dd)
    norms = np.linalg.norm(amps, axis=1)
    null = norms == 0.0
    ems = np.full(aa.shape, np.nan)
    live = ~null
    if live.any():
        ems[live] = AVERAGE_RESIDUAL.batch(amps[live] / norms[live, None], 4)
    return aa, dd, ems
