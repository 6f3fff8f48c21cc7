"""The eight acceptance criteria, each reported as one PASS/FAIL line.

Each test records its outcome before asserting, so the summary printed at
the end of the run lists every criterion even when one fails.
"""
import time

import numpy as np
import pytest

from multicorr.appendix import example1_checks, example2_checks, example3_checks
from multicorr.families import make_l07p1, make_w4
from multicorr.figures import ems_surface, representative_scan, second_level_scan
from multicorr.measures import measure_report, residual_measure
from multicorr.povm import Axis, apply_povm, make_diag_povm, slocc_scaling_check
from multicorr.qcr import build_system, solve_pinned, split_correlations
from multicorr.state import apply_local_operator, random_amplitudes, random_unitary, PureState

SEED = 20240611


def _table_criterion(record, number, title, checks, budget):
    start = time.perf_counter()
    rows = checks()
    elapsed = time.perf_counter() - start
    bad = [c for c in rows if not c.passed]
    ok = not bad and elapsed < budget
    detail = f"{len(rows) - len(bad)}/{len(rows)} entries, {elapsed:.2f} s"
    record(number, title, ok, detail)
    assert not bad, [(c.quantity, c.expected, c.computed) for c in bad]
    assert elapsed < budget


def test_criterion_1_first_worked_example(record_criterion):
    _table_criterion(record_criterion, 1, "weak measurement on A of the six-term state", example1_checks, 1.0)


def test_criterion_2_two_level_example(record_criterion):
    _table_criterion(record_criterion, 2, "two-level POVM on the symmetric Gabcd state", example2_checks, 1.0)


def test_criterion_3_pinned_split_example(record_criterion):
    _table_criterion(record_criterion, 3, "pinned t3/t4 split under a POVM on B", example3_checks, 1.0)


def test_criterion_4_infeasible_split(record_criterion):
    split = split_correlations(make_l07p1(), ("t3_1", 0.0))
    err = max(abs(split.t4 - 1.5), np.abs(split.t3[1:] + 0.25).max(), abs(split.t3[0]))
    ok = err <= 1e-10 and not split.feasible
    record_criterion(4, "pinned split flagged infeasible (t4 = 1.5, t3 = -0.25)", ok, f"max error {err:.1e}")
    assert err <= 1e-10
    assert not split.feasible


def test_criterion_5_representative_scans(record_criterion):
    start = time.perf_counter()
    rows = representative_scan() + second_level_scan()
    elapsed = time.perf_counter() - start
    worst = min(rows, key=lambda r: r.min_delta)
    first = [r for r in rows if r.branch == 0]
    second = [r for r in rows if r.branch != 0]
    ok = worst.min_delta >= -1e-9 and elapsed < 60 and len(first) == 9
    # both branches of every second-level family
    ok &= {(r.family, r.branch) for r in second} == {(f, b) for f in ("Gabcd", "Labc2", "Lab3") for b in (1, 2)}
    detail = f"{len(rows)} scans, worst min dM {worst.min_delta:.2e} ({worst.family}), {elapsed:.1f} s"
    record_criterion(5, "nine representative states and second-level scans never increase M", ok, detail)
    assert worst.min_delta >= -1e-9, worst
    assert elapsed < 60
    assert ok


def test_criterion_6_ems_surface(record_criterion):
    spots = ems_surface(0.0, 0.5, Axis(0.0, 0.5, 0.5), Axis(0.0, 0.5, 0.5))
    values = {(a, d): e for a, d, e in zip(*spots)}
    tail = ems_surface(0.0, 0.5, Axis(5.0, 5.0, 0.05), Axis(0.05, 0.05, 0.05))[2][0]
    start = time.perf_counter()
    a, d, ems = ems_surface()
    elapsed = time.perf_counter() - start
    errs = (abs(values[(0.0, 0.5)] - 1), abs(values[(0.5, 0.0)] - 1))
    ok = max(errs) <= 1e-10 and tail < 0.2 and len(ems) == 101 * 101 and elapsed < 30
    detail = f"|E_ms - 1| <= {max(errs):.1e}, E_ms(5, 0.05) = {tail:.4f}, surface {elapsed:.2f} s"
    record_criterion(6, "E_ms spot values on the Gabcd surface", ok, detail)
    assert max(errs) <= 1e-10
    assert tail < 0.2
    assert len(ems) == 101 * 101 and elapsed < 30


def test_criterion_7_property_suites(record_criterion):
    rng = np.random.default_rng(SEED)
    start = time.perf_counter()
    amps = random_amplitudes(4, 1000, rng)
    worst = dict.fromkeys(["qcr", "monogamy", "lu", "one_party", "slocc", "sum", "split"], 0.0)
    m_a = residual_measure(0)
    for vec in amps:
        psi = PureState(4, vec)
        rep = measure_report(psi)
        worst["qcr"] = max(worst["qcr"], np.abs(rep.tau + rep.s2 - 1).max())
        worst["monogamy"] = max(worst["monogamy"], (rep.c2.sum(axis=1) - rep.tau).max())
        worst["sum"] = max(worst["sum"], abs(rep.m_k.sum() - rep.m_total))

        rotated = psi
        for q in range(4):
            rotated = apply_local_operator(rotated, random_unitary(2, rng), q)
        other = measure_report(rotated)
        lu = max(np.abs(getattr(rep, f) - getattr(other, f)).max() for f in ("tau", "s2", "c2", "m_k"))
        worst["lu"] = max(worst["lu"], lu, abs(rep.m_total - other.m_total))

        povm = make_diag_povm(*rng.uniform(0, 1, 2), 0)
        avg = sum(o.probability * m_a(o.state) for o in apply_povm(psi, povm) if not o.is_null)
        worst["one_party"] = max(worst["one_party"], avg - rep.m_k[0])
        worst["slocc"] = max(worst["slocc"], slocc_scaling_check(psi, povm))

        system = build_system(psi)
        for pin in (("t4", 0.0), ("t3_2", float(rng.uniform(-0.3, 0.3)))):
            split = solve_pinned(system, pin)
            worst["split"] = max(worst["split"], abs(4 * split.t4 + 3 * split.t3.sum() - rep.m_total))
    elapsed = time.perf_counter() - start
    limits = {"qcr": 1e-10, "monogamy": 1e-10, "lu": 1e-10, "one_party": 1e-9, "slocc": 1e-9, "sum": 0.0, "split": 1e-10}
    failures = {k: v for k, v in worst.items() if v > limits[k]}
    ok = not failures and elapsed < 30
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items()) + f"; {elapsed:.1f} s"
    record_criterion(7, "property suites over 1000 Haar-random states", ok, detail)
    assert not failures, failures
    assert elapsed < 30


def test_criterion_8_w_nullity(record_criterion):
    rng = np.random.default_rng(SEED + 8)
    worst = 0.0
    for _ in range(200):
        w = make_w4(*(rng.normal(size=4) + 1j * rng.normal(size=4)))
        worst = max(worst, np.abs(measure_report(w).m_k).max())
    ok = worst <= 1e-10
    record_criterion(8, "residual correlations vanish on W-class states", ok, f"max |M_k| {worst:.1e}")
    assert ok
