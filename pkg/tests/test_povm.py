import numpy as np
import pytest

from multicorr.appendix import example1_state, example2_state, example3_state
from multicorr.families import make_ghz
from multicorr.measures import TOTAL_RESIDUAL, AVERAGE_RESIDUAL, residual_measure
from multicorr.povm import (
    Axis,
    GridSpec,
    TwoOutcomePovm,
    apply_povm,
    apply_sequence,
    delta_components,
    delta_measure,
    make_diag_povm,
    scan_deltas,
    scan_grid,
    scan_minimum,
    scan_second_level,
    slocc_scaling_check,
)
from multicorr.qcr import pinned_measure
from multicorr.state import ValidationError, apply_local_operator, random_pure_state, random_unitary

import oracles

COARSE = GridSpec.uniform(0.05, 0.95, 0.1)


def test_diag_povm_examples():
    a1, a2 = make_diag_povm(1, 1).operators()
    assert np.allclose(a1, np.eye(2)) and np.allclose(a2, 0)
    _, a2 = make_diag_povm(0.9, 0.2).operators()
    assert np.allclose(a2, np.diag([np.sqrt(0.19), np.sqrt(0.96)]), atol=1e-15)
    a1, a2 = make_diag_povm(0.37, 0.37).operators()
    assert np.allclose(a1, 0.37 * np.eye(2)) and np.allclose(a2, np.sqrt(1 - 0.37 ** 2) * np.eye(2))


@pytest.mark.parametrize("alpha, beta", [(-0.1, 0.5), (0.5, 1.2), (float("nan"), 0.5)])
def test_diag_povm_rejects_out_of_range(alpha, beta):
    with pytest.raises(ValidationError):
        make_diag_povm(alpha, beta)


def test_general_povm_completeness(rng):
    for _ in range(20):
        povm = TwoOutcomePovm(*rng.uniform(0, 1, 2), 0, *(random_unitary(2, rng) for _ in range(3)))
        assert povm.completeness_error() <= 1e-12
    with pytest.raises(ValidationError):
        TwoOutcomePovm(0.5, 0.5, 0, pre=np.ones((2, 2)))


@pytest.mark.parametrize(
    "state, target, params, expected",
    [
        (example1_state, 0, (0.9, 0.2), 0.5533),
        (example2_state, 0, (0.3, 0.8), 0.3650),
        (example3_state, 1, (0.9, 0.4), 0.4850),
    ],
)
def test_apply_povm_probabilities(state, target, params, expected):
    o1, o2 = apply_povm(state(), make_diag_povm(*params, target))
    assert o1.probability == pytest.approx(expected, abs=1e-4)
    assert o2.probability == pytest.approx(1 - expected, abs=1e-4)
    assert o1.probability + o2.probability == pytest.approx(1.0, abs=1e-12)
    assert abs(o1.state.norm - 1) < 1e-12 and abs(o2.state.norm - 1) < 1e-12
    assert (o1.branch, o2.branch) == (1, 2)


def test_apply_povm_matches_kron_oracle(rng):
    psi = random_pure_state(4, rng)
    for q in range(4):
        (p1, s1), (p2, s2) = oracles.povm_branches(psi.amplitudes, q, 0.6, 0.3, 4)
        o1, o2 = apply_povm(psi, make_diag_povm(0.6, 0.3, q))
        assert o1.probability == pytest.approx(p1, abs=1e-14)
        assert np.allclose(o2.state.amplitudes, s2, atol=1e-14)


def test_zero_probability_branch():
    o1, o2 = apply_povm(make_ghz(4), make_diag_povm(1, 1))
    assert o2.is_null and o2.probability == 0.0
    assert delta_measure(make_ghz(4), make_diag_povm(1, 1), TOTAL_RESIDUAL) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValidationError):
        apply_sequence(make_ghz(4), [(make_diag_povm(1, 1), 2)])


def test_delta_measure_examples():
    d = delta_measure(example1_state(), make_diag_povm(0.9, 0.2, 0), residual_measure(2))
    assert d == pytest.approx(-0.1185, abs=1e-4)
    d = delta_measure(example3_state(), make_diag_povm(0.9, 0.4, 1), pinned_measure("t3_2", ("t4", 0.0)))
    assert d == pytest.approx(-0.1057, abs=1e-4)


def test_equal_parameters_give_zero_delta(rng):
    psi = random_pure_state(4, rng)
    povm = make_diag_povm(0.42, 0.42, 2)
    assert delta_measure(psi, povm, TOTAL_RESIDUAL) == pytest.approx(0.0, abs=1e-12)
    assert np.allclose(delta_components(psi, povm), 0, atol=1e-12)
    assert slocc_scaling_check(psi, povm) <= 1e-12


def test_delta_components_examples():
    ghz = delta_components(make_ghz(4), make_diag_povm(0.9, 0.2, 0))
    assert ghz[2] == pytest.approx(0.0, abs=1e-12)
    # frozen values, cross-checked with the brute-force oracle below
    assert np.allclose(ghz, [0.60654731, 1.81964194, 0.0], atol=1e-8)
    x1, x2, x3 = delta_components(example1_state(), make_diag_povm(0.9, 0.2, 0))
    assert x1 >= 0 and x2 >= 0 and x3 <= 0
    assert np.allclose([x1, x2, x3], [0.23692781, 0.35539172, -0.23692781], atol=1e-8)


def test_delta_components_against_oracle():
    psi = example1_state().amplitudes
    branches = oracles.povm_branches(psi, 0, 0.9, 0.2, 4)

    def xi1(amps):
        return oracles.residual(amps, 0, 4)

    want = xi1(psi) - sum(p * xi1(s) for p, s in branches)
    got = delta_components(example1_state(), make_diag_povm(0.9, 0.2, 0))[0]
    assert got == pytest.approx(want, abs=1e-7)


def test_delta_components_sum_rule(rng):
    for _ in range(30):
        psi = random_pure_state(4, rng)
        povm = make_diag_povm(*rng.uniform(0, 1, 2), int(rng.integers(4)))
        assert sum(delta_components(psi, povm)) == pytest.approx(delta_measure(psi, povm, TOTAL_RESIDUAL), abs=1e-10)


def test_slocc_scaling(rng):
    assert slocc_scaling_check(example1_state(), make_diag_povm(0.9, 0.2, 0)) <= 1e-9
    for _ in range(100):
        psi = random_pure_state(4, rng)
        assert slocc_scaling_check(psi, make_diag_povm(*rng.uniform(0, 1, 2), 0)) <= 1e-9


def test_single_party_monotonicity(rng):
    m_a = residual_measure(0)
    for _ in range(100):
        psi = random_pure_state(4, rng)
        o = apply_povm(psi, make_diag_povm(*rng.uniform(0, 1, 2), 0))
        avg = sum(x.probability * m_a(x.state) for x in o if not x.is_null)
        assert avg <= m_a(psi) + 1e-9


def test_pre_rotation_equivalence(rng):
    for _ in range(20):
        psi = random_pure_state(4, rng)
        v = random_unitary(2, rng)
        a, b = rng.uniform(0, 1, 2)
        q = int(rng.integers(4))
        general = TwoOutcomePovm(a, b, q, pre=v, post1=random_unitary(2, rng), post2=random_unitary(2, rng))
        rotated = apply_local_operator(psi, v, q)
        for mu in (TOTAL_RESIDUAL, residual_measure(q)):
            d1 = delta_measure(psi, general, mu)
            d2 = delta_measure(rotated, make_diag_povm(a, b, q), mu)
            assert d1 == pytest.approx(d2, abs=1e-10)


def test_axis_and_grid():
    assert len(Axis().values()) == 91
    assert Axis().values()[-1] == 0.95
    assert GridSpec().shape == (91, 91)
    with pytest.raises(ValidationError):
        Axis(0.0, 1.0, 0.3).values()
    with pytest.raises(ValidationError):
        Axis(1.0, 0.0, 0.1)
    with pytest.raises(ValidationError):
        Axis(0.0, 1.0, 0.0)
    assert Axis.parse("0:1:0.25").values().tolist() == [0, 0.25, 0.5, 0.75, 1]
    with pytest.raises(ValidationError):
        Axis.parse("0:1")


def test_scan_grid_default_count_and_order():
    records = scan_grid(make_ghz(4))
    assert len(records) == 8281
    assert (records[0].alpha, records[0].beta) == (0.05, 0.05)
    assert (records[1].alpha, records[1].beta) == (0.05, 0.06)
    assert (records[91].alpha, records[91].beta) == (0.06, 0.05)
    assert records[0].measure_id == "M"
    assert min(r.delta for r in records) >= -1e-9
    assert all(np.isfinite(r.delta) for r in records)


def test_scan_matches_pointwise(rng):
    psi = random_pure_state(4, rng)
    a, b, d = scan_deltas(psi, 1, COARSE, TOTAL_RESIDUAL)
    for i in range(0, len(a), 7):
        assert d[i] == pytest.approx(delta_measure(psi, make_diag_povm(a[i], b[i], 1), TOTAL_RESIDUAL), abs=1e-12)


def test_scan_independent_of_workers(rng):
    psi = random_pure_state(4, rng)
    ref = scan_deltas(psi, 0, COARSE, TOTAL_RESIDUAL, workers=1)[2]
    assert np.array_equal(ref, scan_deltas(psi, 0, COARSE, TOTAL_RESIDUAL, workers=4)[2])


def test_scan_plain_callable(rng):
    psi = random_pure_state(4, rng)
    fast = scan_deltas(psi, 0, COARSE, AVERAGE_RESIDUAL)[2]
    slow = scan_deltas(psi, 0, COARSE, lambda s: AVERAGE_RESIDUAL(s))[2]
    assert np.allclose(fast, slow, atol=1e-12)


def test_example1_scan_has_negative_cell():
    _, _, d = scan_deltas(example1_state(), 0, GridSpec(), residual_measure(2))
    assert d.min() < 0


def test_scan_minimum():
    lo, arg = scan_minimum(np.array([0.3, -0.2, 0.1]), np.array([0.1, 0.2, 0.3]), np.array([0.4, 0.5, 0.6]))
    assert lo == -0.2 and arg == (0.2, 0.5)


def test_apply_sequence_examples():
    psi = example2_state()
    same, prob = apply_sequence(psi, [])
    assert same == psi and prob == 1.0
    first = make_diag_povm(0.3, 0.8, 0)
    second = make_diag_povm(0.9, 0.2, 2)
    phi11, p11 = apply_sequence(psi, [(first, 1), (second, 1)])
    phi12, p12 = apply_sequence(psi, [(first, 1), (second, 2)])
    p1 = apply_povm(psi, first)[0].probability
    assert p11 / p1 == pytest.approx(0.1929, abs=1e-4)
    assert p12 / p1 == pytest.approx(0.8071, abs=1e-4)
    assert residual_measure(0)(phi11) == pytest.approx(0.7552, abs=1e-4)
    assert residual_measure(0)(phi12) == pytest.approx(0.07901, abs=1e-4)
    with pytest.raises(ValidationError):
        apply_sequence(psi, [(first, 3)])


def test_scan_second_level_branches():
    results = scan_second_level(example2_state(), make_diag_povm(0.4, 0.7, 0), 1, COARSE)
    assert [r[0].branch for r in results] == [1, 2]
    for outcome, a, b, d in results:
        assert len(d) == 100 and d.min() >= -1e-9
