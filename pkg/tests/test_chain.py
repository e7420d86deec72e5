import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import binomial_sigma, joint_success_by_enumeration
from seqdisc.chain import (ChainPlan, exact_success, plan_custom, plan_equal_split,
                           simulate_chain, stage_measurements, stage_post_overlap_residuals)
from seqdisc.errors import InvalidParameterError, InvalidPlanError
from seqdisc.rng import split_counts, stream


def test_single_optimal_stage():
    for plan in (plan_equal_split(3, 0.3, 1), plan_custom(3, 0.3, [1.0])):
        assert plan.stage_failures == (0.3,)
        assert exact_success(plan) == pytest.approx(0.7)


def test_equal_split_values():
    plan = plan_equal_split(4, 0.25, 2)
    assert plan.stage_failures == (0.5, 0.5)
    assert plan.overlaps == (0.25, 0.5, 1.0)
    assert exact_success(plan) == pytest.approx(0.25, abs=1e-15)
    assert exact_success(plan) == pytest.approx((1 - np.sqrt(0.25)) ** 2, abs=1e-15)
    assert exact_success(plan_equal_split(3, 0.125, 3)) == pytest.approx(0.125, abs=1e-15)


def test_custom_ladders():
    s = 0.25
    assert plan_custom(3, s, [np.sqrt(s), 1.0]).stage_failures == pytest.approx((0.5, 0.5), abs=1e-15)
    three = plan_custom(3, s, [s ** (2 / 3), s ** (1 / 3), 1.0])
    assert three.stage_failures == pytest.approx(plan_equal_split(3, s, 3).stage_failures, abs=1e-12)
    assert exact_success(plan_custom(3, s, [0.5, 0.5, 1.0])) == 0.0


@pytest.mark.parametrize("ladder", [[0.5, 0.3, 1.0], [0.5, 0.9], [0.1, 1.0], [], [1.0, 1.0]])
def test_invalid_ladders(ladder):
    with pytest.raises(InvalidPlanError):
        plan_custom(3, 0.25, ladder)


def test_invalid_observer_count():
    with pytest.raises(InvalidPlanError):
        plan_equal_split(3, 0.2, 0)
    with pytest.raises(InvalidPlanError):
        ChainPlan(3, 0.2, (0.2, 1.0), (0.2, 0.5))


@given(st.integers(2, 8), st.floats(0.0, 0.95), st.integers(1, 6))
def test_ladder_invariants(n, s, m):
    plan = plan_equal_split(n, s, m)
    t = plan.overlaps
    assert all(b >= a - 1e-15 for a, b in zip(t, t[1:]))
    assert np.prod(plan.stage_failures) == pytest.approx(s, abs=1e-12)
    for q, lo in zip(plan.stage_failures, t):
        assert lo - 1e-12 <= q <= 1
    expected = joint_success_by_enumeration([1 - q for q in plan.stage_failures])
    assert exact_success(plan) == pytest.approx(expected, abs=1e-12)
    assert exact_success(plan) == pytest.approx((1 - s ** (1 / m)) ** m, abs=1e-12)


@pytest.mark.parametrize("n,s,m", [(3, 0.25, 2), (5, 0.49, 3), (2, 0.04, 4)])
def test_stage_post_overlaps(n, s, m):
    stages = stage_measurements(plan_equal_split(n, s, m))
    assert max(stage_post_overlap_residuals(stages)) < 1e-10
    assert stages[-1].terminal and not any(st_.terminal for st_ in stages[:-1])


@pytest.mark.parametrize("n,s,p", [(3, 0.25, 0.25), (2, 0.49, 0.09)])
def test_monte_carlo_matches_exact(n, s, p):
    stats = simulate_chain(plan_equal_split(n, s, 2), 100_000, seed=11)
    assert stats.exact == pytest.approx(p, abs=1e-12)
    assert abs(stats.all_success_rate - p) < 3 * binomial_sigma(p, 100_000)
    assert stats.mislabels == 0


def test_orthogonal_states_always_succeed():
    stats = simulate_chain(plan_equal_split(4, 0.0, 1), 5000, seed=1)
    assert stats.all_success == 5000


def test_counts_consistent():
    stats = simulate_chain(plan_equal_split(4, 0.3, 3), 20_000, seed=5)
    assert stats.all_success <= stats.stage_success.min() <= stats.stage_success.max() <= stats.trials
    assert stats.per_state_trials.sum() == stats.trials
    assert stats.per_state_all_success.sum() == stats.all_success
    d = stats.to_dict()
    assert d["all_success"] == stats.all_success and d["seed"] == 5


def test_input_distribution():
    stats = simulate_chain(plan_equal_split(3, 0.25, 2), 4000, seed=3,
                           input_distribution=[0.0, 1.0, 0.0])
    assert stats.per_state_trials.tolist() == [0, 4000, 0]
    with pytest.raises(InvalidParameterError):
        simulate_chain(plan_equal_split(3, 0.25, 2), 10, seed=3, input_distribution=[0.5, 0.5])


def test_determinism_and_workers():
    plan = plan_equal_split(3, 0.25, 2)
    a = simulate_chain(plan, 30_000, seed=42, workers=3)
    b = simulate_chain(plan, 30_000, seed=42, workers=3)
    assert a.to_dict() == b.to_dict()
    c = simulate_chain(plan, 30_000, seed=43, workers=3)
    assert c.all_success != a.all_success


def test_backends_identical():
    plan = plan_equal_split(5, 0.25, 3)
    a = simulate_chain(plan, 20_000, seed=8, backend="numba")
    b = simulate_chain(plan, 20_000, seed=8, backend="numpy")
    assert a.to_dict() == b.to_dict()


def test_bad_trials():
    with pytest.raises(InvalidParameterError):
        simulate_chain(plan_equal_split(3, 0.25, 2), 0, seed=1)
    with pytest.raises(ValueError):
        simulate_chain(plan_equal_split(3, 0.25, 2), 10, seed=-1)


def test_rng_helpers():
    assert split_counts(10, 3) == [4, 3, 3]
    assert sum(split_counts(7, 7)) == 7
    assert stream(5, 1).random() == stream(5, 1).random()
    assert stream(5, 1).random() != stream(5, 2).random()
    with pytest.raises(ValueError):
        split_counts(5, 0)
