"""Tests for single sampling plans."""

import numpy as np
import pytest

from src.core.errors import (
    InvalidStrength,
    InvalidTestParams,
    OutcomeStreamExhausted,
    PlanSearchExhausted,
    WrongSampleCount,
)
from src.core.ssp import ssp_decide, ssp_errors, ssp_plan, ssp_run
from src.models.hypothesis import Hypothesis, SspPlan, TestMethod
from tests.oracle import brute_force_ssp


def test_zero_error_plan():
    """Test that separating p0 = 1 from p1 = 0 takes one sample."""
    assert ssp_plan(1.0, 0.0, 0.01, 0.01) == SspPlan(1, 0)


@pytest.mark.parametrize(
    ("p0", "p1", "alpha", "beta"),
    [
        (0.5, 0.3, 0.2, 0.1),
        (0.6, 0.4, 0.05, 0.05),
        (0.9, 0.8, 0.01, 0.05),
        (0.3, 0.05, 0.1, 0.1),
    ],
)
def test_plan_matches_exhaustive_search(p0, p1, alpha, beta):
    """Test that the plan is the smallest one found by trying every (n, c)."""
    assert ssp_plan(p0, p1, alpha, beta) == SspPlan(*brute_force_ssp(p0, p1, alpha, beta))


@pytest.mark.slow
def test_plan_matches_exhaustive_search_on_random_regions():
    """Test minimality against trying every plan up to n = 500 for random regions at least 0.05 wide."""
    rng = np.random.default_rng(5)
    for _ in range(50):
        p1 = float(rng.uniform(0.0, 0.9))
        p0 = min(1.0, p1 + float(rng.uniform(0.05, 0.4)))
        alpha, beta = (float(x) for x in rng.uniform(0.01, 0.2, size=2))

        expected = brute_force_ssp(p0, p1, alpha, beta, n_max=500)
        if expected is None:
            with pytest.raises(PlanSearchExhausted):
                ssp_plan(p0, p1, alpha, beta, n_max=500)
        else:
            assert ssp_plan(p0, p1, alpha, beta, n_max=500) == SspPlan(*expected)


def test_plan_meets_error_bounds():
    """Test that the exact errors of a synthesized plan are within bounds."""
    plan = ssp_plan(0.95, 0.9, 0.01, 0.01)
    type1, type2 = ssp_errors(plan, 0.95, 0.9)
    assert type1 <= 0.01
    assert type2 <= 0.01


def test_narrower_region_costs_more():
    """Test that shrinking the indifference region increases the plan size."""
    narrow = ssp_plan(0.55, 0.45, 0.05, 0.05)
    wide = ssp_plan(0.6, 0.4, 0.05, 0.05)
    assert narrow.n > wide.n


def test_plan_search_limit():
    """Test that an unreachable strength within n_max fails."""
    with pytest.raises(PlanSearchExhausted):
        ssp_plan(0.51, 0.49, 0.001, 0.001, n_max=10)


def test_plan_parameter_validation():
    """Test region and strength checks."""
    with pytest.raises(InvalidTestParams):
        ssp_plan(0.3, 0.5, 0.01, 0.01)
    with pytest.raises(InvalidStrength):
        ssp_plan(0.6, 0.4, 0.0, 0.01)


def test_decide():
    """Test acceptance above the acceptance number."""
    plan = SspPlan(5, 2)
    assert ssp_decide(plan, [True, True, True, False, False]).accepted is Hypothesis.H0
    assert ssp_decide(plan, [True, False, True, False, False]).accepted is Hypothesis.H1

    verdict = ssp_decide(SspPlan(1, 0), [True])
    assert verdict.holds
    assert verdict.method is TestMethod.SSP
    assert verdict.successes == 1


def test_decide_wrong_count():
    """Test that the number of outcomes must match the plan."""
    with pytest.raises(WrongSampleCount):
        ssp_decide(SspPlan(5, 2), [True, True])


def test_run_stops_once_decided():
    """Test curtailed sampling in both directions."""
    plan = SspPlan(5, 2)

    accepted = ssp_run(plan, iter([True] * 5))
    assert accepted.accepted is Hypothesis.H0
    assert accepted.samples_used == 3

    rejected = ssp_run(plan, iter([False] * 5))
    assert rejected.accepted is Hypothesis.H1
    assert rejected.samples_used == 3


def test_run_agrees_with_decide():
    """Test that stopping early never changes the decision."""
    plan = SspPlan(7, 3)
    outcomes = [True, False, False, True, False, True, True]
    assert ssp_run(plan, outcomes).accepted is ssp_decide(plan, outcomes).accepted


def test_run_exhausted_stream():
    """Test that a stream ending before the decision fails."""
    with pytest.raises(OutcomeStreamExhausted):
        ssp_run(SspPlan(5, 2), [True])


def test_plan_validation():
    """Test plan bounds."""
    with pytest.raises(ValueError):
        SspPlan(0, 0)
    with pytest.raises(ValueError):
        SspPlan(3, 4)
    assert str(SspPlan(12, 7)) == "n=12 c=7"
