"""Tests for verification from recorded traces."""

import numpy as np
import pytest
from scipy import stats

from src.core.binomial import binomial_cdf
from src.core.blackbox import choose_blackbox_c, verify_blackbox
from src.core.errors import InvalidTestParams, NestedNotSupported, TraceTooShort, UnsupportedFormula
from src.core.formula_parser import parse_formula
from src.core.simulator import Trace
from src.models.hypothesis import Hypothesis, TestMethod

REACH_GOAL = "P>=0.5 [ F<=1 goal ]"


def _coin_traces(hits: int, total: int) -> list[Trace]:
    """``hits`` traces that reach the goal and ``total - hits`` that miss it."""
    return [Trace.discrete([0, 1]) for _ in range(hits)] + [Trace.discrete([0, 2]) for _ in range(total - hits)]


def test_acceptance_number_balances_verdicts():
    """Test the choice of c for small plans; ties go to the smaller c."""
    assert choose_blackbox_c(10, 0.5) == 4
    assert choose_blackbox_c(1, 0.5) == 0


@pytest.mark.parametrize(("n", "theta"), [(4, 0.25), (25, 0.9), (200, 0.37), (3, 0.01)])
def test_acceptance_number_matches_exhaustive_search(n, theta):
    """Test c against the CDF table of every candidate."""
    candidates = list(range(-1, n + 1))
    distances = [abs(stats.binom.cdf(c, n, theta) - 0.5) for c in candidates]
    assert choose_blackbox_c(n, theta) == candidates[distances.index(min(distances))]


def test_acceptance_number_validation():
    """Test the ranges of n and theta."""
    with pytest.raises(ValueError):
        choose_blackbox_c(0, 0.5)
    with pytest.raises(InvalidTestParams):
        choose_blackbox_c(10, 1.0)


def test_most_traces_satisfy(coin_model):
    """Test that 8 successes out of 10 exceed c = 4."""
    report = verify_blackbox(_coin_traces(8, 10), coin_model, parse_formula(REACH_GOAL))

    assert report.verdict is Hypothesis.H0
    assert report.method is TestMethod.SSP
    assert report.blackbox.n == 10
    assert report.blackbox.c == 4
    assert report.blackbox.successes == 8
    assert report.type1 == pytest.approx(binomial_cdf(4, 10, 0.5))
    assert report.type2 == pytest.approx(1 - binomial_cdf(4, 10, 0.5))
    assert report.samples_used == 10


def test_few_traces_satisfy(coin_model):
    """Test that 3 successes out of 10 do not exceed c = 4."""
    report = verify_blackbox(_coin_traces(3, 10), coin_model, parse_formula(REACH_GOAL))
    assert report.verdict is Hypothesis.H1


def test_single_trace(coin_model):
    """Test that one satisfying trace is accepted with c = 0."""
    report = verify_blackbox(_coin_traces(1, 1), coin_model, parse_formula(REACH_GOAL))
    assert report.holds
    assert report.blackbox.c == 0


def test_negated_formula(coin_model):
    """Test that negation inverts the verdict and swaps the errors."""
    traces = _coin_traces(8, 10)
    plain = verify_blackbox(traces, coin_model, parse_formula(REACH_GOAL))
    negated = verify_blackbox(traces, coin_model, parse_formula("!" + REACH_GOAL))

    assert negated.holds != plain.holds
    assert (negated.type1, negated.type2) == (plain.type2, plain.type1)
    assert negated.formula.startswith("!")


def test_threshold_override(coin_model):
    """Test that an explicit theta replaces the formula's threshold."""
    report = verify_blackbox(_coin_traces(8, 10), coin_model, parse_formula(REACH_GOAL), theta=0.95)

    assert report.blackbox.theta == 0.95
    assert report.blackbox.c == 9
    assert not report.holds
    assert any("overrides" in warning for warning in report.warnings)


def test_probabilities_ignored_warning(coin_model):
    """Test that the report says the model only supplies labels."""
    report = verify_blackbox(_coin_traces(8, 10), coin_model, parse_formula(REACH_GOAL))
    assert any("probabilities are ignored" in warning for warning in report.warnings)


def test_nested_operator_rejected(coin_model):
    """Test that inner operators cannot be decided on recorded traces."""
    with pytest.raises(NestedNotSupported):
        verify_blackbox(_coin_traces(8, 10), coin_model, parse_formula("P>=0.5 [ F<=1 P>=0.5 [ X goal ] ]"))


def test_root_must_be_operator(coin_model):
    """Test that only a single, possibly negated, operator is accepted."""
    with pytest.raises(UnsupportedFormula):
        verify_blackbox(_coin_traces(8, 10), coin_model, parse_formula("goal & " + REACH_GOAL))


def test_short_traces(coin_model):
    """Test that traces must cover the bound unless they are absorbed."""
    formula = parse_formula("P>=0.5 [ F<=3 goal ]")
    with pytest.raises(TraceTooShort):
        verify_blackbox(_coin_traces(8, 10), coin_model, formula)

    extended = [Trace.discrete(trace.states, absorbed=True) for trace in _coin_traces(8, 10)]
    assert verify_blackbox(extended, coin_model, formula).holds


def test_no_traces(coin_model):
    """Test that an empty trace set is rejected."""
    with pytest.raises(ValueError):
        verify_blackbox([], coin_model, parse_formula(REACH_GOAL))


@pytest.mark.slow
def test_verdicts_on_well_separated_trace_sets(coin_model):
    """Test that trace sets whose success rate is 3/sqrt(n) away from theta are decided on the right side."""
    rng = np.random.default_rng(77)
    formula = parse_formula(REACH_GOAL)
    instances = 1_000
    correct = 0
    for _ in range(instances):
        n = int(rng.integers(20, 301))
        theta = float(rng.uniform(0.2, 0.8))
        above = bool(rng.random() < 0.5)
        rate = float(np.clip(theta + (3 if above else -3) / np.sqrt(n), 0.0, 1.0))

        report = verify_blackbox(_coin_traces(int(rng.binomial(n, rate)), n), coin_model, formula, theta)
        correct += report.holds == above

    assert correct / instances >= 0.95
