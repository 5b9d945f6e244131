"""Single sampling plans.

A plan (n, c) draws n outcomes and accepts H0 (p >= p0) iff more than c of
them are successes. The plan search returns the smallest n for which some c
keeps both error probabilities within bounds:

    P[Bin(n, p0) <= c] <= alpha     (Type-I, rejecting H0 at p = p0)
    P[Bin(n, p1) >  c] <= beta      (Type-II, accepting H0 at p = p1)

Sen's variant, which accepts H0 when the success count exceeds a threshold
derived from normal approximations, is not provided; plans here always use the
exact binomial errors.
"""

import logging
from collections.abc import Iterable, Iterator, Sequence

import numpy as np

from src.core.binomial import binomial_cdf, binomial_sf, log_pmf_window
from src.core.config import DEFAULT_PLAN_N_MAX
from src.core.errors import (
    InvalidStrength,
    InvalidTestParams,
    OutcomeStreamExhausted,
    PlanSearchExhausted,
    WrongSampleCount,
)
from src.models.hypothesis import Hypothesis, SspPlan, TestMethod, TestParams, Verdict

logger = logging.getLogger(__name__)


def _feasible_c(n: int, p0: float, p1: float, log_alpha: float, log_beta: float) -> int | None:
    """Smallest acceptance number meeting both error bounds for size n, if any."""
    # Largest c with P[Bin(n, p0) <= c] <= alpha; the CDF grows with c
    start0, log_pmf0 = log_pmf_window(n, p0)
    log_cdf0 = np.logaddexp.accumulate(log_pmf0)
    c_max = start0 + int(np.searchsorted(log_cdf0, log_alpha, side="right")) - 1

    # Smallest c with P[Bin(n, p1) > c] <= beta; tail[i] = ln P[X >= start1 + i]
    start1, log_pmf1 = log_pmf_window(n, p1)
    log_tail1 = np.logaddexp.accumulate(log_pmf1[::-1])[::-1]
    first_small_tail = start1 + int(np.searchsorted(-log_tail1, -log_beta, side="left"))
    c_min = first_small_tail - 1

    c_max = min(c_max, n)
    c_min = max(c_min, -1)
    return c_min if c_min <= c_max else None


def _total_variation(n: int, p0: float, p1: float) -> float:
    """Total variation distance between Bin(n, p0) and Bin(n, p1)."""
    start0, log_pmf0 = log_pmf_window(n, p0)
    start1, log_pmf1 = log_pmf_window(n, p1)
    lo = min(start0, start1)
    hi = max(start0 + len(log_pmf0), start1 + len(log_pmf1))
    pmf0 = np.zeros(hi - lo)
    pmf1 = np.zeros(hi - lo)
    pmf0[start0 - lo : start0 - lo + len(log_pmf0)] = np.exp(log_pmf0)
    pmf1[start1 - lo : start1 - lo + len(log_pmf1)] = np.exp(log_pmf1)
    return 0.5 * float(np.abs(pmf0 - pmf1).sum())


def ssp_plan(p0: float, p1: float, alpha: float, beta: float, n_max: int = DEFAULT_PLAN_N_MAX) -> SspPlan:
    """
    Find the smallest single sampling plan with the requested strength.

    Any plan meeting both bounds separates Bin(n, p0) from Bin(n, p1) by at
    least 1 - alpha - beta in total variation, and that distance never
    shrinks as n grows. A binary search over this necessary condition gives a
    lower bound on n; sizes are then checked upward from it.

    Args:
        p0: Lower end of H0, 0 <= p1 < p0 <= 1
        p1: Upper end of H1
        alpha: Type-I error bound in (0, 1)
        beta: Type-II error bound in (0, 1)
        n_max: Largest plan size considered

    Returns:
        Plan with minimal n; among acceptance numbers for that n, the smallest

    Raises:
        InvalidTestParams: If p1 >= p0 or either is outside [0, 1]
        InvalidStrength: If alpha or beta are outside (0, 1)
        PlanSearchExhausted: If no plan with n <= n_max exists
    """
    if not 0.0 <= p1 < p0 <= 1.0:
        raise InvalidTestParams(f"Need 0 <= p1 < p0 <= 1, got p0={p0}, p1={p1}")
    if not (0.0 < alpha < 1.0 and 0.0 < beta < 1.0):
        raise InvalidStrength(f"alpha and beta must be in (0, 1), got alpha={alpha}, beta={beta}")

    log_alpha = float(np.log(alpha))
    log_beta = float(np.log(beta))
    required_distance = 1.0 - alpha - beta

    lo, hi = 1, n_max
    if _total_variation(hi, p0, p1) < required_distance:
        raise PlanSearchExhausted(
            f"No single sampling plan with n <= {n_max} for p0={p0}, p1={p1}, alpha={alpha}, beta={beta}"
        )
    while lo < hi:
        mid = (lo + hi) // 2
        if _total_variation(mid, p0, p1) >= required_distance:
            hi = mid
        else:
            lo = mid + 1

    logger.debug(f"Plan search starts at n={lo} (total variation bound)")
    for n in range(lo, n_max + 1):
        c = _feasible_c(n, p0, p1, log_alpha, log_beta)
        if c is not None:
            plan = SspPlan(n, c)
            logger.debug(f"Single sampling plan for p0={p0}, p1={p1}: {plan}")
            return plan

    raise PlanSearchExhausted(
        f"No single sampling plan with n <= {n_max} for p0={p0}, p1={p1}, alpha={alpha}, beta={beta}"
    )


def ssp_errors(plan: SspPlan, p0: float, p1: float) -> tuple[float, float]:
    """
    Exact error probabilities of a plan.

    Returns:
        (P[reject H0 | p = p0], P[accept H0 | p = p1])
    """
    return binomial_cdf(plan.c, plan.n, p0), binomial_sf(plan.c, plan.n, p1)


def ssp_decide(plan: SspPlan, outcomes: Sequence[bool], params: TestParams | None = None) -> Verdict:
    """
    Apply a plan to exactly ``plan.n`` outcomes.

    Raises:
        WrongSampleCount: If the number of outcomes differs from the plan size
    """
    if len(outcomes) != plan.n:
        raise WrongSampleCount(f"Plan {plan} needs {plan.n} outcomes, got {len(outcomes)}")

    successes = sum(1 for outcome in outcomes if outcome)
    accepted = Hypothesis.H0 if successes > plan.c else Hypothesis.H1
    return Verdict(accepted, plan.n, params, TestMethod.SSP, successes)


def ssp_run(plan: SspPlan, outcome_stream: Iterable[bool], params: TestParams | None = None) -> Verdict:
    """
    Draw ``plan.n`` outcomes from a stream and decide.

    Sampling stops early once the decision can no longer change.

    Raises:
        OutcomeStreamExhausted: If the stream ends before the decision
    """
    outcomes: Iterator[bool] = iter(outcome_stream)
    successes = 0
    for drawn in range(1, plan.n + 1):
        try:
            outcome = next(outcomes)
        except StopIteration:
            raise OutcomeStreamExhausted(f"Stream ended after {drawn - 1} of {plan.n} outcomes") from None
        successes += bool(outcome)
        remaining = plan.n - drawn
        if successes > plan.c:
            return Verdict(Hypothesis.H0, drawn, params, TestMethod.SSP, successes)
        if successes + remaining <= plan.c:
            return Verdict(Hypothesis.H1, drawn, params, TestMethod.SSP, successes)

    raise AssertionError("unreachable: a full plan always decides")
