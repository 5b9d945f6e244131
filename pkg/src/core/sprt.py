"""Wald's sequential probability ratio test for Bernoulli outcomes.

After m outcomes with d_m successes the test tracks

    log_ratio = d_m ln(p1/p0) + (m - d_m) ln((1-p1)/(1-p0))

the log-likelihood ratio of H1 (p = p1) against H0 (p = p0). Large values
favour H1: the test accepts H1 once ``log_ratio >= ln A`` and H0 once
``log_ratio <= ln B``, with A = (1-beta)/alpha and B = beta/(1-alpha). This is
the usual Wald orientation; reading the decision rule the other way round
would accept the hypothesis the data speaks against.

With these thresholds the realised strength (alpha', beta') satisfies
alpha' <= alpha/(1-beta), beta' <= beta/(1-alpha) and alpha' + beta' <= alpha + beta.
"""

import logging
import math
from collections.abc import Iterable

from scipy.optimize import brentq

from src.core.config import DEFAULT_MAX_SAMPLES, PROGRESS_LOG_INTERVAL
from src.core.errors import AlreadyDecided, InvalidStrength, MaxSamplesExceeded, OutcomeStreamExhausted
from src.models.hypothesis import Hypothesis, SprtState, TestMethod, TestParams, Verdict

logger = logging.getLogger(__name__)


def wald_bounds(alpha: float, beta: float) -> tuple[float, float]:
    """
    Log decision thresholds (ln A, ln B) for strength (alpha, beta).

    Raises:
        InvalidStrength: If alpha or beta are outside (0, 1), or alpha + beta >= 1 (ln A <= ln B)
    """
    if not (0.0 < alpha < 1.0 and 0.0 < beta < 1.0):
        raise InvalidStrength(f"alpha and beta must be in (0, 1), got alpha={alpha}, beta={beta}")
    log_a = math.log1p(-beta) - math.log(alpha)
    log_b = math.log(beta) - math.log1p(-alpha)
    if log_a <= log_b:
        raise InvalidStrength(
            f"alpha + beta must be below 1 for a sequential test, got alpha={alpha}, beta={beta}"
        )
    return log_a, log_b


def _log_term(count: int, numerator: float, denominator: float) -> float:
    """``count * ln(numerator / denominator)`` with 0 * ln(0) taken as 0."""
    if count == 0:
        return 0.0
    if numerator == 0.0:
        return -math.inf
    if denominator == 0.0:
        return math.inf
    return count * (math.log(numerator) - math.log(denominator))


def sprt_log_ratio(m: int, d_m: int, params: TestParams) -> float:
    """Closed-form log-likelihood ratio after m outcomes with d_m successes."""
    return _log_term(d_m, params.p1, params.p0) + _log_term(m - d_m, 1.0 - params.p1, 1.0 - params.p0)


def sprt_start(params: TestParams) -> SprtState:
    """Initial state of a test with the given parameters."""
    log_a, log_b = wald_bounds(params.alpha, params.beta)
    return SprtState(m=0, d_m=0, log_ratio=0.0, log_a=log_a, log_b=log_b)


def sprt_step(state: SprtState, params: TestParams, outcome: bool) -> SprtState:
    """
    Fold one outcome into the test.

    A success when p1 = 0 drives the ratio to -inf (immediate H0); a failure
    when p0 = 1 drives it to +inf (immediate H1).

    Raises:
        AlreadyDecided: If the test has already reached a decision
    """
    if state.decision is not None:
        raise AlreadyDecided(f"Test already accepted {state.decision} after {state.m} samples")

    m = state.m + 1
    d_m = state.d_m + (1 if outcome else 0)
    log_ratio = sprt_log_ratio(m, d_m, params)

    decision = None
    if log_ratio >= state.log_a:
        decision = Hypothesis.H1
    elif log_ratio <= state.log_b:
        decision = Hypothesis.H0

    return SprtState(m, d_m, log_ratio, state.log_a, state.log_b, decision)


def sprt_run(params: TestParams, outcome_stream: Iterable[bool], max_samples: int = DEFAULT_MAX_SAMPLES) -> Verdict:
    """
    Run a sequential test on a stream of outcomes until it decides.

    Args:
        params: Region and strength of the test
        outcome_stream: Outcomes in sample-index order
        max_samples: Observations after which an undecided test fails

    Returns:
        Verdict with the number of outcomes consumed

    Raises:
        MaxSamplesExceeded: If no decision is reached within ``max_samples`` outcomes
        OutcomeStreamExhausted: If the stream ends first
    """
    state = sprt_start(params)

    for outcome in outcome_stream:
        state = sprt_step(state, params, outcome)
        if state.decision is not None:
            return Verdict(state.decision, state.m, params, TestMethod.SPRT, state.d_m)

        if state.m % PROGRESS_LOG_INTERVAL == 0:
            logger.debug(
                f"SPRT p0={params.p0} p1={params.p1}: {state.m} samples, {state.d_m} successes, "
                f"log ratio {state.log_ratio:.4f} in ({state.log_b:.4f}, {state.log_a:.4f})"
            )
        if state.m >= max_samples:
            raise MaxSamplesExceeded(
                f"No decision after {max_samples} samples (p0={params.p0}, p1={params.p1}, "
                f"{state.d_m} successes); widen the indifference region or raise the sample limit"
            )

    raise OutcomeStreamExhausted(f"Outcome stream ended after {state.m} samples without a decision")


# Wald's approximations of the operating characteristic and average sample number


def _increments(params: TestParams) -> tuple[float, float] | None:
    """Log-ratio increments on success and failure, or None for a degenerate region."""
    if params.p1 == 0.0 or params.p0 == 1.0:
        return None
    return math.log(params.p1 / params.p0), math.log((1.0 - params.p1) / (1.0 - params.p0))


def _wald_exponent(p: float, up: float, down: float) -> float:
    """Non-zero root h of p e^(h up) + (1-p) e^(h down) = 1."""

    def moment(h: float) -> float:
        return p * math.expm1(h * up) + (1.0 - p) * math.expm1(h * down)

    drift = p * up + (1.0 - p) * down
    direction = 1.0 if drift < 0 else -1.0

    outer = direction
    while moment(outer) <= 0.0:
        outer *= 2.0
    inner = outer / 2.0
    while moment(inner) >= 0.0 and abs(inner) > 1e-12:
        inner /= 2.0
    return brentq(moment, min(inner, outer), max(inner, outer))


def sprt_operating_characteristic(params: TestParams, p: float) -> float:
    """
    Approximate probability that the test accepts H0 when the true success
    probability is ``p``.

    Returns NaN for regions with p1 = 0 or p0 = 1, where the test decides on
    the first contrary outcome and the approximation does not apply.
    """
    increments = _increments(params)
    if increments is None:
        return math.nan
    up, down = increments
    log_a, log_b = wald_bounds(params.alpha, params.beta)

    if p <= 0.0:
        return 0.0
    if p >= 1.0:
        return 1.0

    drift = p * up + (1.0 - p) * down
    if abs(drift) < 1e-12:
        return log_a / (log_a - log_b)

    h = _wald_exponent(p, up, down)
    if h > 0:
        return -math.expm1(-h * log_a) / -math.expm1(h * (log_b - log_a))
    accept_h1 = math.expm1(-h * log_b) / math.expm1(h * (log_a - log_b))
    return 1.0 - accept_h1


def sprt_expected_samples(params: TestParams, p: float) -> float:
    """
    Wald's approximation of the average number of samples the test takes.

    Overshoot of the thresholds is ignored, so the value is usually a little
    below the observed mean. NaN for degenerate regions.
    """
    increments = _increments(params)
    if increments is None:
        return math.nan
    up, down = increments
    log_a, log_b = wald_bounds(params.alpha, params.beta)

    drift = p * up + (1.0 - p) * down
    if abs(drift) < 1e-12:
        second_moment = p * up * up + (1.0 - p) * down * down
        return -log_a * log_b / second_moment

    accept_h0 = sprt_operating_characteristic(params, p)
    return (accept_h0 * log_b + (1.0 - accept_h0) * log_a) / drift
