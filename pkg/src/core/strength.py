"""Monte Carlo estimation of the strength of a test.

Repeats a test many times on synthetic Bernoulli(true_p) outcomes and counts
how often it reaches the wrong decision. A decision is wrong when true_p lies
in H0 (true_p >= p0) and H1 is accepted, or when true_p lies in H1
(true_p <= p1) and H0 is accepted. Inside the indifference region either
decision is acceptable, so the error rate there is 0.
"""

import logging
from dataclasses import dataclass

import numpy as np
from tqdm import tqdm

from src.core.config import DEFAULT_MAX_SAMPLES
from src.core.errors import MaxSamplesExceeded
from src.core.random_streams import SampleKey, make_stream
from src.core.ssp import ssp_errors, ssp_plan
from src.core.sprt import sprt_expected_samples, wald_bounds
from src.models.hypothesis import SspPlan, TestMethod, TestParams

logger = logging.getLogger(__name__)

# Outcomes drawn per undecided repetition and round
_SPRT_CHUNK = 64


@dataclass(frozen=True)
class StrengthEstimate:
    """Result of a strength experiment.

    Attributes:
        error_rate: Fraction of repetitions that reached the wrong decision
        mean_samples: Average number of outcomes consumed per repetition
        reps: Number of repetitions
        errors: Number of wrong decisions
        type1_bound: Theoretical bound on the Type-I error
        type2_bound: Theoretical bound on the Type-II error
        expected_samples: Wald's approximation of the mean sample count (SPRT only)
        plan: Plan used (SSP only)
    """

    error_rate: float
    mean_samples: float
    reps: int
    errors: int
    type1_bound: float
    type2_bound: float
    expected_samples: float | None = None
    plan: SspPlan | None = None

    @property
    def standard_error(self) -> float:
        """Binomial standard error of ``error_rate``."""
        return float(np.sqrt(self.error_rate * (1.0 - self.error_rate) / self.reps))


def estimate_strength(
    params: TestParams,
    method: TestMethod,
    true_p: float,
    reps: int,
    seed: int = 0,
    max_samples: int = DEFAULT_MAX_SAMPLES,
    plan: SspPlan | None = None,
    progress: bool = False,
) -> StrengthEstimate:
    """
    Measure the empirical error rate and sample cost of a test.

    Args:
        params: Region and strength of the test
        method: ``ssp`` or ``sprt``
        true_p: Success probability of the synthetic outcomes
        reps: Number of independent repetitions (>= 1)
        seed: Seed of the outcome stream
        max_samples: Sample cap of each sequential test
        plan: SSP plan to use; synthesized from ``params`` when omitted
        progress: Show a progress bar on standard error

    Returns:
        Error rate, mean samples and the theoretical bounds for comparison

    Raises:
        ValueError: If reps < 1 or true_p is outside [0, 1]
        MaxSamplesExceeded: If a sequential repetition does not decide in time
    """
    if reps < 1:
        raise ValueError(f"Need at least one repetition, got {reps}")
    if not 0.0 <= true_p <= 1.0:
        raise ValueError(f"true_p must be in [0, 1], got {true_p}")

    generator = make_stream(SampleKey(seed, (0,)))
    method = TestMethod(method)

    if method is TestMethod.SSP:
        plan = plan or ssp_plan(params.p0, params.p1, params.alpha, params.beta)
        successes = generator.binomial(plan.n, true_p, size=reps)
        accepted_h0 = successes > plan.c
        samples = np.full(reps, plan.n)
        type1_bound, type2_bound = ssp_errors(plan, params.p0, params.p1)
        expected = None
    else:
        accepted_h0, samples = _run_sprt_batch(params, true_p, reps, generator, max_samples, progress)
        type1_bound = params.alpha / (1.0 - params.beta)
        type2_bound = params.beta / (1.0 - params.alpha)
        expected = sprt_expected_samples(params, true_p)
        plan = None

    if true_p >= params.p0:
        errors = int(np.count_nonzero(~accepted_h0))
    elif true_p <= params.p1:
        errors = int(np.count_nonzero(accepted_h0))
    else:
        errors = 0

    estimate = StrengthEstimate(
        error_rate=errors / reps,
        mean_samples=float(np.mean(samples)),
        reps=reps,
        errors=errors,
        type1_bound=type1_bound,
        type2_bound=type2_bound,
        expected_samples=expected,
        plan=plan,
    )
    logger.info(
        f"{method} at true_p={true_p}: error rate {estimate.error_rate:.4f} "
        f"({errors}/{reps}), mean samples {estimate.mean_samples:.2f}"
    )
    return estimate


def _run_sprt_batch(
    params: TestParams,
    true_p: float,
    reps: int,
    generator: np.random.Generator,
    max_samples: int,
    progress: bool,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Run ``reps`` sequential tests side by side.

    Each round draws a block of outcomes for every undecided repetition and
    finds, per repetition, the first count at which the log ratio leaves
    (ln B, ln A). The decisions equal those of running the tests one outcome
    at a time.

    Returns:
        (accepted H0 per repetition, samples used per repetition)
    """
    log_a, log_b = wald_bounds(params.alpha, params.beta)
    with np.errstate(divide="ignore"):
        success_step = np.log(params.p1) - np.log(params.p0)
        failure_step = np.log1p(-params.p1) - np.log1p(-params.p0)

    accepted_h0 = np.zeros(reps, dtype=bool)
    samples = np.zeros(reps, dtype=np.int64)
    successes = np.zeros(reps, dtype=np.int64)
    active = np.arange(reps)
    offset = 0

    with tqdm(total=reps, desc="repetitions", unit="test", disable=not progress, leave=False) as bar:
        while active.size:
            if offset >= max_samples:
                raise MaxSamplesExceeded(
                    f"{active.size} of {reps} repetitions undecided after {max_samples} samples"
                )
            block = min(_SPRT_CHUNK, max_samples - offset)
            draws = generator.random((active.size, block)) < true_p
            d = successes[active, None] + np.cumsum(draws, axis=1)
            m = offset + np.arange(1, block + 1)
            failures = m[None, :] - d

            # 0 * inf is 0: a count of zero contributes nothing
            with np.errstate(invalid="ignore"):
                log_ratio = np.where(d > 0, d * success_step, 0.0)
                log_ratio += np.where(failures > 0, failures * failure_step, 0.0)

            hit_h1 = log_ratio >= log_a
            hit_h0 = log_ratio <= log_b
            decided = hit_h1 | hit_h0
            any_decided = decided.any(axis=1)
            first = decided.argmax(axis=1)

            done = active[any_decided]
            rows = np.flatnonzero(any_decided)
            accepted_h0[done] = hit_h0[rows, first[rows]]
            samples[done] = offset + first[rows] + 1

            successes[active] = d[:, -1]
            active = active[~any_decided]
            offset += block
            bar.update(done.size)

    return accepted_h0, samples
