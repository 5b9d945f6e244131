"""Verification from a fixed set of recorded traces.

Without access to the system no further samples can be drawn, so the test is
a single sampling plan whose size is the number of traces and whose acceptance
number balances the chances of both verdicts when the true probability equals
the threshold. There is no indifference region; the report instead states the
error probabilities the plan achieves at the threshold.
"""

import logging
import time
from collections.abc import Sequence

import numpy as np

from src.core.binomial import binomial_cdf, log_pmf_window
from src.core.config import BLACKBOX_TIE_TOLERANCE
from src.core.errors import InvalidTestParams, NestedNotSupported, UnsupportedFormula
from src.core.formula_parser import render_formula
from src.core.property_logic import EvalContext, eval_path, required_depth
from src.core.simulator import Trace
from src.core.ssp import ssp_decide
from src.core.verifier import unknown_atoms
from src.models.formula import Formula, Not, Prob, contains_prob, path_operands
from src.models.hypothesis import Hypothesis, SspPlan, TestMethod
from src.models.markov_chain import Model
from src.models.verification import BlackboxSummary, LevelReport, Report

logger = logging.getLogger(__name__)


def choose_blackbox_c(n: int, theta: float) -> int:
    """
    Acceptance number whose binomial CDF at ``theta`` is closest to 1/2.

    Candidates run from -1 to n; distances within ``BLACKBOX_TIE_TOLERANCE``
    count as ties and go to the smaller c.

    Args:
        n: Number of traces (>= 1)
        theta: Threshold in (0, 1)

    Returns:
        Acceptance number c in [-1, n]
    """
    if n < 1:
        raise ValueError(f"Need at least one trace, got {n}")
    if not 0.0 < theta < 1.0:
        raise InvalidTestParams(f"Black-box threshold must be in (0, 1), got {theta}")

    # Counts below the window have CDF ~0, which is no closer to 1/2 than c = -1
    start, log_pmf = log_pmf_window(n, theta)
    cdf = np.minimum(1.0, np.exp(np.logaddexp.accumulate(log_pmf)))
    candidates = np.concatenate(([-1], np.arange(start, start + len(cdf))))
    distances = np.abs(np.concatenate(([0.0], cdf)) - 0.5)

    best = distances.min()
    index = int(np.flatnonzero(distances <= best + BLACKBOX_TIE_TOLERANCE)[0])
    return int(candidates[index])


def _split_root(formula: Formula) -> tuple[Prob, bool]:
    """The probabilistic operator at the root and whether it is negated."""
    negated = False
    node = formula
    if isinstance(node, Not):
        negated, node = True, node.operand
    if not isinstance(node, Prob):
        raise UnsupportedFormula(
            "Black-box verification needs a single probabilistic operator at the root, optionally negated"
        )
    if any(contains_prob(operand) for operand in path_operands(node.path)):
        raise NestedNotSupported("Nested probabilistic operators cannot be checked on recorded traces")
    return node, negated


def verify_blackbox(
    traces: Sequence[Trace],
    model: Model,
    formula: Formula,
    theta: float | None = None,
) -> Report:
    """
    Decide a formula from recorded traces.

    Args:
        traces: Traces starting in the initial state of the system
        model: Model supplying the state labels; its probabilities are not used
        formula: ``P>=theta [ path ]`` or its negation, without nested operators
        theta: Threshold overriding the one in the formula

    Returns:
        Report whose type1/type2 are the plan's error probabilities at theta

    Raises:
        NestedNotSupported: If the path formula contains a probabilistic operator
        TraceTooShort: If a trace ends before the bound of the path formula
    """
    started = time.perf_counter()
    prob, negated = _split_root(formula)
    if not traces:
        raise ValueError("No traces given")

    warnings = ["Black-box mode uses only the labels of the model; its probabilities are ignored"]
    if theta is not None and theta != prob.theta:
        warnings.append(f"Threshold {theta} overrides {prob.theta} from the formula")
        prob = Prob(theta, prob.path, prob.node_id)
    for name in unknown_atoms(model, formula):
        warnings.append(f"Atom '{name}' labels no state of the model and is false everywhere")
    for message in warnings:
        logger.warning(message)

    required_depth(prob, model.kind)
    ctx = EvalContext(model)
    outcomes = [eval_path(prob.path, trace, ctx).holds for trace in traces]

    n = len(outcomes)
    c = choose_blackbox_c(n, prob.theta)
    verdict = ssp_decide(SspPlan(n, c), outcomes)
    type1 = binomial_cdf(c, n, prob.theta)
    type2 = 1.0 - type1

    holds = verdict.holds != negated
    if negated:
        type1, type2 = type2, type1
    logger.info(
        f"{verdict.successes} of {n} traces satisfy the path formula; plan c={c} accepts {verdict.accepted} "
        f"for P>={prob.theta}"
    )

    level = LevelReport(
        level=0,
        node_id=prob.node_id,
        theta=prob.theta,
        p0=prob.theta,
        p1=prob.theta,
        method=TestMethod.SSP,
        tests=1,
        samples=n,
        accepted_h0=int(verdict.holds),
        accepted_h1=int(not verdict.holds),
    )
    return Report(
        verdict=Hypothesis.H0 if holds else Hypothesis.H1,
        formula=render_formula(Not(prob) if negated else prob),
        method=TestMethod.SSP,
        type1=type1,
        type2=type2,
        levels=[level],
        elapsed_seconds=time.perf_counter() - started,
        warnings=warnings,
        blackbox=BlackboxSummary(n=n, c=c, successes=verdict.successes, theta=prob.theta),
    )
