"""Statistical verification of probabilistic formulas on Markov chains.

The outermost probabilistic operators are decided by hypothesis tests on
simulated traces. A probabilistic operator nested inside a path formula is
decided by an inner test in every state where the path formula needs it; the
inner verdict may be wrong, so the outer test works on thresholds moved
inward by the largest error an inner decision can contribute to one trace.
"""

import logging
import math
import threading
import time
from collections.abc import Callable, Iterator
from concurrent.futures import Executor, Future, ThreadPoolExecutor
from itertools import count

from src.core.config import SAMPLE_BATCH_SIZE
from src.core.errors import InvalidStrength, InvalidTestParams, RegionCollapsed
from src.core.formula_parser import format_number, render_formula
from src.core.property_logic import (
    EvalContext,
    StateVerdict,
    eval_path,
    eval_state,
    path_error_bound,
    required_depth,
    top_level_probs,
)
from src.core.random_streams import SampleKey
from src.core.simulator import sample_path
from src.core.sprt import sprt_run
from src.core.ssp import ssp_plan, ssp_run
from src.models.formula import Formula, Prob, iter_atoms, path_operands
from src.models.hypothesis import Hypothesis, TestMethod, TestParams, Verdict
from src.models.markov_chain import Model, StateId
from src.models.verification import LevelReport, Report, VerifyConfig

logger = logging.getLogger(__name__)


def nested_thresholds(theta: float, delta: float, alpha_inner: float, beta_inner: float) -> tuple[float, float]:
    """
    Indifference region an outer test must use when its trace outcomes rely
    on inner decisions with errors (alpha_inner, beta_inner).

    A trace satisfying the path formula is observed as a success with
    probability at least 1 - alpha_inner, a violating one with probability at
    most beta_inner. A true probability p >= theta + delta therefore shows up
    as at least (theta + delta)(1 - alpha_inner), and p <= theta - delta as at
    most 1 - (1 - (theta - delta))(1 - beta_inner).

    Args:
        theta: Threshold of the outer operator
        delta: Half-width of the outer indifference region
        alpha_inner: Type-I error of the inner decisions, in [0, 1)
        beta_inner: Type-II error of the inner decisions, in [0, 1)

    Returns:
        Adjusted (p0, p1)

    Raises:
        RegionCollapsed: If the adjusted region is empty (p0 <= p1)
    """
    for name, value in (("alpha_inner", alpha_inner), ("beta_inner", beta_inner)):
        if not 0.0 <= value < 1.0:
            raise InvalidStrength(f"{name} must be in [0, 1), got {value}")
    if not 0.0 <= theta <= 1.0:
        raise InvalidTestParams(f"theta must be in [0, 1], got {theta}")
    if not (delta >= 0.0 and math.isfinite(delta)):
        raise InvalidTestParams(f"delta must be non-negative, got {delta}")

    p0 = min(1.0, theta + delta)
    p1 = max(0.0, theta - delta)
    p0_adjusted = p0 * (1.0 - alpha_inner)
    p1_adjusted = 1.0 - (1.0 - p1) * (1.0 - beta_inner)
    if p0_adjusted <= p1_adjusted:
        raise RegionCollapsed(
            f"Indifference region around {theta} collapses to [{p1_adjusted:.6g}, {p0_adjusted:.6g}] with inner "
            f"errors ({alpha_inner}, {beta_inner}); tighten the inner alpha/beta or widen delta"
        )
    return p0_adjusted, p1_adjusted


def _nesting_levels(formula: Formula) -> dict[int, int]:
    """Nesting depth of every probabilistic operator, keyed by node id."""
    levels: dict[int, int] = {}

    def visit(node: Formula, depth: int) -> None:
        for prob in top_level_probs(node):
            levels[prob.node_id] = depth
            for operand in path_operands(prob.path):
                visit(operand, depth + 1)

    visit(formula, 0)
    return levels


class _Verification:
    """State of one verification run: statistics, memo and the prob checker.

    Outermost samples may be evaluated on several threads; statistics and the
    memo are shared between them under ``_lock``. A memo entry is a future
    filled by the first thread that needs it, so every (state, operator) pair
    is tested at most once.
    """

    def __init__(self, model: Model, formula: Formula, config: VerifyConfig, executor: Executor | None = None):
        self.model = model
        self.formula = formula
        self.config = config
        self.executor = executor
        self.levels = _nesting_levels(formula)
        self.top_level = top_level_probs(formula)
        self.stats: dict[int, LevelReport] = {}
        self.memo: dict[tuple[StateId, int], Future[StateVerdict]] = {}
        self._lock = threading.Lock()

    def strength(self, level: int) -> tuple[float, float, float, TestMethod]:
        """(alpha, beta, delta, method) used for operators at a nesting level."""
        config = self.config
        if level == 0:
            return config.alpha, config.beta, config.delta, config.method
        return config.inner_alpha, config.inner_beta, config.inner_delta, TestMethod.SPRT

    def params_for(self, prob: Prob) -> TestParams | None:
        """
        Test parameters of an operator, with thresholds adjusted for the
        errors inner decisions may add to each trace outcome.

        Returns None for theta = 0, which holds without sampling.
        """
        if prob.theta == 0.0:
            return None
        level = self.levels[prob.node_id]
        alpha, beta, delta, _ = self.strength(level)
        inner_alpha, inner_beta, _, _ = self.strength(level + 1)

        def inner_errors(inner: Prob) -> tuple[float, float]:
            return (0.0, 0.0) if inner.theta == 0.0 else (inner_alpha, inner_beta)

        type1, type2 = path_error_bound(prob.path, inner_errors, self.config.composition_mode)
        nominal = TestParams.for_threshold(prob.theta, delta, alpha, beta)
        p0, p1 = nested_thresholds(prob.theta, delta, type1, type2)
        return TestParams(p0, p1, nominal.alpha, nominal.beta, theta=prob.theta, delta=delta)

    def check(self, prob: Prob, state: StateId, ctx: EvalContext) -> StateVerdict:
        """Decide ``prob`` in ``state`` with a hypothesis test (the prob checker)."""
        params = self.params_for(prob)
        stats = self._level_stats(prob, params)
        key_for = self._keys(prob, state, ctx)
        if not self.config.memoize:
            return self._decide(prob, state, params, key_for)

        with self._lock:
            pending = self.memo.get((state, prob.node_id))
            owner = pending is None
            if owner:
                pending = self.memo[(state, prob.node_id)] = Future()
            else:
                stats.memo_hits += 1

        if not owner:
            logger.debug(f"Memo hit for operator {prob.node_id} in state {state}")
            return pending.result()

        try:
            result = self._decide(prob, state, params, key_for)
        except BaseException as error:
            pending.set_exception(error)
            raise
        pending.set_result(result)
        return result

    def _keys(self, prob: Prob, state: StateId, ctx: EvalContext) -> Callable[[int], SampleKey]:
        """
        Stream keys of the samples of one test of ``prob`` in ``state``.

        A memoized nested test is keyed by its state and operator, so its
        verdict does not depend on which trace asked for it first. Without the
        memo it is a sub-stream of the asking trace at the asking position.
        """
        seed = self.config.seed
        if self.levels[prob.node_id] == 0:
            if len(self.top_level) == 1:
                return lambda i: SampleKey(seed, (i,))
            return lambda i: SampleKey(seed, (prob.node_id, i))

        if self.config.memoize:
            return lambda r: SampleKey(seed, (prob.node_id, state, r))

        if ctx.key is None:
            raise RuntimeError("Nested operator evaluated without the key of its trace")
        parent, position = ctx.key, ctx.position
        return lambda r: parent.child(position, prob.node_id, r)

    def _level_stats(self, prob: Prob, params: TestParams | None) -> LevelReport:
        with self._lock:
            stats = self.stats.get(prob.node_id)
            if stats is None:
                level = self.levels[prob.node_id]
                _, _, _, method = self.strength(level)
                p0 = params.p0 if params else 0.0
                p1 = params.p1 if params else 0.0
                stats = LevelReport(level, prob.node_id, prob.theta, p0, p1, method)
                self.stats[prob.node_id] = stats
            return stats

    def _decide(
        self, prob: Prob, state: StateId, params: TestParams | None, key_for: Callable[[int], SampleKey]
    ) -> StateVerdict:
        stats = self.stats[prob.node_id]

        if params is None:
            # P>=0 holds everywhere; the verdict is exact
            verdict = Verdict(Hypothesis.H0, 0, None, stats.method)
            errors = (0.0, 0.0)
        else:
            outcomes = self._outcomes(prob, state, key_for)
            if stats.method is TestMethod.SSP:
                plan = ssp_plan(params.p0, params.p1, params.alpha, params.beta, self.config.plan_n_max)
                if stats.tests == 0:
                    logger.info(f"Single sampling plan for operator {prob.node_id}: {plan}")
                verdict = ssp_run(plan, outcomes, params)
            else:
                verdict = sprt_run(params, outcomes, self.config.max_samples)
            alpha, beta, _, _ = self.strength(self.levels[prob.node_id])
            errors = (alpha, beta)

        with self._lock:
            stats.tests += 1
            stats.samples += verdict.samples_used
            if verdict.holds:
                stats.accepted_h0 += 1
            else:
                stats.accepted_h1 += 1
        return StateVerdict(verdict.holds, *errors)

    def _outcomes(self, prob: Prob, state: StateId, key_for: Callable[[int], SampleKey]) -> Iterator[bool]:
        """
        Path formula outcomes on fresh traces from ``state``, in sample order.

        With an executor, outermost samples are evaluated concurrently in
        whole batches of ``SAMPLE_BATCH_SIZE``; the test still consumes them in
        ascending index. Nested tests run on the thread of the trace that
        asked for them.
        """
        bound = required_depth(prob, self.model.kind, self.config.hard_cap)

        def outcome(i: int) -> bool:
            key = key_for(i)
            trace = sample_path(self.model, state, key, bound)
            ctx = EvalContext(self.model, self.check, key, 0, self.config.composition_mode)
            return eval_path(prob.path, trace, ctx).holds

        if self.executor is None or self.levels[prob.node_id] > 0:
            yield from map(outcome, count())
            return

        for start in count(0, SAMPLE_BATCH_SIZE):
            yield from list(self.executor.map(outcome, range(start, start + SAMPLE_BATCH_SIZE)))


def unknown_atoms(model: Model, formula: Formula) -> list[str]:
    """Atom names used in ``formula`` that label no state of ``model``, sorted."""
    return sorted({name for name in iter_atoms(formula) if name not in model.labels})


def verify(model: Model, formula: Formula, config: VerifyConfig | None = None) -> Report:
    """
    Decide whether ``formula`` holds in the initial state of ``model``.

    Args:
        model: Validated Markov chain
        formula: Formula with numbered probabilistic operators
        config: Run parameters; defaults when omitted

    Returns:
        Report with the verdict, its composed error bounds and per-operator statistics

    Raises:
        BoundTypeMismatch: If a time bound is used with a discrete-time model
        RegionCollapsed: If inner errors leave an operator without indifference region
        MaxSamplesExceeded: If a sequential test does not decide in time
    """
    config = config or VerifyConfig()
    started = time.perf_counter()
    text = render_formula(formula)

    for prob in top_level_probs(formula):
        required_depth(prob, model.kind, config.hard_cap)

    warnings = []
    for name in unknown_atoms(model, formula):
        message = f"Atom '{name}' labels no state of the model and is false everywhere"
        logger.warning(message)
        warnings.append(message)

    logger.info(
        f"Verifying {text} with {config.method} (alpha={config.alpha}, beta={config.beta}, delta={config.delta}, "
        f"seed={config.seed}, workers={config.workers})"
    )

    executor = None
    if config.workers > 1:
        executor = ThreadPoolExecutor(max_workers=config.workers, thread_name_prefix="Sampler")
    try:
        run = _Verification(model, formula, config, executor)
        ctx = EvalContext(model, run.check, None, 0, config.composition_mode)
        result = eval_state(formula, model.initial, ctx)
    finally:
        if executor is not None:
            executor.shutdown(cancel_futures=True)

    if not run.top_level:
        logger.info("Formula has no probabilistic operator; evaluated exactly in the initial state")

    levels = [run.stats[node_id] for node_id in sorted(run.stats)]
    for level in levels:
        logger.info(
            f"Operator {level.node_id} (level {level.level}, P>={format_number(level.theta)}): "
            f"{level.tests} tests, {level.samples} samples, H0 {level.accepted_h0} / H1 {level.accepted_h1}, "
            f"region ({level.p1:.6g}, {level.p0:.6g})"
        )

    verdict = Hypothesis.H0 if result.holds else Hypothesis.H1
    report = Report(
        verdict=verdict,
        formula=text,
        method=config.method,
        type1=result.type1,
        type2=result.type2,
        levels=levels,
        elapsed_seconds=time.perf_counter() - started,
        warnings=warnings,
    )
    logger.info(f"Verdict: {verdict} ({'holds' if report.holds else 'does not hold'}), {report.samples_used} samples")
    return report
