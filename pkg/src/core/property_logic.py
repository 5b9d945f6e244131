"""Evaluation of formulas on states and finite traces.

Propositional parts of a formula are evaluated exactly. A probabilistic
operator below the outermost one cannot be decided on a single trace: it is
handed to a *prob checker* (normally an inner hypothesis test run by the
verifier) whose verdict comes with a Type-I/Type-II error pair. Those pairs are
combined through the Boolean structure of the formula:

* negation swaps the pair,
* conjunction keeps the smallest Type-I and the largest Type-II error
  (``standard`` mode) or the largest of both (``conservative`` mode),
* disjunction is the De Morgan dual of conjunction.

Only operands that contain a probabilistic operator take part in a
composition; exactly evaluated operands carry no error.
"""

import logging
from collections.abc import Callable, Iterable
from dataclasses import dataclass, replace
from enum import StrEnum

from src.core.config import DEFAULT_HARD_CAP
from src.core.errors import BoundTypeMismatch, TraceTooShort, UnsupportedFormula
from src.core.random_streams import SampleKey
from src.core.simulator import DepthBound, Trace
from src.models.formula import (
    And,
    Atom,
    Bound,
    FalseFormula,
    Formula,
    Next,
    Not,
    Or,
    PathFormula,
    Prob,
    Steps,
    Time,
    TrueFormula,
    Until,
    contains_prob,
    iter_prob_nodes,
)
from src.models.markov_chain import Model, ModelKind, StateId

logger = logging.getLogger(__name__)

ErrorPair = tuple[float, float]

NO_ERROR: ErrorPair = (0.0, 0.0)


class CompositionMode(StrEnum):
    """How conjunctions combine the error pairs of their operands."""

    STANDARD = "standard"
    CONSERVATIVE = "conservative"


@dataclass(frozen=True)
class StateVerdict:
    """Truth value of a state formula with the errors it may carry."""

    holds: bool
    type1: float = 0.0
    type2: float = 0.0

    @property
    def errors(self) -> ErrorPair:
        return (self.type1, self.type2)


@dataclass(frozen=True)
class PathVerdict:
    """Outcome of a path formula on one trace with its composed errors."""

    holds: bool
    type1: float = 0.0
    type2: float = 0.0

    @property
    def errors(self) -> ErrorPair:
        return (self.type1, self.type2)


ProbChecker = Callable[[Prob, StateId, "EvalContext"], StateVerdict]


@dataclass(frozen=True)
class EvalContext:
    """Everything formula evaluation needs besides the formula itself.

    Attributes:
        model: Chain whose labels give atom truth values
        prob_checker: Decides probabilistic operators met during evaluation;
            ``None`` where they cannot be checked (recorded traces)
        key: Random stream of the trace being evaluated; inner checks derive
            their streams from it
        position: Trace position the evaluated state was reached at
        composition_mode: Conjunction rule for error pairs
    """

    model: Model
    prob_checker: ProbChecker | None = None
    key: SampleKey | None = None
    position: int = 0
    composition_mode: CompositionMode = CompositionMode.STANDARD

    def at_position(self, position: int) -> "EvalContext":
        return replace(self, position=position)


# Error composition


def compose_negation(errors: ErrorPair) -> ErrorPair:
    """Errors of !phi given the errors of phi: the pair is swapped."""
    type1, type2 = errors
    return (type2, type1)


def compose_conjunction(errors: Iterable[ErrorPair], mode: CompositionMode = CompositionMode.STANDARD) -> ErrorPair:
    """
    Errors of a conjunction from the errors of its operands.

    Args:
        errors: (type1, type2) pair of every operand
        mode: ``standard`` gives (min type1, max type2); ``conservative`` gives (max type1, max type2)

    Returns:
        Composed pair; (0, 0) for an empty conjunction
    """
    pairs = list(errors)
    if not pairs:
        return NO_ERROR
    type1s = [p[0] for p in pairs]
    type2s = [p[1] for p in pairs]
    if CompositionMode(mode) is CompositionMode.CONSERVATIVE:
        return (max(type1s), max(type2s))
    return (min(type1s), max(type2s))


def compose_disjunction(errors: Iterable[ErrorPair], mode: CompositionMode = CompositionMode.STANDARD) -> ErrorPair:
    """Errors of a disjunction, as the negation of the conjunction of negations."""
    return compose_negation(compose_conjunction((compose_negation(e) for e in errors), mode))


# State formulas


def eval_state(formula: Formula, state: StateId, ctx: EvalContext) -> StateVerdict:
    """
    Evaluate a state formula at ``state``.

    Args:
        formula: State formula
        state: State to evaluate in
        ctx: Evaluation context

    Returns:
        Truth value with the composed errors of the inner checks it relied on

    Raises:
        UnsupportedFormula: If a probabilistic operator is met and the context cannot check it
    """
    match formula:
        case TrueFormula():
            return StateVerdict(True)
        case FalseFormula():
            return StateVerdict(False)
        case Atom(name=name):
            return StateVerdict(ctx.model.atom_holds(state, name))
        case Not(operand=operand):
            verdict = eval_state(operand, state, ctx)
            type1, type2 = compose_negation(verdict.errors)
            return StateVerdict(not verdict.holds, type1, type2)
        case And(left=left, right=right):
            return _eval_junction((left, right), state, ctx, conjunction=True)
        case Or(left=left, right=right):
            return _eval_junction((left, right), state, ctx, conjunction=False)
        case Prob():
            if ctx.prob_checker is None:
                raise UnsupportedFormula(
                    f"Probabilistic operator P>={formula.theta} cannot be checked in this context"
                )
            return ctx.prob_checker(formula, state, ctx)
    raise TypeError(f"Not a state formula: {formula!r}")


def _eval_junction(operands: tuple[Formula, ...], state: StateId, ctx: EvalContext, conjunction: bool) -> StateVerdict:
    """Evaluate And/Or; exact operands first so a deciding one skips inner checks."""
    exact = [f for f in operands if not contains_prob(f)]
    checked = [f for f in operands if contains_prob(f)]

    for operand in exact:
        if eval_state(operand, state, ctx).holds != conjunction:
            return StateVerdict(not conjunction)

    verdicts = [eval_state(operand, state, ctx) for operand in checked]
    holds = all(v.holds for v in verdicts) if conjunction else any(v.holds for v in verdicts)
    compose = compose_conjunction if conjunction else compose_disjunction
    type1, type2 = compose([v.errors for v in verdicts], ctx.composition_mode)
    return StateVerdict(holds, type1, type2)


# Path formulas


def _positions(bound: Bound, trace: Trace) -> tuple[int, bool]:
    """
    Number of trace positions a bounded operator looks at, and whether the
    trace tail repeats (absorbing state held past the end of the trace).

    Raises:
        TraceTooShort: If the trace ends before the bound and is not absorbed
    """
    last = len(trace) - 1
    if isinstance(bound, Steps):
        if bound.k <= last:
            return bound.k + 1, False
        if trace.absorbed:
            return bound.k + 1, True
        raise TraceTooShort(f"Trace has {last} steps but the formula needs {bound.k}")

    covered = trace.truncated or trace.absorbed or trace.entry_times[-1] > bound.t
    if not covered:
        raise TraceTooShort(
            f"Trace ends at time {trace.entry_times[-1]:.6g} but the formula needs the horizon up to {bound.t}"
        )
    count = sum(1 for time in trace.entry_times if time <= bound.t)
    return count, False


def eval_path(path: PathFormula, trace: Trace, ctx: EvalContext) -> PathVerdict:
    """
    Evaluate a path formula on a trace.

    ``X phi`` holds if phi holds at position 1. ``phi U<=b psi`` holds if psi
    holds at some position within the bound and phi holds at every earlier
    position. Evaluation stops at the first position that decides the until;
    the composed errors cover every check up to that point.

    Args:
        path: Path formula
        trace: Trace starting at the state the formula is evaluated in
        ctx: Evaluation context; ``ctx.position`` is ignored

    Returns:
        Truth value with composed errors

    Raises:
        TraceTooShort: If the trace is too short for the bound and not absorbed
    """
    if isinstance(path, Next):
        _positions(Steps(1), trace)
        position = min(1, len(trace) - 1)
        verdict = eval_state(path.operand, trace.states[position], ctx.at_position(1))
        return PathVerdict(verdict.holds, verdict.type1, verdict.type2)

    return _eval_until(path, trace, ctx)


class _UntilErrors:
    """Folds error pairs through the until's disjunction of conjunctions.

    Term i is ``right@i and left@0 and ... and left@(i-1)``; the until is the
    disjunction of its terms.
    """

    def __init__(self, left_checked: bool, right_checked: bool, mode: CompositionMode):
        self.left_checked = left_checked
        self.right_checked = right_checked
        self.mode = mode
        self.prefix: ErrorPair | None = None
        self.total: ErrorPair | None = None

    def _add_term(self, parts: list[ErrorPair]) -> None:
        if not parts:
            return
        term = compose_conjunction(parts, self.mode)
        self.total = term if self.total is None else compose_disjunction([self.total, term], self.mode)

    def right_checked_at(self, errors: ErrorPair) -> None:
        parts = [p for p in (self.prefix,) if p is not None]
        if self.right_checked:
            parts.append(errors)
        self._add_term(parts)

    def left_checked_at(self, errors: ErrorPair) -> None:
        if self.left_checked:
            self.prefix = errors if self.prefix is None else compose_conjunction([self.prefix, errors], self.mode)

    def left_violated(self) -> None:
        self._add_term([self.prefix] if self.prefix is not None else [])

    @property
    def errors(self) -> ErrorPair:
        return self.total if self.total is not None else NO_ERROR


def _eval_until(path: Until, trace: Trace, ctx: EvalContext) -> PathVerdict:
    count, extended = _positions(path.bound, trace)
    errors = _UntilErrors(contains_prob(path.left), contains_prob(path.right), ctx.composition_mode)
    last = len(trace) - 1

    for position in range(count):
        state = trace.states[min(position, last)]
        position_ctx = ctx.at_position(position)

        right = eval_state(path.right, state, position_ctx)
        errors.right_checked_at(right.errors)
        if right.holds:
            return PathVerdict(True, *errors.errors)

        if position == count - 1:
            break

        left = eval_state(path.left, state, position_ctx)
        errors.left_checked_at(left.errors)
        if not left.holds:
            errors.left_violated()
            return PathVerdict(False, *errors.errors)

        if extended and position >= last:
            # Absorbed: every later position repeats this state, so the
            # outcome cannot change before the bound
            break

    return PathVerdict(False, *errors.errors)


# Static analysis


def required_depth(formula: Formula, model_kind: ModelKind, hard_cap: int = DEFAULT_HARD_CAP) -> DepthBound:
    """
    Depth to which traces must be simulated to evaluate the outermost operator.

    Inner probabilistic operators start their own simulations, so only the
    path formula of the outermost operator counts. A Boolean combination of
    top-level operators needs the largest of their depths; a formula without
    any probabilistic operator needs no step at all.

    Args:
        formula: Formula to check
        model_kind: ``dtmc`` or ``ctmc``
        hard_cap: Step cap of the returned bound

    Returns:
        Depth bound for the simulator

    Raises:
        BoundTypeMismatch: If a time bound appears in a formula for a discrete-time model, or
            top-level operators mix step and time bounds
    """
    for prob in iter_prob_nodes(formula):
        if isinstance(prob.path, Until) and isinstance(prob.path.bound, Time) and model_kind == "dtmc":
            raise BoundTypeMismatch(
                f"Time bound {prob.path.bound.t}t cannot be used with a discrete-time model; use a step bound"
            )

    bounds = [_path_depth(prob.path) for prob in top_level_probs(formula)]
    if not bounds:
        return DepthBound(Steps(0), hard_cap)

    if all(isinstance(b, Steps) for b in bounds):
        return DepthBound(Steps(max(b.k for b in bounds if isinstance(b, Steps))), hard_cap)
    if all(isinstance(b, Time) for b in bounds):
        return DepthBound(Time(max(b.t for b in bounds if isinstance(b, Time))), hard_cap)
    raise BoundTypeMismatch("Top-level operators mix step and time bounds; no single trace depth covers both")


def _path_depth(path: PathFormula) -> Bound:
    if isinstance(path, Next):
        return Steps(1)
    return path.bound


def top_level_probs(formula: Formula) -> list[Prob]:
    """Probabilistic operators not nested inside another one, left to right."""
    match formula:
        case Prob():
            return [formula]
        case Not(operand=operand):
            return top_level_probs(operand)
        case And(left=left, right=right) | Or(left=left, right=right):
            return top_level_probs(left) + top_level_probs(right)
    return []


def state_error_bound(
    formula: Formula,
    node_errors: Callable[[Prob], ErrorPair],
    mode: CompositionMode = CompositionMode.STANDARD,
) -> ErrorPair:
    """
    Largest errors evaluating ``formula`` can carry.

    Args:
        formula: State formula
        node_errors: Nominal error pair of the check behind each probabilistic operator
        mode: Conjunction rule

    Returns:
        Upper bounds on (type1, type2)
    """
    match formula:
        case Prob():
            return node_errors(formula)
        case Not(operand=operand):
            return compose_negation(state_error_bound(operand, node_errors, mode))
        case And(left=left, right=right) | Or(left=left, right=right):
            pairs = [state_error_bound(f, node_errors, mode) for f in (left, right) if contains_prob(f)]
            compose = compose_conjunction if isinstance(formula, And) else compose_disjunction
            return compose(pairs, mode)
    return NO_ERROR


def path_error_bound(
    path: PathFormula,
    node_errors: Callable[[Prob], ErrorPair],
    mode: CompositionMode = CompositionMode.STANDARD,
) -> ErrorPair:
    """
    Largest errors a single evaluation of ``path`` can carry.

    For an until this is the worst case over every way evaluation can stop:
    the right operand holding at the first or a later position, the left
    operand failing, or the bound running out. Because composition only uses
    minima and maxima, two positions are enough to cover every pattern.
    """
    if isinstance(path, Next):
        return state_error_bound(path.operand, node_errors, mode)

    left_errors = state_error_bound(path.left, node_errors, mode)
    right_errors = state_error_bound(path.right, node_errors, mode)
    left_checked = contains_prob(path.left)
    right_checked = contains_prob(path.right)

    outcomes = []
    for checks in (1, 2):
        for violated in (False, True):
            fold = _UntilErrors(left_checked, right_checked, mode)
            for index in range(checks):
                if index > 0:
                    fold.left_checked_at(left_errors)
                fold.right_checked_at(right_errors)
            if violated:
                fold.left_checked_at(left_errors)
                fold.left_violated()
            outcomes.append(fold.errors)

    return (max(o[0] for o in outcomes), max(o[1] for o in outcomes))
