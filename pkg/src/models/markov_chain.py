"""Discrete-time and continuous-time Markov chain models."""

import logging
import math
from bisect import bisect_right
from dataclasses import dataclass, field
from functools import cached_property
from itertools import accumulate
from typing import ClassVar, Literal

from src.core.config import ROW_SUM_TOLERANCE
from src.core.errors import (
    DanglingTarget,
    DuplicateTransition,
    EmptyDtmcRow,
    NegativeOrZeroWeight,
    RowSumInvalid,
)

logger = logging.getLogger(__name__)

StateId = int
ModelKind = Literal["dtmc", "ctmc"]


@dataclass(frozen=True)
class Transition:
    """Outgoing edge of a state: a probability (DTMC) or a rate (CTMC)."""

    target: StateId
    weight: float


@dataclass(frozen=True)
class _MarkovChain:
    """Fields and lookups shared by both chain kinds.

    Instances are immutable; the cached lookup tables are filled lazily and
    never change afterwards, so a chain can be shared between samplers.
    """

    n_states: int
    initial: StateId
    rows: tuple[tuple[Transition, ...], ...]
    labels: dict[str, frozenset[StateId]] = field(default_factory=dict)

    kind: ClassVar[ModelKind]

    def atom_holds(self, state: StateId, atom: str) -> bool:
        """Check whether an atomic proposition labels a state.

        Unknown atom names are false everywhere.
        """
        states = self.labels.get(atom)
        return states is not None and state in states

    @cached_property
    def _cumulative(self) -> tuple[tuple[float, ...], ...]:
        """Cumulative jump distribution per row (last entry forced to 1.0)."""
        tables = []
        for row in self.rows:
            total = math.fsum(t.weight for t in row)
            if not row or total <= 0:
                tables.append(())
                continue
            cumulative = list(accumulate(t.weight / total for t in row))
            cumulative[-1] = 1.0
            tables.append(tuple(cumulative))
        return tuple(tables)

    def jump(self, state: StateId, u: float) -> StateId:
        """Pick the successor of ``state`` for a uniform draw ``u`` in [0, 1).

        Uses inversion of the cumulative row distribution (rate / exit rate
        for continuous-time chains).
        """
        cumulative = self._cumulative[state]
        index = bisect_right(cumulative, u)
        return self.rows[state][min(index, len(cumulative) - 1)].target

    def has_transition(self, source: StateId, target: StateId) -> bool:
        """Check whether the chain has an edge from source to target."""
        return any(t.target == target for t in self.rows[source])


@dataclass(frozen=True)
class Dtmc(_MarkovChain):
    """Discrete-time Markov chain; row weights are probabilities."""

    kind: ClassVar[ModelKind] = "dtmc"

    @cached_property
    def absorbing_states(self) -> frozenset[StateId]:
        """States whose only transition is a self-loop."""
        return frozenset(
            state for state, row in enumerate(self.rows) if len(row) == 1 and row[0].target == state
        )


@dataclass(frozen=True)
class Ctmc(_MarkovChain):
    """Continuous-time Markov chain; row weights are rates per unit time.

    A state with an empty row is absorbing (infinite sojourn).
    """

    kind: ClassVar[ModelKind] = "ctmc"

    @cached_property
    def exit_rates(self) -> tuple[float, ...]:
        """Total outgoing rate R(s) of every state."""
        return tuple(math.fsum(t.weight for t in row) for row in self.rows)

    @cached_property
    def absorbing_states(self) -> frozenset[StateId]:
        """States without outgoing transitions."""
        return frozenset(state for state, row in enumerate(self.rows) if not row)


Model = Dtmc | Ctmc


def validate(model: Model, structure_only: bool = False) -> Model:
    """
    Check the structural invariants of a Markov chain.

    DTMC rows whose probabilities sum to 1 within ``ROW_SUM_TOLERANCE`` are
    renormalized so that they sum to exactly 1. Validating an already
    validated model returns an equal model.

    Args:
        model: Chain to validate
        structure_only: Check states, targets and labels only; weights are kept as given

    Returns:
        The validated (possibly renormalized) chain

    Raises:
        DanglingTarget: If the initial state, a transition target or a labeled state is out of range
        NegativeOrZeroWeight: If a probability or rate is not positive and finite
        DuplicateTransition: If a row lists the same target twice
        EmptyDtmcRow: If a DTMC state has no successor
        RowSumInvalid: If a DTMC row does not sum to 1
    """
    if model.n_states < 1:
        raise DanglingTarget(f"A model needs at least one state, got {model.n_states}")

    if not 0 <= model.initial < model.n_states:
        raise DanglingTarget(f"Initial state {model.initial} is not in 0..{model.n_states - 1}")

    if len(model.rows) > model.n_states:
        raise DanglingTarget(f"{len(model.rows)} rows given for {model.n_states} states")

    # Missing trailing rows are states without transitions
    rows = tuple(model.rows) + ((),) * (model.n_states - len(model.rows))

    for atom, states in model.labels.items():
        for state in states:
            if not 0 <= state < model.n_states:
                raise DanglingTarget(f"Label '{atom}' refers to state {state}, not in 0..{model.n_states - 1}")

    checked_rows = []
    for source, row in enumerate(rows):
        seen: set[StateId] = set()
        for transition in row:
            if not 0 <= transition.target < model.n_states:
                raise DanglingTarget(
                    f"Transition {source} -> {transition.target} leaves the model (0..{model.n_states - 1})",
                    state=source,
                )
            if not structure_only and not (transition.weight > 0 and math.isfinite(transition.weight)):
                raise NegativeOrZeroWeight(
                    f"Transition {source} -> {transition.target} has weight {transition.weight}; "
                    "weights must be positive and finite",
                    state=source,
                )
            if transition.target in seen:
                raise DuplicateTransition(f"Transition {source} -> {transition.target} is listed twice", state=source)
            seen.add(transition.target)

        if isinstance(model, Dtmc) and not structure_only:
            row = _normalized_dtmc_row(source, row)
        checked_rows.append(tuple(row))

    labels = {atom: frozenset(states) for atom, states in model.labels.items()}
    return type(model)(n_states=model.n_states, initial=model.initial, rows=tuple(checked_rows), labels=labels)


def _normalized_dtmc_row(source: StateId, row: tuple[Transition, ...]) -> tuple[Transition, ...]:
    """Check a DTMC row sums to 1 and remove floating-point drift."""
    if not row:
        raise EmptyDtmcRow(f"State {source} has no outgoing transitions", state=source)

    total = math.fsum(t.weight for t in row)
    if abs(total - 1.0) > ROW_SUM_TOLERANCE:
        raise RowSumInvalid(f"Probabilities of state {source} sum to {total:.12g}, expected 1", state=source)

    if total == 1.0:
        return row

    weights = [t.weight / total for t in row]
    # Push the remaining rounding residual into the largest entry
    largest = max(range(len(weights)), key=weights.__getitem__)
    weights[largest] = 1.0 - math.fsum(w for i, w in enumerate(weights) if i != largest)
    # The subtraction rounds too; step the largest entry by single ulps until
    # the row sums to exactly 1. One ulp of an entry below 1 is never wider
    # than the interval of sums that round to 1, so this terminates.
    while (residual := math.fsum(weights)) != 1.0:
        weights[largest] = math.nextafter(weights[largest], 2.0 if residual < 1.0 else 0.0)
    logger.debug(f"Renormalized row of state {source} (sum was {total!r})")
    return tuple(Transition(t.target, w) for t, w in zip(row, weights, strict=True))


def atom_holds(model: Model, state: StateId, atom: str) -> bool:
    """Check whether ``atom`` labels ``state``; unknown atoms are false."""
    return model.atom_holds(state, atom)
