"""Sampling of finite executions from Markov chains."""

import logging
import math
from dataclasses import dataclass

import numpy as np

from src.core.config import DEFAULT_HARD_CAP
from src.core.errors import BoundTypeMismatch, HardCapExceeded
from src.core.random_streams import SampleKey, make_stream
from src.models.formula import Bound, Steps, Time
from src.models.markov_chain import Ctmc, Dtmc, Model, StateId

logger = logging.getLogger(__name__)

# Uniforms fetched from the stream per refill
_DRAW_BLOCK = 64


@dataclass(frozen=True)
class DepthBound:
    """How far a trace must be simulated.

    Attributes:
        kind: Steps(k) to take k transitions, Time(t) to cover the horizon [0, t]
        hard_cap: Maximum number of transitions of a single trace
    """

    kind: Bound
    hard_cap: int = DEFAULT_HARD_CAP

    def __post_init__(self):
        """Validate the step cap."""
        if self.hard_cap < 1:
            raise ValueError(f"Hard cap must be at least 1, got {self.hard_cap}")


@dataclass(frozen=True)
class Trace:
    """A finite execution prefix.

    Attributes:
        states: Visited states, starting with the initial one
        entry_times: Time each state was entered (the step index for discrete time)
        truncated: The simulation stopped because the depth or time bound was reached
        absorbed: The last state is absorbing; the execution stays there forever
    """

    states: tuple[StateId, ...]
    entry_times: tuple[float, ...]
    truncated: bool = False
    absorbed: bool = False

    def __post_init__(self):
        """Validate shape and time ordering."""
        if not self.states:
            raise ValueError("A trace has at least one state")
        if len(self.entry_times) != len(self.states):
            raise ValueError(f"{len(self.states)} states but {len(self.entry_times)} entry times")
        if self.entry_times[0] != 0:
            raise ValueError(f"First entry time must be 0, got {self.entry_times[0]}")
        if any(b <= a for a, b in zip(self.entry_times, self.entry_times[1:], strict=False)):
            raise ValueError("Entry times must be strictly increasing")

    def __len__(self) -> int:
        return len(self.states)

    @property
    def steps(self) -> int:
        """Number of transitions in the trace."""
        return len(self.states) - 1

    @classmethod
    def discrete(cls, states, truncated: bool = False, absorbed: bool = False) -> "Trace":
        """Build a discrete-time trace; entry times are the step indices."""
        states = tuple(states)
        return cls(states, tuple(float(i) for i in range(len(states))), truncated, absorbed)


class _UniformSource:
    """Draws uniforms from a stream in blocks."""

    def __init__(self, generator: np.random.Generator):
        self._generator = generator
        self._buffer: list[float] = []
        self._position = 0

    def __call__(self) -> float:
        if self._position == len(self._buffer):
            self._buffer = self._generator.random(_DRAW_BLOCK).tolist()
            self._position = 0
        value = self._buffer[self._position]
        self._position += 1
        return value


def sample_path(model: Model, from_state: StateId, key: SampleKey, bound: DepthBound) -> Trace:
    """
    Simulate one execution of ``model`` starting in ``from_state``.

    Discrete-time chains take ``k`` transitions. An absorbing state (a single
    self-loop) is held for the remaining steps without further draws.
    Continuous-time chains follow the embedded jump chain; each sojourn is
    exponential with the state's exit rate. A time-bounded trace stops at the
    last state entered no later than ``t``, or at an absorbing state.

    Args:
        model: Validated chain
        from_state: Initial state of the trace
        key: Random stream identity; equal keys give identical traces
        bound: Depth to simulate

    Returns:
        The sampled trace

    Raises:
        BoundTypeMismatch: If a time bound is used with a discrete-time chain
        HardCapExceeded: If the trace needs more than ``bound.hard_cap`` transitions
    """
    if not 0 <= from_state < model.n_states:
        raise ValueError(f"State {from_state} is not in 0..{model.n_states - 1}")

    draw = _UniformSource(make_stream(key))

    if isinstance(model, Dtmc):
        if isinstance(bound.kind, Time):
            raise BoundTypeMismatch(f"Time bound {bound.kind.t}t cannot be used with a discrete-time model")
        return _sample_dtmc(model, from_state, draw, bound.kind.k, bound.hard_cap)

    return _sample_ctmc(model, from_state, draw, bound)


def _sample_dtmc(model: Dtmc, state: StateId, draw: _UniformSource, k: int, hard_cap: int) -> Trace:
    states = [state]
    absorbing = model.absorbing_states

    while len(states) - 1 < k:
        if state in absorbing:
            # Held by the self-loop; no draw needed
            remaining = min(k, hard_cap) - (len(states) - 1)
            states.extend([state] * remaining)
            return Trace.discrete(states, truncated=len(states) - 1 == k, absorbed=True)
        if len(states) - 1 >= hard_cap:
            raise HardCapExceeded(f"Trace reached the cap of {hard_cap} steps before its bound of {k} steps")
        state = model.jump(state, draw())
        states.append(state)

    return Trace.discrete(states, truncated=True, absorbed=state in absorbing)


def _sample_ctmc(model: Ctmc, state: StateId, draw: _UniformSource, bound: DepthBound) -> Trace:
    states = [state]
    times = [0.0]
    now = 0.0
    exit_rates = model.exit_rates
    horizon = bound.kind.t if isinstance(bound.kind, Time) else math.inf
    max_jumps = bound.kind.k if isinstance(bound.kind, Steps) else None

    while True:
        if not model.rows[state]:
            if isinstance(bound.kind, Time):
                logger.debug(f"Trace absorbed in state {state} at time {now:.6g} before horizon {horizon}")
            return Trace(tuple(states), tuple(times), truncated=False, absorbed=True)

        if max_jumps is not None and len(states) - 1 == max_jumps:
            return Trace(tuple(states), tuple(times), truncated=True)

        if len(states) - 1 >= bound.hard_cap:
            raise HardCapExceeded(
                f"Trace took {bound.hard_cap} jumps by time {now:.6g} without reaching its bound; "
                "the model may have very fast cycles"
            )

        # Inverse CDF of the exponential sojourn; 1 - u lies in (0, 1]
        sojourn = -math.log1p(-draw()) / exit_rates[state]
        # Entry times are strictly increasing, even when a sojourn vanishes against the clock
        entry = max(now + sojourn, math.nextafter(now, math.inf))
        if entry > horizon:
            return Trace(tuple(states), tuple(times), truncated=True)

        now = entry
        state = model.jump(state, draw())
        states.append(state)
        times.append(now)
