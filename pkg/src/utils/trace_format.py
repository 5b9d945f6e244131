"""Reading and writing traces in the line-oriented trace text format.

One trace per line. Discrete-time traces are space-separated state ids
(``0 1 1 2``); continuous-time traces are ``state@entry_time`` tokens with
strictly increasing times starting at 0 (``0@0 1@0.42 2@1.3``). A line may end with
``[truncated]`` (the simulation stopped at its bound) or ``[absorbed]`` (the
last state is never left). ``#`` starts a comment; blank lines are ignored.
"""

import logging
import math
import re
from pathlib import Path

from src.core.errors import SourceSpan, TraceSyntaxError
from src.core.formula_parser import format_number
from src.core.simulator import Trace
from src.models.markov_chain import ModelKind

logger = logging.getLogger(__name__)

_TOKEN = re.compile(r"\S+")
_FLAGS = {"[truncated]": "truncated", "[absorbed]": "absorbed"}


def parse_traces(text, model_kind: ModelKind, n_states: int, extend: bool = False) -> list[Trace]:
    """
    Parse a trace file.

    Args:
        text: File contents or a readable text stream
        model_kind: ``dtmc`` or ``ctmc``; selects the token syntax
        n_states: Number of states of the model the traces belong to
        extend: Treat every trace as absorbed in its last state, so bounds
            beyond its end repeat that state instead of failing

    Returns:
        Traces in file order

    Raises:
        TraceSyntaxError: If a token is malformed, a state id is out of range,
            or times are not strictly increasing from 0
    """
    if not isinstance(text, str):
        text = text.read()

    traces = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        content = line.split("#", 1)[0]
        tokens = [(m.group(), SourceSpan(line_no, m.start() + 1)) for m in _TOKEN.finditer(content)]
        if not tokens:
            continue
        traces.append(_parse_line(tokens, model_kind, n_states, extend))

    logger.debug(f"Parsed {len(traces)} {model_kind} traces")
    return traces


def _parse_line(tokens: list[tuple[str, SourceSpan]], model_kind: ModelKind, n_states: int, extend: bool) -> Trace:
    flags = {"truncated": False, "absorbed": extend}
    while tokens and tokens[-1][0] in _FLAGS:
        flags[_FLAGS[tokens.pop()[0]]] = True
    if not tokens:
        raise TraceSyntaxError("Trace has no states")

    states = []
    times = []
    for index, (text, span) in enumerate(tokens):
        if model_kind == "ctmc":
            state_text, sep, time_text = text.partition("@")
            if not sep:
                raise TraceSyntaxError(f"Expected 'state@time', got '{text}'", span)
            entry_time = _parse_time(time_text, span)
        else:
            state_text, entry_time = text, float(index)

        states.append(_parse_state(state_text, n_states, span))
        if index == 0 and entry_time != 0.0:
            raise TraceSyntaxError(f"A trace starts at time 0, got '{text}'", span)
        if times and entry_time <= times[-1]:
            raise TraceSyntaxError(f"Entry time {format_number(entry_time)} is not after the previous one", span)
        times.append(entry_time)

    return Trace(tuple(states), tuple(times), flags["truncated"], flags["absorbed"])


def _parse_state(text: str, n_states: int, span: SourceSpan) -> int:
    if not text.isdigit():
        raise TraceSyntaxError(f"Expected a state id, got '{text}'", span)
    state = int(text)
    if state >= n_states:
        raise TraceSyntaxError(f"State {state} is not in 0..{n_states - 1}", span)
    return state


def _parse_time(text: str, span: SourceSpan) -> float:
    try:
        value = float(text)
    except ValueError:
        raise TraceSyntaxError(f"Expected an entry time, got '{text}'", span) from None
    if not (math.isfinite(value) and value >= 0.0):
        raise TraceSyntaxError(f"Entry time must be finite and non-negative, got '{text}'", span)
    return value


def load_traces(path: str | Path, model_kind: ModelKind, n_states: int, extend: bool = False) -> list[Trace]:
    """
    Read and parse a trace file.

    Raises:
        FileNotFoundError: If the file doesn't exist
        TraceSyntaxError: If the file is malformed
    """
    trace_file = Path(path)
    if not trace_file.exists():
        raise FileNotFoundError(f"Trace file not found: {path}")

    with open(trace_file, encoding="utf-8") as f:
        return parse_traces(f, model_kind, n_states, extend)


def render_trace(trace: Trace, model_kind: ModelKind) -> str:
    """Render one trace as a line of the trace text format (without newline)."""
    if model_kind == "ctmc":
        tokens = [f"{state}@{format_number(t)}" for state, t in zip(trace.states, trace.entry_times, strict=True)]
    else:
        tokens = [str(state) for state in trace.states]

    if trace.truncated:
        tokens.append("[truncated]")
    if trace.absorbed:
        tokens.append("[absorbed]")
    return " ".join(tokens)
