"""Reader and writer for the line-oriented model file format.

Format (UTF-8, LF or CRLF line endings, ``#`` starts a comment)::

    dtmc | ctmc
    states N
    init S
    label NAME S1 S2 ...        (zero or more)
    trans FROM TO WEIGHT        (one or more; probability or rate)
"""

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path

from src.core.errors import DanglingTarget, DuplicateTransition, ModelSyntaxError, ModelValidationError, SourceSpan
from src.core.formula_parser import format_number
from src.models.markov_chain import Ctmc, Dtmc, Model, StateId, Transition, validate

logger = logging.getLogger(__name__)

_INTEGER = re.compile(r"\d+")
_DECIMAL = re.compile(r"(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?")
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


@dataclass(frozen=True)
class _Token:
    text: str
    span: SourceSpan


@dataclass
class _ModelBuilder:
    """Collects declarations together with where they were made."""

    kind: str | None = None
    n_states: int | None = None
    states_span: SourceSpan | None = None
    initial: StateId | None = None
    initial_span: SourceSpan | None = None
    labels: dict[str, set[StateId]] = field(default_factory=dict)
    label_spans: dict[str, SourceSpan] = field(default_factory=dict)
    transitions: list[tuple[StateId, Transition, SourceSpan]] = field(default_factory=list)
    # Last transition line seen for each source state
    row_spans: dict[StateId, SourceSpan] = field(default_factory=dict)
    seen_pairs: set[tuple[StateId, StateId]] = field(default_factory=set)


def _tokenize(line: str, line_no: int) -> list[_Token]:
    """Split a line on whitespace, dropping comments and keeping token columns."""
    content = line.split("#", 1)[0]
    return [_Token(m.group(), SourceSpan(line_no, m.start() + 1)) for m in re.finditer(r"\S+", content)]


def _parse_int(token: _Token, what: str) -> int:
    if not _INTEGER.fullmatch(token.text):
        raise ModelSyntaxError(f"Expected {what} (a non-negative integer), got '{token.text}'", token.span)
    return int(token.text)


def _parse_weight(token: _Token) -> float:
    if not _DECIMAL.fullmatch(token.text):
        raise ModelSyntaxError(f"Expected a decimal weight, got '{token.text}'", token.span)
    return float(token.text)


def _expect_arity(tokens: list[_Token], count: int, usage: str) -> None:
    if len(tokens) != count:
        span = tokens[count].span if len(tokens) > count else tokens[-1].span
        raise ModelSyntaxError(f"Expected '{usage}'", span)


def parse_model(text, structure_only: bool = False) -> Model:
    """
    Parse and validate a model description.

    Args:
        text: Model text or a readable text stream
        structure_only: Skip the checks on probabilities and rates

    Returns:
        Validated DTMC or CTMC

    Raises:
        ModelSyntaxError: If the text does not follow the model grammar
        ModelValidationError: If the described chain is invalid (the error carries the offending line)
    """
    if not isinstance(text, str):
        text = text.read()

    builder = _ModelBuilder()
    lines = text.splitlines()

    for line_no, line in enumerate(lines, 1):
        tokens = _tokenize(line, line_no)
        if not tokens:
            continue

        keyword = tokens[0]
        if builder.kind is None:
            if keyword.text not in ("dtmc", "ctmc") or len(tokens) != 1:
                raise ModelSyntaxError(f"Model must start with 'dtmc' or 'ctmc', got '{keyword.text}'", keyword.span)
            builder.kind = keyword.text
            continue

        match keyword.text:
            case "states":
                _parse_states(builder, tokens)
            case "init":
                _parse_init(builder, tokens)
            case "label":
                _parse_label(builder, tokens)
            case "trans":
                _parse_transition(builder, tokens)
            case "dtmc" | "ctmc":
                raise ModelSyntaxError("Model type declared twice", keyword.span)
            case _:
                raise ModelSyntaxError(f"Unknown declaration '{keyword.text}'", keyword.span)

    end = SourceSpan(max(len(lines), 1), len(lines[-1]) + 1 if lines else 1)
    if builder.kind is None:
        raise ModelSyntaxError("Empty model: expected 'dtmc' or 'ctmc'", end)
    if builder.n_states is None:
        raise ModelSyntaxError("Missing 'states N' declaration", end)
    if builder.initial is None:
        raise ModelSyntaxError("Missing 'init S' declaration", end)

    return _build(builder, structure_only)


def _parse_states(builder: _ModelBuilder, tokens: list[_Token]) -> None:
    _expect_arity(tokens, 2, "states N")
    if builder.n_states is not None:
        raise ModelSyntaxError("'states' declared twice", tokens[0].span)
    n_states = _parse_int(tokens[1], "state count")
    if n_states < 1:
        raise ModelSyntaxError("A model needs at least one state", tokens[1].span)
    builder.n_states = n_states
    builder.states_span = tokens[0].span


def _parse_init(builder: _ModelBuilder, tokens: list[_Token]) -> None:
    _expect_arity(tokens, 2, "init S")
    if builder.initial is not None:
        raise ModelSyntaxError("'init' declared twice", tokens[0].span)
    builder.initial = _parse_int(tokens[1], "state id")
    builder.initial_span = tokens[1].span


def _parse_label(builder: _ModelBuilder, tokens: list[_Token]) -> None:
    if len(tokens) < 2:
        raise ModelSyntaxError("Expected 'label NAME S1 S2 ...'", tokens[0].span)
    name = tokens[1]
    if not _NAME.fullmatch(name.text) or name.text in ("true", "false"):
        raise ModelSyntaxError(f"Invalid label name '{name.text}'", name.span)

    states = builder.labels.setdefault(name.text, set())
    builder.label_spans.setdefault(name.text, name.span)
    for token in tokens[2:]:
        state = _parse_int(token, "state id")
        if builder.n_states is not None and state >= builder.n_states:
            raise DanglingTarget(f"Label '{name.text}' refers to unknown state {state}", token.span)
        states.add(state)


def _parse_transition(builder: _ModelBuilder, tokens: list[_Token]) -> None:
    _expect_arity(tokens, 4, "trans FROM TO WEIGHT")
    source = _parse_int(tokens[1], "source state")
    target = _parse_int(tokens[2], "target state")
    weight = _parse_weight(tokens[3])

    if (source, target) in builder.seen_pairs:
        raise DuplicateTransition(f"Transition {source} -> {target} is listed twice", tokens[0].span, state=source)
    builder.seen_pairs.add((source, target))

    builder.transitions.append((source, Transition(target, weight), tokens[0].span))
    builder.row_spans[source] = tokens[0].span


def _build(builder: _ModelBuilder, structure_only: bool) -> Model:
    """Assemble rows and run model validation, attaching spans to its errors."""
    n_states = builder.n_states
    assert n_states is not None and builder.initial is not None

    rows: list[list[Transition]] = [[] for _ in range(n_states)]
    for source, transition, span in builder.transitions:
        if source >= n_states:
            raise DanglingTarget(f"Transition source {source} is not in 0..{n_states - 1}", span, state=source)
        rows[source].append(transition)

    for name, states in builder.labels.items():
        bad = [s for s in states if s >= n_states]
        if bad:
            raise DanglingTarget(f"Label '{name}' refers to unknown state {min(bad)}", builder.label_spans[name])

    model_type = Dtmc if builder.kind == "dtmc" else Ctmc
    model = model_type(
        n_states=n_states,
        initial=builder.initial,
        rows=tuple(tuple(row) for row in rows),
        labels={name: frozenset(states) for name, states in builder.labels.items()},
    )

    try:
        return validate(model, structure_only)
    except ModelValidationError as e:
        if e.span is not None:
            raise
        span = _span_for(builder, e)
        raise type(e)(e.message, span, state=e.state) from None


def _span_for(builder: _ModelBuilder, error: ModelValidationError) -> SourceSpan | None:
    if error.state is not None and error.state in builder.row_spans:
        return builder.row_spans[error.state]
    if error.state is not None:
        # A row without transitions is reported where the state space is declared
        return builder.states_span
    return builder.initial_span or builder.states_span


def load_model(path: str | Path, structure_only: bool = False) -> Model:
    """
    Read and parse a model file.

    Args:
        path: Path to the model file
        structure_only: Skip the checks on probabilities and rates

    Returns:
        Validated model

    Raises:
        FileNotFoundError: If the file doesn't exist
        ModelSyntaxError: If the file is malformed
        ModelValidationError: If the chain is invalid
    """
    model_file = Path(path)
    if not model_file.exists():
        raise FileNotFoundError(f"Model file not found: {path}")

    with open(model_file, encoding="utf-8") as f:
        model = parse_model(f, structure_only)

    logger.debug(f"Loaded {model.kind} with {model.n_states} states from {model_file}")
    return model


def render_model(model: Model) -> str:
    """
    Render a model in the text format read by :func:`parse_model`.

    Labels are written sorted by name; transitions by source state, each row
    in its stored order, so ``parse_model(render_model(m)) == m`` for a
    validated model.
    """
    lines = [model.kind, f"states {model.n_states}", f"init {model.initial}"]

    for name in sorted(model.labels):
        states = " ".join(str(s) for s in sorted(model.labels[name]))
        lines.append(f"label {name} {states}".rstrip())

    for source, row in enumerate(model.rows):
        for transition in row:
            lines.append(f"trans {source} {transition.target} {format_number(transition.weight)}")

    return "\n".join(lines) + "\n"
