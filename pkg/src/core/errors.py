"""Exception hierarchy for model checking.

Errors caused by invalid input also derive from ``ValueError`` so callers that
only care about "bad input" can catch that.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class SourceSpan:
    """Position of a token in a text input (1-based)."""

    line: int
    column: int

    def __post_init__(self):
        """Validate span coordinates."""
        if self.line < 1 or self.column < 1:
            raise ValueError(f"Source span must be 1-based, got line {self.line}, column {self.column}")

    def __str__(self) -> str:
        return f"line {self.line}, column {self.column}"


class ModelCheckingError(Exception):
    """Base class for all model checking errors."""

    def __init__(self, message: str, span: SourceSpan | None = None):
        super().__init__(message)
        self.message = message
        self.span = span

    def __str__(self) -> str:
        if self.span is None:
            return self.message
        return f"{self.span}: {self.message}"


# Text inputs


class ModelSyntaxError(ModelCheckingError, ValueError):
    """Malformed model file."""


class FormulaSyntaxError(ModelCheckingError, ValueError):
    """Malformed property formula."""


class TraceSyntaxError(ModelCheckingError, ValueError):
    """Malformed trace file."""


# Model validation


class ModelValidationError(ModelCheckingError, ValueError):
    """A Markov chain violates one of its structural invariants.

    Attributes:
        state: Row (source state) the problem was found in, if any
    """

    def __init__(self, message: str, span: SourceSpan | None = None, state: int | None = None):
        super().__init__(message, span)
        self.state = state


class RowSumInvalid(ModelValidationError):
    """Outgoing probabilities of a DTMC state do not sum to 1."""


class NegativeOrZeroWeight(ModelValidationError):
    """A transition probability or rate is not strictly positive and finite."""


class DanglingTarget(ModelValidationError):
    """A state reference points outside the model."""


class EmptyDtmcRow(ModelValidationError):
    """A DTMC state has no outgoing transitions."""


class DuplicateTransition(ModelValidationError):
    """The same (source, target) pair appears twice."""


# Formulas and simulation


class BoundTypeMismatch(ModelCheckingError, ValueError):
    """A time bound was used against a discrete-time model."""


class UnsupportedFormula(ModelCheckingError, ValueError):
    """The formula has a shape the requested procedure cannot check."""


class NestedNotSupported(UnsupportedFormula):
    """Nested probabilistic operators cannot be checked over recorded traces."""


class HardCapExceeded(ModelCheckingError):
    """A trace reached the simulation step cap before its bound."""


class TraceTooShort(ModelCheckingError):
    """A trace does not reach the depth the formula needs."""


# Hypothesis testing


class InvalidStrength(ModelCheckingError, ValueError):
    """Type-I/Type-II error bounds that do not define a usable test."""


class InvalidTestParams(ModelCheckingError, ValueError):
    """Thresholds that do not define an indifference region."""


class PlanSearchExhausted(ModelCheckingError):
    """No single sampling plan exists below the search limit."""


class WrongSampleCount(ModelCheckingError, ValueError):
    """A fixed-size plan received the wrong number of outcomes."""


class AlreadyDecided(ModelCheckingError):
    """A sequential test was stepped after reaching a decision."""


class MaxSamplesExceeded(ModelCheckingError):
    """A sequential test did not decide within its sample budget."""


class OutcomeStreamExhausted(ModelCheckingError):
    """The outcome stream ended before a sequential test decided."""


class RegionCollapsed(ModelCheckingError):
    """Inner test errors leave no indifference region for the outer test."""
