"""Verification run configuration and reports."""

import math
from dataclasses import dataclass, field

from pydantic import BaseModel, ConfigDict, Field

from src.core.config import (
    DEFAULT_ALPHA,
    DEFAULT_BETA,
    DEFAULT_DELTA,
    DEFAULT_HARD_CAP,
    DEFAULT_MAX_SAMPLES,
    DEFAULT_PLAN_N_MAX,
    DEFAULT_SEED,
    DEFAULT_WORKERS,
    REPORT_SCHEMA_VERSION,
)
from src.core.errors import InvalidStrength, InvalidTestParams
from src.core.property_logic import CompositionMode
from src.models.hypothesis import Hypothesis, TestMethod

_U64_MAX = 2**64 - 1


def _check_strength(name: str, value: float) -> None:
    if not (0.0 < value < 1.0 and math.isfinite(value)):
        raise InvalidStrength(f"{name} must be in (0, 1), got {value}")


def _check_delta(name: str, value: float) -> None:
    if not (value >= 0.0 and math.isfinite(value)):
        raise InvalidTestParams(f"{name} must be non-negative, got {value}")


@dataclass
class VerifyConfig:
    """Parameters of a verification run.

    The outermost probabilistic operators are tested with (alpha, beta, delta)
    and ``method``. Nested operators are always tested with SPRT using the
    inner parameters, which default to the outer ones.
    """

    alpha: float = DEFAULT_ALPHA
    beta: float = DEFAULT_BETA
    delta: float = DEFAULT_DELTA
    method: TestMethod = TestMethod.SPRT
    seed: int = DEFAULT_SEED
    max_samples: int = DEFAULT_MAX_SAMPLES
    hard_cap: int = DEFAULT_HARD_CAP
    plan_n_max: int = DEFAULT_PLAN_N_MAX
    composition_mode: CompositionMode = CompositionMode.STANDARD
    memoize: bool = True
    workers: int = DEFAULT_WORKERS
    inner_alpha: float | None = None
    inner_beta: float | None = None
    inner_delta: float | None = None

    def __post_init__(self):
        """Validate the parameters and fill in the inner defaults."""
        self.method = TestMethod(self.method)
        self.composition_mode = CompositionMode(self.composition_mode)
        if self.inner_alpha is None:
            self.inner_alpha = self.alpha
        if self.inner_beta is None:
            self.inner_beta = self.beta
        if self.inner_delta is None:
            self.inner_delta = self.delta

        for name in ("alpha", "beta", "inner_alpha", "inner_beta"):
            _check_strength(name, getattr(self, name))
        for name in ("delta", "inner_delta"):
            _check_delta(name, getattr(self, name))

        if not 0 <= self.seed <= _U64_MAX:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.max_samples < 1:
            raise ValueError(f"max_samples must be positive, got {self.max_samples}")
        if self.hard_cap < 1:
            raise ValueError(f"hard_cap must be positive, got {self.hard_cap}")
        if self.plan_n_max < 1:
            raise ValueError(f"plan_n_max must be positive, got {self.plan_n_max}")
        if self.workers < 1:
            raise ValueError(f"workers must be positive, got {self.workers}")


@dataclass
class LevelReport:
    """Statistics of one probabilistic operator of the verified formula.

    Attributes:
        level: Nesting depth, 0 for the outermost operators
        node_id: Pre-order index of the operator in the formula
        theta: Threshold of the operator
        p0: Effective lower end of H0 after adjusting for inner errors
        p1: Effective upper end of H1 after adjusting for inner errors
        method: Test used for this operator
        tests: Number of hypothesis tests run
        samples: Outcomes consumed over all tests
        accepted_h0: Tests that accepted H0
        accepted_h1: Tests that accepted H1
        memo_hits: Checks answered from earlier tests on the same state
    """

    level: int
    node_id: int
    theta: float
    p0: float
    p1: float
    method: TestMethod
    tests: int = 0
    samples: int = 0
    accepted_h0: int = 0
    accepted_h1: int = 0
    memo_hits: int = 0


@dataclass(frozen=True)
class BlackboxSummary:
    """Plan applied to a fixed set of recorded traces."""

    n: int
    c: int
    successes: int
    theta: float


@dataclass
class Report:
    """Outcome of a verification run.

    ``type1`` and ``type2`` are the composed error bounds of the verdict;
    ``levels`` holds one entry per probabilistic operator that was tested.
    """

    verdict: Hypothesis
    formula: str
    method: TestMethod
    type1: float
    type2: float
    levels: list[LevelReport] = field(default_factory=list)
    elapsed_seconds: float = 0.0
    warnings: list[str] = field(default_factory=list)
    blackbox: BlackboxSummary | None = None

    @property
    def holds(self) -> bool:
        return self.verdict is Hypothesis.H0

    @property
    def samples_used(self) -> int:
        """Outcomes consumed by the outermost tests."""
        return sum(level.samples for level in self.levels if level.level == 0)


# JSON document


class LevelDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    level: int
    node_id: int
    theta: float
    p0: float
    p1: float
    method: str
    tests: int
    samples: int
    accepted_h0: int
    accepted_h1: int
    memo_hits: int


class BlackboxDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n: int
    c: int
    successes: int
    theta: float


class ReportDocument(BaseModel):
    """Serialized form of a :class:`Report`, versioned by the ``schema`` field."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    schema_version: int = Field(default=REPORT_SCHEMA_VERSION, alias="schema")
    verdict: Hypothesis
    holds: bool
    formula: str
    method: str
    type1: float
    type2: float
    samples_used: int
    levels: list[LevelDocument]
    warnings: list[str]
    blackbox: BlackboxDocument | None = None
    elapsed_seconds: float | None = None

    @classmethod
    def from_report(cls, report: Report, include_timing: bool = True) -> "ReportDocument":
        """
        Build the document for a report.

        Args:
            report: Verification report
            include_timing: Keep the wall-clock time; drop it for byte-identical output across runs
        """
        blackbox = None
        if report.blackbox is not None:
            blackbox = BlackboxDocument(
                n=report.blackbox.n,
                c=report.blackbox.c,
                successes=report.blackbox.successes,
                theta=report.blackbox.theta,
            )
        return cls(
            verdict=report.verdict,
            holds=report.holds,
            formula=report.formula,
            method=str(report.method),
            type1=report.type1,
            type2=report.type2,
            samples_used=report.samples_used,
            levels=[
                LevelDocument(
                    level=level.level,
                    node_id=level.node_id,
                    theta=level.theta,
                    p0=level.p0,
                    p1=level.p1,
                    method=str(level.method),
                    tests=level.tests,
                    samples=level.samples,
                    accepted_h0=level.accepted_h0,
                    accepted_h1=level.accepted_h1,
                    memo_hits=level.memo_hits,
                )
                for level in report.levels
            ],
            warnings=list(report.warnings),
            blackbox=blackbox,
            elapsed_seconds=report.elapsed_seconds if include_timing else None,
        )

    def to_json(self) -> str:
        exclude = set() if self.elapsed_seconds is not None else {"elapsed_seconds"}
        return self.model_dump_json(by_alias=True, exclude=exclude, indent=2)
