"""Hypothesis test configuration and results."""

import math
from dataclasses import dataclass
from enum import StrEnum

from src.core.errors import InvalidStrength, InvalidTestParams


class Hypothesis(StrEnum):
    """H0: p >= p0 (the property holds), H1: p <= p1 (it does not)."""

    H0 = "H0"
    H1 = "H1"


class TestMethod(StrEnum):
    __test__ = False  # not a pytest class

    SSP = "ssp"
    SPRT = "sprt"


@dataclass(frozen=True)
class TestParams:
    """Indifference region (p1, p0) and strength (alpha, beta) of a test.

    Attributes:
        p0: Success probability at or above which H0 holds
        p1: Success probability at or below which H1 holds
        alpha: Bound on the probability of accepting H1 when H0 holds
        beta: Bound on the probability of accepting H0 when H1 holds
        theta: Threshold the region was built around, if any
        delta: Half-width the region was built with, if any
    """

    __test__ = False  # not a pytest class

    p0: float
    p1: float
    alpha: float
    beta: float
    theta: float | None = None
    delta: float | None = None

    def __post_init__(self):
        """Validate the region and the strength."""
        if not (0.0 <= self.p1 < self.p0 <= 1.0):
            raise InvalidTestParams(f"Need 0 <= p1 < p0 <= 1, got p0={self.p0}, p1={self.p1}")
        for name, value in (("alpha", self.alpha), ("beta", self.beta)):
            if not (0.0 < value < 1.0 and math.isfinite(value)):
                raise InvalidStrength(f"{name} must be in (0, 1), got {value}")

    @classmethod
    def for_threshold(
        cls,
        theta: float,
        delta: float,
        alpha: float,
        beta: float,
        allow_zero_delta: bool = False,
    ) -> "TestParams":
        """
        Build the region [theta - delta, theta + delta] clamped to [0, 1].

        Args:
            theta: Probability threshold
            delta: Half-width of the indifference region
            alpha: Type-I error bound
            beta: Type-II error bound
            allow_zero_delta: Accept delta = 0 for 0 < theta < 1

        Raises:
            InvalidTestParams: If theta or delta are out of range, or delta = 0 is not allowed
            InvalidStrength: If alpha or beta are out of range
        """
        if not 0.0 <= theta <= 1.0:
            raise InvalidTestParams(f"theta must be in [0, 1], got {theta}")
        if not (delta >= 0.0 and math.isfinite(delta)):
            raise InvalidTestParams(f"delta must be non-negative, got {delta}")
        if delta == 0.0 and 0.0 < theta < 1.0 and not allow_zero_delta:
            raise InvalidTestParams(
                f"delta must be positive for theta={theta}: the test needs an indifference region"
            )
        return cls(
            p0=min(1.0, theta + delta),
            p1=max(0.0, theta - delta),
            alpha=alpha,
            beta=beta,
            theta=theta,
            delta=delta,
        )


@dataclass(frozen=True)
class SspPlan:
    """Single sampling plan: draw n outcomes, accept H0 iff more than c succeed."""

    n: int
    c: int

    def __post_init__(self):
        """Validate plan bounds."""
        if self.n < 1:
            raise ValueError(f"Plan size must be positive, got {self.n}")
        if not -1 <= self.c <= self.n:
            raise ValueError(f"Acceptance number must be in [-1, {self.n}], got {self.c}")

    def __str__(self) -> str:
        return f"n={self.n} c={self.c}"


@dataclass(frozen=True)
class SprtState:
    """Running state of a sequential probability ratio test.

    ``log_ratio`` is ``d_m ln(p1/p0) + (m - d_m) ln((1-p1)/(1-p0))``: large
    values favour H1.
    """

    m: int
    d_m: int
    log_ratio: float
    log_a: float
    log_b: float
    decision: Hypothesis | None = None

    def __post_init__(self):
        """Validate the Wald thresholds."""
        if not self.log_b < 0.0 < self.log_a:
            raise InvalidStrength(f"Need log_b < 0 < log_a, got log_b={self.log_b}, log_a={self.log_a}")


@dataclass(frozen=True)
class Verdict:
    """Result of one hypothesis test.

    Attributes:
        accepted: Hypothesis accepted
        samples_used: Number of outcomes consumed
        params: Test parameters, or None for a test without indifference region
        method: Test used
        successes: Number of successful outcomes among those consumed
    """

    accepted: Hypothesis
    samples_used: int
    params: TestParams | None
    method: TestMethod
    successes: int = 0

    @property
    def holds(self) -> bool:
        """True when the tested property is accepted."""
        return self.accepted is Hypothesis.H0
