# generated by datamodel-codegen:
#   filename:  config.schema.yaml
#   timestamp: 2026-10-19T09:12:40+00:00
#   version:   0.49.0

from __future__ import annotations

from enum import StrEnum

from pydantic import BaseModel, ConfigDict, Field


class Method(StrEnum):
    """
    Hypothesis test for the outermost probabilistic operators
    """

    sprt = "sprt"
    ssp = "ssp"


class CompositionMode(StrEnum):
    """
    How conjunctions combine the error bounds of their operands
    """

    standard = "standard"
    conservative = "conservative"


class Inner(BaseModel):
    """
    Parameters of the tests behind nested probabilistic operators (default to the outer values)
    """

    model_config = ConfigDict(
        extra="forbid",
    )
    alpha: float | None = Field(default=None, gt=0.0, lt=1.0)
    """
    Type-I error bound of nested tests
    """
    beta: float | None = Field(default=None, gt=0.0, lt=1.0)
    """
    Type-II error bound of nested tests
    """
    delta: float | None = Field(default=None, ge=0.0)
    """
    Indifference half-width of nested tests
    """


class VerificationConfiguration(BaseModel):
    """
    Parameters of a statistical model checking run; values given on the command line take precedence
    """

    model_config = ConfigDict(
        extra="forbid",
    )
    alpha: float | None = Field(default=None, gt=0.0, lt=1.0)
    """
    Bound on the probability of rejecting a property that holds (Type-I error)
    """
    beta: float | None = Field(default=None, gt=0.0, lt=1.0)
    """
    Bound on the probability of accepting a property that does not hold (Type-II error)
    """
    delta: float | None = Field(default=None, ge=0.0)
    """
    Half-width of the indifference region around each probability threshold
    """
    method: Method | None = None
    """
    Hypothesis test for the outermost probabilistic operators
    """
    seed: int | None = Field(default=None, ge=0, le=18446744073709551615)
    """
    Seed of all random streams of the run
    """
    max_samples: int | None = Field(default=None, ge=1)
    """
    Observations after which an undecided sequential test fails
    """
    hard_cap: int | None = Field(default=None, ge=1)
    """
    Largest number of transitions of a single simulated trace
    """
    plan_n_max: int | None = Field(default=None, ge=1)
    """
    Largest sample size considered when synthesizing a single sampling plan
    """
    composition_mode: CompositionMode | None = None
    """
    How conjunctions combine the error bounds of their operands
    """
    memoize: bool | None = None
    """
    Reuse nested test results for the same state and operator within a run
    """
    workers: int | None = Field(default=None, ge=1)
    """
    Threads that simulate and evaluate outermost samples concurrently
    """
    inner: Inner | None = None
    """
    Parameters of the tests behind nested probabilistic operators (default to the outer values)
    """
