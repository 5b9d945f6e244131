"""Command-line runs: verification, black-box checks, plans, strength and simulation."""

import logging
import sys
from pathlib import Path

import yaml
from pydantic import ValidationError

from src.core.blackbox import verify_blackbox
from src.core.config import ExitStatus
from src.core.errors import ModelCheckingError
from src.core.formula_parser import parse_formula
from src.core.model_parser import load_model, render_model
from src.core.random_streams import SampleKey
from src.core.simulator import DepthBound, sample_path
from src.core.ssp import ssp_errors, ssp_plan
from src.core.strength import estimate_strength
from src.core.verifier import verify
from src.models.formula import Steps, Time
from src.models.generated import VerificationConfiguration
from src.models.hypothesis import TestMethod, TestParams
from src.models.verification import Report, VerifyConfig
from src.outputs import get_report_renderer
from src.utils.trace_format import load_traces, render_trace

logger = logging.getLogger(__name__)


def load_config(config_path: str) -> dict:
    """
    Load YAML configuration file.

    Args:
        config_path: Path to YAML config file

    Returns:
        Configuration dictionary (empty for an empty file)

    Raises:
        FileNotFoundError: If config file doesn't exist
        yaml.YAMLError: If config file is invalid
    """
    config_file = Path(config_path)
    if not config_file.exists():
        raise FileNotFoundError(f"Config file not found: {config_path}")

    with open(config_file) as f:
        config = yaml.safe_load(f)

    return config or {}


def validate_config(config: dict) -> VerificationConfiguration:
    """
    Validate configuration using Pydantic schema validation.

    Args:
        config: Configuration dictionary

    Returns:
        Validated configuration

    Raises:
        ValueError: If configuration is invalid
    """
    try:
        return VerificationConfiguration.model_validate(config)
    except ValidationError as e:
        # Convert Pydantic errors to ValueError for consistency
        raise ValueError(f"Configuration validation failed:\n{e}") from e


def build_verify_config(file_config: VerificationConfiguration | None, overrides: dict) -> VerifyConfig:
    """
    Merge built-in defaults, config file values and command-line values.

    Args:
        file_config: Validated config file, if one was given
        overrides: Command-line values; ``None`` means not given

    Returns:
        Run configuration; later sources win
    """
    values: dict = {}
    if file_config is not None:
        data = file_config.model_dump(mode="json", exclude_none=True)
        inner = data.pop("inner", {})
        values.update(data)
        values.update({f"inner_{name}": value for name, value in inner.items()})

    values.update({name: value for name, value in overrides.items() if value is not None})
    return VerifyConfig(**values)


def _one_line(error: BaseException) -> str:
    return "; ".join(line.strip() for line in str(error).splitlines() if line.strip()) or type(error).__name__


def _fail(error: Exception) -> int:
    """Print a diagnostic for ``error`` and return its exit status."""
    if isinstance(error, ValueError | yaml.YAMLError):
        status = ExitStatus.USAGE_ERROR
    elif isinstance(error, ModelCheckingError | OSError):
        status = ExitStatus.RUNTIME_ERROR
    else:
        logger.exception(f"Unexpected error: {error}")
        status = ExitStatus.RUNTIME_ERROR

    print(f"error: {_one_line(error)}", file=sys.stderr)
    return status


def _verdict_status(report: Report) -> int:
    return ExitStatus.ACCEPT_H0 if report.holds else ExitStatus.ACCEPT_H1


def run_verify(
    model_path: str,
    prop: str,
    overrides: dict,
    config_path: str | None = None,
    output_format: str = "text",
    include_timing: bool = True,
) -> int:
    """
    Verify a formula on a model file and print the report.

    Args:
        model_path: Path to the model file
        prop: Formula text
        overrides: Command-line values of :class:`VerifyConfig` fields (``None`` when not given)
        config_path: Optional YAML run configuration
        output_format: Report renderer name
        include_timing: Include the wall-clock time in the report

    Returns:
        0 if the formula holds, 3 if it does not, 1 or 2 on errors
    """
    try:
        file_config = None
        if config_path:
            logger.info(f"Loading configuration from: {config_path}")
            file_config = validate_config(load_config(config_path))
        config = build_verify_config(file_config, overrides)
        renderer = get_report_renderer(output_format)

        model = load_model(model_path)
        formula = parse_formula(prop)
        report = verify(model, formula, config)

        sys.stdout.write(renderer.render(report, include_timing))
        return _verdict_status(report)
    except Exception as e:
        return _fail(e)


def run_blackbox(
    traces_path: str,
    model_path: str,
    prop: str,
    theta: float | None = None,
    extend: bool = False,
    output_format: str = "text",
    include_timing: bool = True,
) -> int:
    """
    Decide a formula from a trace file and print the report.

    Args:
        traces_path: Path to the trace file
        model_path: Model file supplying the state labels
        prop: Formula text
        theta: Threshold overriding the formula's
        extend: Repeat the last state of every trace past its end
        output_format: Report renderer name
        include_timing: Include the wall-clock time in the report

    Returns:
        0 if the formula holds, 3 if it does not, 1 or 2 on errors
    """
    try:
        renderer = get_report_renderer(output_format)
        # Only the labels and the state space are used
        model = load_model(model_path, structure_only=True)
        formula = parse_formula(prop)
        traces = load_traces(traces_path, model.kind, model.n_states, extend)
        logger.info(f"Loaded {len(traces)} traces from {traces_path}")

        report = verify_blackbox(traces, model, formula, theta)
        sys.stdout.write(renderer.render(report, include_timing))
        return _verdict_status(report)
    except Exception as e:
        return _fail(e)


def run_plan(p0: float, p1: float, alpha: float, beta: float, n_max: int) -> int:
    """Print the smallest single sampling plan and its exact error probabilities."""
    try:
        plan = ssp_plan(p0, p1, alpha, beta, n_max)
        type1, type2 = ssp_errors(plan, p0, p1)
        print(plan)
        print(f"type1={type1:.6g} type2={type2:.6g}")
        return ExitStatus.ACCEPT_H0
    except Exception as e:
        return _fail(e)


def run_strength(
    p0: float,
    p1: float,
    alpha: float,
    beta: float,
    true_p: float,
    reps: int,
    method: str,
    seed: int,
    max_samples: int,
    progress: bool = False,
) -> int:
    """Print the empirical error rate and sample cost of a test next to its theoretical bounds."""
    try:
        params = TestParams(p0, p1, alpha, beta)
        estimate = estimate_strength(
            params, TestMethod(method), true_p, reps, seed=seed, max_samples=max_samples, progress=progress
        )

        print(
            f"error rate: {estimate.error_rate:.4f} ({estimate.errors}/{estimate.reps}, "
            f"standard error {estimate.standard_error:.4f})"
        )
        print(f"mean samples: {estimate.mean_samples:.2f}")
        if estimate.plan is not None:
            print(f"plan: {estimate.plan}")
        if estimate.expected_samples is not None:
            print(f"expected samples: {estimate.expected_samples:.2f}")
        print(f"bounds: type1<={estimate.type1_bound:.6g} type2<={estimate.type2_bound:.6g}")
        return ExitStatus.ACCEPT_H0
    except Exception as e:
        return _fail(e)


def run_simulate(
    model_path: str,
    samples: int,
    depth: int | None,
    horizon: float | None,
    seed: int,
    hard_cap: int,
    emit_model: str | None = None,
) -> int:
    """
    Print sampled traces from the initial state in the trace text format.

    Args:
        model_path: Path to the model file
        samples: Number of traces
        depth: Step bound (exclusive with ``horizon``)
        horizon: Time bound for continuous-time models
        seed: Seed; trace i uses the stream (seed, i)
        hard_cap: Step cap of a single trace
        emit_model: Also write the model in canonical form to this path

    Returns:
        0 on success, 1 or 2 on errors
    """
    try:
        if samples < 0:
            raise ValueError(f"Number of samples must be non-negative, got {samples}")
        model = load_model(model_path)
        bound = DepthBound(Steps(depth) if depth is not None else Time(horizon), hard_cap)

        if emit_model:
            Path(emit_model).write_text(render_model(model), encoding="utf-8")
            logger.info(f"Wrote canonical model to {emit_model}")

        for i in range(samples):
            trace = sample_path(model, model.initial, SampleKey(seed, (i,)), bound)
            print(render_trace(trace, model.kind))

        logger.info(f"Sampled {samples} traces with bound {bound.kind}")
        return ExitStatus.ACCEPT_H0
    except Exception as e:
        return _fail(e)
