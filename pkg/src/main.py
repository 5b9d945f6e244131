"""Main application entry point."""

import argparse
import logging
import sys

from src.core.config import (
    DEFAULT_HARD_CAP,
    DEFAULT_MAX_SAMPLES,
    DEFAULT_PLAN_N_MAX,
    DEFAULT_SEED,
    DEFAULT_WORKERS,
    ExitStatus,
)


def setup_logging(verbose: bool = False):
    """
    Set up logging configuration.

    Log records go to standard error; standard output carries results only.

    Args:
        verbose: Enable verbose logging
    """
    level = logging.DEBUG if verbose else logging.INFO
    logging.basicConfig(
        level=level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=[
            logging.StreamHandler(sys.stderr),
        ],
        force=True,
    )


class _ArgumentParser(argparse.ArgumentParser):
    """Argument parser whose usage errors exit with status 1 and an ``error:`` line."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(ExitStatus.USAGE_ERROR)


def _output_format(args) -> str:
    return "json" if args.json else "text"


def cmd_verify(args):
    """Handle verify subcommand."""
    setup_logging(args.verbose)
    from src.cli import run_verify

    overrides = {
        "alpha": args.alpha,
        "beta": args.beta,
        "delta": args.delta,
        "method": args.method,
        "seed": args.seed,
        "max_samples": args.max_samples,
        "hard_cap": args.hard_cap,
        "plan_n_max": args.plan_n_max,
        "inner_alpha": args.inner_alpha,
        "inner_beta": args.inner_beta,
        "inner_delta": args.inner_delta,
        "composition_mode": "conservative" if args.conservative_composition else None,
        "memoize": False if args.no_memo else None,
        "workers": args.workers,
    }
    return run_verify(
        args.model,
        args.prop,
        overrides,
        config_path=args.config,
        output_format=_output_format(args),
        include_timing=not args.no_timing,
    )


def cmd_blackbox(args):
    """Handle blackbox subcommand."""
    setup_logging(args.verbose)
    from src.cli import run_blackbox

    return run_blackbox(
        args.traces,
        args.model,
        args.prop,
        theta=args.theta,
        extend=args.extend_traces,
        output_format=_output_format(args),
        include_timing=not args.no_timing,
    )


def cmd_plan(args):
    """Handle plan subcommand."""
    setup_logging(args.verbose)
    from src.cli import run_plan

    return run_plan(args.p0, args.p1, args.alpha, args.beta, args.n_max)


def cmd_strength(args):
    """Handle strength subcommand."""
    setup_logging(args.verbose)
    from src.cli import run_strength

    return run_strength(
        args.p0,
        args.p1,
        args.alpha,
        args.beta,
        args.true_p,
        args.reps,
        args.method,
        args.seed,
        args.max_samples,
        progress=args.progress,
    )


def cmd_simulate(args):
    """Handle simulate subcommand."""
    setup_logging(args.verbose)
    from src.cli import run_simulate

    return run_simulate(
        args.model,
        args.samples,
        args.depth,
        args.time,
        args.seed,
        args.hard_cap,
        emit_model=args.emit_model,
    )


def cmd_schema(args):
    """Handle schema subcommand - print configuration schema documentation."""
    from pathlib import Path

    # Get the schema file path
    schema_path = Path(__file__).parent.parent / "schemas" / "config.schema.yaml"

    if not schema_path.exists():
        print(f"error: schema file not found at {schema_path}", file=sys.stderr)
        return ExitStatus.RUNTIME_ERROR

    try:
        # If --yaml flag is provided, just print the raw YAML
        if args.yaml:
            with open(schema_path) as f:
                print(f.read())
            return ExitStatus.ACCEPT_H0

        # Otherwise, convert to markdown and render with rich
        import yaml
        from jsonschema2md import Parser
        from rich.console import Console
        from rich.markdown import Markdown

        with open(schema_path) as f:
            schema_dict = yaml.safe_load(f)

        parser = Parser()
        md_lines = parser.parse_schema(schema_dict)
        markdown_text = "\n".join(md_lines)

        console = Console()
        console.print(Markdown(markdown_text))

        return ExitStatus.ACCEPT_H0

    except Exception as e:
        print(f"error: cannot generate schema documentation: {e}", file=sys.stderr)
        return ExitStatus.RUNTIME_ERROR


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("-v", "--verbose", action="store_true", help="Enable verbose logging")


def _add_report_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--json", action="store_true", help="Print the report as a single JSON object")
    parser.add_argument(
        "--no-timing", action="store_true", help="Leave the wall-clock time out of the report (reproducible output)"
    )


def build_parser() -> argparse.ArgumentParser:
    """Build the command-line parser with all subcommands."""
    parser = _ArgumentParser(
        prog="smc",
        description="Statistical model checking of bounded probabilistic properties on Markov chains",
    )

    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    # Verify subcommand
    verify_parser = subparsers.add_parser("verify", help="Verify a formula on a model by simulation")
    verify_parser.add_argument("--model", required=True, help="Model file (dtmc or ctmc)")
    verify_parser.add_argument("--prop", required=True, help='Formula, e.g. "P>=0.8 [ F<=10 goal ]"')
    verify_parser.add_argument("--config", help="YAML run configuration; flags override its values")
    verify_parser.add_argument("--alpha", type=float, help="Type-I error bound (default 0.01)")
    verify_parser.add_argument("--beta", type=float, help="Type-II error bound (default 0.01)")
    verify_parser.add_argument("--delta", type=float, help="Indifference half-width (default 0.01)")
    verify_parser.add_argument(
        "--method", choices=["sprt", "ssp"], help="Test for the outermost operators (default sprt)"
    )
    verify_parser.add_argument("--seed", type=int, help=f"Random seed (default {DEFAULT_SEED})")
    verify_parser.add_argument(
        "--max-samples", type=int, help=f"Sequential test sample limit (default {DEFAULT_MAX_SAMPLES})"
    )
    verify_parser.add_argument("--hard-cap", type=int, help=f"Step cap of a single trace (default {DEFAULT_HARD_CAP})")
    verify_parser.add_argument(
        "--plan-n-max", type=int, help=f"Largest single sampling plan (default {DEFAULT_PLAN_N_MAX})"
    )
    verify_parser.add_argument("--inner-alpha", type=float, help="Type-I error bound of nested tests (default --alpha)")
    verify_parser.add_argument("--inner-beta", type=float, help="Type-II error bound of nested tests (default --beta)")
    verify_parser.add_argument(
        "--inner-delta", type=float, help="Indifference half-width of nested tests (default --delta)"
    )
    verify_parser.add_argument(
        "--conservative-composition",
        action="store_true",
        help="Bound conjunctions by the largest Type-I error of their operands",
    )
    verify_parser.add_argument("--no-memo", action="store_true", help="Repeat nested tests for states already decided")
    verify_parser.add_argument(
        "--workers", type=int, help=f"Threads evaluating outermost samples concurrently (default {DEFAULT_WORKERS})"
    )
    _add_report_options(verify_parser)
    _add_common(verify_parser)
    verify_parser.set_defaults(func=cmd_verify)

    # Blackbox subcommand
    blackbox_parser = subparsers.add_parser("blackbox", help="Decide a formula from recorded traces")
    blackbox_parser.add_argument("--traces", required=True, help="Trace file")
    blackbox_parser.add_argument("--model", required=True, help="Model file supplying the state labels")
    blackbox_parser.add_argument("--prop", required=True, help="Formula without nested probabilistic operators")
    blackbox_parser.add_argument("--theta", type=float, help="Threshold (default: the formula's)")
    blackbox_parser.add_argument(
        "--extend-traces", action="store_true", help="Treat every trace as staying in its last state forever"
    )
    _add_report_options(blackbox_parser)
    _add_common(blackbox_parser)
    blackbox_parser.set_defaults(func=cmd_blackbox)

    # Plan subcommand
    plan_parser = subparsers.add_parser("plan", help="Print the smallest single sampling plan")
    plan_parser.add_argument("--p0", type=float, required=True, help="Lower end of H0")
    plan_parser.add_argument("--p1", type=float, required=True, help="Upper end of H1")
    plan_parser.add_argument("--alpha", type=float, required=True, help="Type-I error bound")
    plan_parser.add_argument("--beta", type=float, required=True, help="Type-II error bound")
    plan_parser.add_argument("--n-max", type=int, default=DEFAULT_PLAN_N_MAX, help="Largest plan size searched")
    _add_common(plan_parser)
    plan_parser.set_defaults(func=cmd_plan)

    # Strength subcommand
    strength_parser = subparsers.add_parser("strength", help="Estimate the error rate of a test by simulation")
    strength_parser.add_argument("--p0", type=float, required=True, help="Lower end of H0")
    strength_parser.add_argument("--p1", type=float, required=True, help="Upper end of H1")
    strength_parser.add_argument("--alpha", type=float, required=True, help="Type-I error bound")
    strength_parser.add_argument("--beta", type=float, required=True, help="Type-II error bound")
    strength_parser.add_argument("--true-p", type=float, required=True, help="Success probability of the outcomes")
    strength_parser.add_argument("--reps", type=int, required=True, help="Number of repetitions")
    strength_parser.add_argument("--method", choices=["sprt", "ssp"], default="sprt", help="Test to evaluate")
    strength_parser.add_argument("--seed", type=int, default=DEFAULT_SEED, help="Random seed")
    strength_parser.add_argument(
        "--max-samples", type=int, default=DEFAULT_MAX_SAMPLES, help="Sequential test sample limit"
    )
    strength_parser.add_argument("--progress", action="store_true", help="Show a progress bar")
    _add_common(strength_parser)
    strength_parser.set_defaults(func=cmd_strength)

    # Simulate subcommand
    simulate_parser = subparsers.add_parser("simulate", help="Print sampled traces in the trace text format")
    simulate_parser.add_argument("--model", required=True, help="Model file")
    simulate_parser.add_argument("--samples", type=int, required=True, help="Number of traces")
    bound = simulate_parser.add_mutually_exclusive_group(required=True)
    bound.add_argument("--depth", type=int, help="Number of steps per trace")
    bound.add_argument("--time", type=float, help="Time horizon per trace (ctmc only)")
    simulate_parser.add_argument("--seed", type=int, default=DEFAULT_SEED, help="Random seed")
    simulate_parser.add_argument("--hard-cap", type=int, default=DEFAULT_HARD_CAP, help="Step cap of a single trace")
    simulate_parser.add_argument("--emit-model", metavar="PATH", help="Also write the model in canonical form")
    _add_common(simulate_parser)
    simulate_parser.set_defaults(func=cmd_simulate)

    # Schema subcommand
    schema_parser = subparsers.add_parser("schema", help="Print configuration schema documentation")
    schema_parser.add_argument(
        "--yaml", action="store_true", help="Output raw YAML schema instead of formatted documentation"
    )
    schema_parser.set_defaults(func=cmd_schema)

    return parser


def run(argv: list[str] | None = None) -> int:
    """
    Parse ``argv`` and run the selected subcommand.

    Returns:
        Exit status: 0 accept H0 (or success), 3 accept H1, 1 usage error, 2 runtime error
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    if args.command is None:
        parser.print_help(sys.stderr)
        print("error: no command given", file=sys.stderr)
        return ExitStatus.USAGE_ERROR

    return int(args.func(args))


def main():
    """Main application entry point."""
    sys.exit(run())


if __name__ == "__main__":
    main()
