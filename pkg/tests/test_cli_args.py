"""Tests for CLI argument parsing and exit statuses."""

import json
from unittest.mock import patch

import pytest
import yaml

from src.main import run

COIN_HOLDS = "P>=0.8 [ F<=1 goal ]"


def test_verify_subcommand_arguments(coin_model_path):
    """Test that verify passes flag values to its handler."""
    test_args = ["smc", "verify", "--model", str(coin_model_path), "--prop", COIN_HOLDS, "--delta", "0.05",
                 "--method", "ssp", "--no-memo", "--json"]

    with patch("sys.argv", test_args), patch("src.main.cmd_verify") as mock_verify:
        from src.main import main

        mock_verify.return_value = 0
        with pytest.raises(SystemExit) as exc_info:
            main()

        assert exc_info.value.code == 0
        args = mock_verify.call_args[0][0]
        assert args.delta == 0.05
        assert args.method == "ssp"
        assert args.no_memo is True
        assert args.json is True
        assert args.alpha is None


def test_simulate_bounds_are_exclusive(coin_model_path, capsys):
    """Test that --depth and --time cannot be combined."""
    status = run(["simulate", "--model", str(coin_model_path), "--samples", "1", "--depth", "2", "--time", "1"])

    assert status == 1
    assert "error:" in capsys.readouterr().err


def test_no_command(capsys):
    """Test that running without a subcommand is a usage error."""
    assert run([]) == 1
    assert "error: no command given" in capsys.readouterr().err


def test_invalid_number(capsys):
    """Test that a malformed flag value is a usage error."""
    assert run(["plan", "--p0", "x", "--p1", "0", "--alpha", "0.01", "--beta", "0.01"]) == 1
    assert "error:" in capsys.readouterr().err


def test_plan_output(capsys):
    """Test the plan for a region without overlap."""
    status = run(["plan", "--p0", "1", "--p1", "0", "--alpha", "0.01", "--beta", "0.01"])

    out = capsys.readouterr().out.splitlines()
    assert status == 0
    assert out[0] == "n=1 c=0"
    assert out[1] == "type1=0 type2=0"


def test_plan_invalid_region(capsys):
    """Test that p1 >= p0 is a usage error."""
    assert run(["plan", "--p0", "0.3", "--p1", "0.5", "--alpha", "0.01", "--beta", "0.01"]) == 1
    assert capsys.readouterr().err.startswith("error:")


def test_verify_holds(coin_model_path, capsys):
    """Test exit status 0 when the property holds."""
    status = run(["verify", "--model", str(coin_model_path), "--prop", COIN_HOLDS, "--alpha", "0.01", "--beta",
                  "0.01", "--delta", "0.05", "--seed", "7"])

    assert status == 0
    assert "verdict: H0 (holds)" in capsys.readouterr().out


def test_verify_does_not_hold(coin_model_path):
    """Test exit status 3 when the property does not hold."""
    status = run(["verify", "--model", str(coin_model_path), "--prop", "P>=0.95 [ F<=1 goal ]", "--delta", "0.02",
                  "--seed", "7"])
    assert status == 3


def test_verify_missing_model(tmp_path, capsys):
    """Test that an unreadable model file is a runtime error."""
    status = run(["verify", "--model", str(tmp_path / "none.dtmc"), "--prop", COIN_HOLDS])

    assert status == 2
    assert "not found" in capsys.readouterr().err


def test_verify_bad_formula(coin_model_path, capsys):
    """Test that a malformed formula is a usage error with its position."""
    status = run(["verify", "--model", str(coin_model_path), "--prop", "P>=0.8 [ F<=1 goal"])

    assert status == 1
    assert "error: line 1" in capsys.readouterr().err


def test_verify_bad_model(tmp_path, capsys):
    """Test that an invalid model is a usage error."""
    model_path = tmp_path / "bad.dtmc"
    model_path.write_text("dtmc\nstates 2\ninit 0\ntrans 0 1 0.5\ntrans 1 1 1.0\n")

    assert run(["verify", "--model", str(model_path), "--prop", COIN_HOLDS]) == 1
    assert "line 4" in capsys.readouterr().err


def test_verify_config_file(coin_model_path, tmp_path, capsys):
    """Test that values from the config file are used and flags override them."""
    config_path = tmp_path / "config.yaml"
    config_path.write_text(yaml.safe_dump({"delta": 0.02, "seed": 7, "method": "ssp"}))
    base = ["verify", "--model", str(coin_model_path), "--prop", "P>=0.95 [ F<=1 goal ]", "--config", str(config_path),
            "--json", "--no-timing"]

    assert run(base) == 3
    assert json.loads(capsys.readouterr().out)["method"] == "ssp"

    assert run([*base, "--method", "sprt"]) == 3
    assert json.loads(capsys.readouterr().out)["method"] == "sprt"


def test_verify_workers(coin_model_path, capsys):
    """Test that --workers gives the same report as a sequential run."""
    base = ["verify", "--model", str(coin_model_path), "--prop", COIN_HOLDS, "--delta", "0.02", "--seed", "4", "--json",
            "--no-timing"]

    assert run(base) == 0
    sequential = capsys.readouterr().out
    assert run([*base, "--workers", "3"]) == 0
    assert capsys.readouterr().out == sequential

    assert run([*base, "--workers", "0"]) == 1
    assert "workers must be positive" in capsys.readouterr().err


def test_verify_invalid_config(coin_model_path, tmp_path, capsys):
    """Test that unknown config keys are rejected."""
    config_path = tmp_path / "config.yaml"
    config_path.write_text("alpha: 0.01\nunknown_key: 3\n")

    status = run(["verify", "--model", str(coin_model_path), "--prop", COIN_HOLDS, "--config", str(config_path)])

    assert status == 1
    assert "Configuration validation failed" in capsys.readouterr().err


def test_verify_workers_from_config(coin_model_path, tmp_path, capsys):
    """Test that the worker count is read from the config file and range checked."""
    config_path = tmp_path / "config.yaml"
    base = ["verify", "--model", str(coin_model_path), "--prop", COIN_HOLDS, "--config", str(config_path)]

    config_path.write_text("workers: 2\nseed: 4\n")
    assert run(base) == 0

    config_path.write_text("workers: 0\n")
    assert run(base) == 1
    assert "Configuration validation failed" in capsys.readouterr().err


def test_blackbox_command(coin_model_path, tmp_path, capsys):
    """Test a black-box run from a trace file."""
    traces_path = tmp_path / "traces.txt"
    traces_path.write_text("0 1\n" * 8 + "0 2\n" * 2)

    status = run(["blackbox", "--traces", str(traces_path), "--model", str(coin_model_path), "--prop",
                  "P>=0.5 [ F<=1 goal ]", "--no-timing"])

    out = capsys.readouterr().out
    assert status == 0
    assert "blackbox: n=10 c=4 successes=8 theta=0.5" in out
    assert "elapsed" not in out


def test_blackbox_ignores_model_probabilities(tmp_path, capsys):
    """Test that the model of a black-box run only needs valid states and labels."""
    model_path = tmp_path / "labels.dtmc"
    model_path.write_text("dtmc\nstates 3\ninit 0\nlabel goal 1\ntrans 0 1 0.3\n")
    traces_path = tmp_path / "traces.txt"
    traces_path.write_text("0 1\n" * 8 + "0 2\n" * 2)

    status = run(["blackbox", "--traces", str(traces_path), "--model", str(model_path), "--prop",
                  "P>=0.5 [ F<=1 goal ]", "--no-timing"])

    assert status == 0
    assert "probabilities are ignored" in capsys.readouterr().out

    assert run(["verify", "--model", str(model_path), "--prop", "P>=0.5 [ F<=1 goal ]"]) == 1


def test_blackbox_short_traces(coin_model_path, tmp_path):
    """Test that traces shorter than the bound are a runtime error unless extended."""
    traces_path = tmp_path / "traces.txt"
    traces_path.write_text("0 1\n0 1\n0 2\n")
    base = ["blackbox", "--traces", str(traces_path), "--model", str(coin_model_path), "--prop", "P>=0.5 [ F<=5 goal ]"]

    assert run(base) == 2
    assert run([*base, "--extend-traces"]) == 0


def test_strength_command(capsys):
    """Test the strength summary for a single sampling plan."""
    status = run(["strength", "--p0", "0.5", "--p1", "0.3", "--alpha", "0.2", "--beta", "0.1", "--true-p", "0.4",
                  "--reps", "50", "--method", "ssp", "--seed", "1"])

    out = capsys.readouterr().out
    assert status == 0
    assert out.startswith("error rate: 0.0000 (0/50")
    assert "plan: n=" in out
    assert "bounds: type1<=" in out


def test_simulate_command(coin_model_path, tmp_path, capsys):
    """Test trace output and the canonical model file."""
    emitted = tmp_path / "canonical.dtmc"
    status = run(["simulate", "--model", str(coin_model_path), "--samples", "3", "--depth", "2", "--seed", "7",
                  "--emit-model", str(emitted)])

    lines = capsys.readouterr().out.splitlines()
    assert status == 0
    assert len(lines) == 3
    assert all(line.startswith("0 ") for line in lines)
    assert emitted.read_text().startswith("dtmc\nstates 3\ninit 0\n")


def test_schema_yaml(capsys):
    """Test printing the raw configuration schema."""
    assert run(["schema", "--yaml"]) == 0
    schema = yaml.safe_load(capsys.readouterr().out)
    assert "alpha" in schema["properties"]
