"""End-to-end runs of the command line on the bundled models."""

import json

import pytest

from src.main import run

NESTED_PROPERTY = "P>=0.5 [ F<=3 P>=0.8 [ X b ] ]"

# Every transition is certain, so reports and traces do not depend on the seed
PIPELINE_TEXT = """\
dtmc
states 3
init 0
label done 2
trans 0 1 1.0
trans 1 2 1.0
trans 2 2 1.0
"""


@pytest.fixture
def pipeline_model_path(tmp_path):
    path = tmp_path / "pipeline.dtmc"
    path.write_text(PIPELINE_TEXT)
    return path


def _verify_nested(nested_model_path, capsys) -> tuple[int, str]:
    status = run(["verify", "--model", str(nested_model_path), "--prop", NESTED_PROPERTY, "--delta", "0.05",
                  "--seed", "11", "--json", "--no-timing"])
    return status, capsys.readouterr().out


def test_verify_json_report_snapshot(pipeline_model_path, capsys, tmp_path, snapshot):
    """Test the JSON report of a nested verification against its snapshot."""
    status = run(["verify", "--model", str(pipeline_model_path), "--prop", "P>=0.5 [ F<=2 P>=0.5 [ X done ] ]",
                  "--alpha", "0.01", "--beta", "0.01", "--delta", "0.25", "--inner-alpha", "0.25", "--inner-beta",
                  "0.25", "--inner-delta", "0.125", "--seed", "11", "--json", "--no-timing"])
    out = capsys.readouterr().out

    assert status == 0
    document = json.loads(out)
    assert document["holds"] is True
    assert [level["level"] for level in document["levels"]] == [0, 1]

    report_path = tmp_path / "report.json"
    report_path.write_text(out)
    snapshot.assert_match(report_path)


def test_repeated_runs_are_byte_identical(nested_model_path, capsys):
    """Test that equal arguments give identical output."""
    first = _verify_nested(nested_model_path, capsys)
    second = _verify_nested(nested_model_path, capsys)
    assert first == second


def test_simulate_output_snapshot(pipeline_model_path, capsys, tmp_path, snapshot):
    """Test sampled traces against their snapshot."""
    status = run(["simulate", "--model", str(pipeline_model_path), "--samples", "3", "--depth", "3", "--seed", "7"])
    out = capsys.readouterr().out

    assert status == 0
    assert len(out.splitlines()) == 3

    traces_path = tmp_path / "traces.txt"
    traces_path.write_text(out)
    snapshot.assert_match(traces_path)


def test_repeated_simulations_are_byte_identical(repair_model_path, capsys):
    """Test that sampling a continuous-time model twice with one seed prints the same traces."""
    outputs = []
    for _ in range(2):
        assert run(["simulate", "--model", str(repair_model_path), "--samples", "5", "--time", "4", "--seed", "7"]) == 0
        outputs.append(capsys.readouterr().out)

    assert outputs[0] == outputs[1]
    assert len(outputs[0].splitlines()) == 5


def test_simulated_traces_feed_blackbox(coin_model_path, capsys, tmp_path):
    """Test that simulate output is valid black-box input."""
    assert run(["simulate", "--model", str(coin_model_path), "--samples", "40", "--depth", "1", "--seed", "3"]) == 0
    traces_path = tmp_path / "traces.txt"
    traces_path.write_text(capsys.readouterr().out)

    status = run(["blackbox", "--traces", str(traces_path), "--model", str(coin_model_path), "--prop",
                  "P>=0.5 [ F<=1 goal ]", "--json", "--no-timing"])
    document = json.loads(capsys.readouterr().out)

    assert status == 0
    assert document["blackbox"]["n"] == 40
    assert document["blackbox"]["successes"] > 20
