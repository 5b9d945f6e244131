"""Tests for report renderers."""

import json

import pytest

from src.models.hypothesis import Hypothesis, TestMethod
from src.models.verification import BlackboxSummary, LevelReport, Report
from src.outputs import get_available_report_formats, get_report_renderer


@pytest.fixture
def report():
    """Report of a nested verification that does not hold."""
    return Report(
        verdict=Hypothesis.H1,
        formula="P>=0.5 [ true U<=3 P>=0.8 [ X b ] ]",
        method=TestMethod.SPRT,
        type1=0.01,
        type2=0.02,
        levels=[
            LevelReport(0, 0, 0.5, 0.5445, 0.4555, TestMethod.SPRT, tests=1, samples=40, accepted_h1=1),
            LevelReport(1, 1, 0.8, 0.85, 0.75, TestMethod.SPRT, tests=4, samples=300, accepted_h0=2, accepted_h1=2,
                        memo_hits=36),
        ],
        elapsed_seconds=1.23456,
        warnings=["Atom 'x' labels no state of the model and is false everywhere"],
    )


def test_text_report(report):
    """Test the line layout of the text report."""
    text = get_report_renderer("text").render(report)

    assert text.splitlines() == [
        "verdict: H1 (does not hold)",
        "formula: P>=0.5 [ true U<=3 P>=0.8 [ X b ] ]",
        "method: sprt",
        "samples used: 40",
        "error bounds: type1=0.01 type2=0.02",
        "level 0 operator 0 P>=0.5: p0=0.5445 p1=0.4555 tests=1 samples=40 H0=0 H1=1 memo_hits=0",
        "level 1 operator 1 P>=0.8: p0=0.85 p1=0.75 tests=4 samples=300 H0=2 H1=2 memo_hits=36",
        "warning: Atom 'x' labels no state of the model and is false everywhere",
        "elapsed: 1.235s",
    ]


def test_text_report_without_timing(report):
    """Test that the elapsed line can be left out."""
    text = get_report_renderer("text").render(report, include_timing=False)
    assert "elapsed" not in text


def test_text_report_blackbox(report):
    """Test the plan line of a black-box report."""
    report.blackbox = BlackboxSummary(n=10, c=4, successes=8, theta=0.5)
    text = get_report_renderer("text").render(report)
    assert "blackbox: n=10 c=4 successes=8 theta=0.5" in text.splitlines()


def test_json_report(report):
    """Test the fields of the JSON document."""
    document = json.loads(get_report_renderer("json").render(report))

    assert document["schema"] == 1
    assert document["verdict"] == "H1"
    assert document["holds"] is False
    assert document["samples_used"] == 40
    assert document["levels"][1]["memo_hits"] == 36
    assert document["levels"][0]["method"] == "sprt"
    assert document["blackbox"] is None
    assert document["elapsed_seconds"] == pytest.approx(1.23456)


def test_json_report_without_timing(report):
    """Test that the elapsed time is omitted for reproducible output."""
    document = json.loads(get_report_renderer("json").render(report, include_timing=False))
    assert "elapsed_seconds" not in document


def test_unknown_format():
    """Test that unsupported formats are rejected."""
    with pytest.raises(ValueError, match="Unsupported report format"):
        get_report_renderer("xml")


def test_available_formats():
    """Test the renderer registry listing."""
    assert get_available_report_formats() == [("text", "Plain text"), ("json", "JSON")]
