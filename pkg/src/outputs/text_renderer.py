"""Human-readable report rendering."""

from src.core.formula_parser import format_number
from src.models.verification import Report


class TextReportRenderer:
    """Renders reports as ``key: value`` lines, one line per tested operator."""

    @staticmethod
    def get_type_name() -> str:
        return "text"

    @staticmethod
    def get_display_name() -> str:
        return "Plain text"

    def render(self, report: Report, include_timing: bool = True) -> str:
        verdict = "holds" if report.holds else "does not hold"
        lines = [
            f"verdict: {report.verdict} ({verdict})",
            f"formula: {report.formula}",
            f"method: {report.method}",
            f"samples used: {report.samples_used}",
            f"error bounds: type1={format_number(report.type1)} type2={format_number(report.type2)}",
        ]

        for level in report.levels:
            lines.append(
                f"level {level.level} operator {level.node_id} P>={format_number(level.theta)}: "
                f"p0={level.p0:.6g} p1={level.p1:.6g} tests={level.tests} samples={level.samples} "
                f"H0={level.accepted_h0} H1={level.accepted_h1} memo_hits={level.memo_hits}"
            )

        if report.blackbox is not None:
            bb = report.blackbox
            lines.append(f"blackbox: n={bb.n} c={bb.c} successes={bb.successes} theta={format_number(bb.theta)}")

        lines.extend(f"warning: {message}" for message in report.warnings)

        if include_timing:
            lines.append(f"elapsed: {report.elapsed_seconds:.3f}s")
        return "\n".join(lines) + "\n"
