"""JSON report rendering."""

from src.models.verification import Report, ReportDocument


class JsonReportRenderer:
    """Renders reports as a single versioned JSON object."""

    @staticmethod
    def get_type_name() -> str:
        return "json"

    @staticmethod
    def get_display_name() -> str:
        return "JSON"

    def render(self, report: Report, include_timing: bool = True) -> str:
        return ReportDocument.from_report(report, include_timing).to_json() + "\n"
