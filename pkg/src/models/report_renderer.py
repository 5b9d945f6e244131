"""Protocol for report renderers."""

from typing import Protocol

from src.models.verification import Report


class ReportRenderer(Protocol):
    """Protocol defining the interface for report renderers.

    Each output format (plain text, JSON) implements this protocol and is
    registered in :mod:`src.outputs`.
    """

    @staticmethod
    def get_type_name() -> str:
        """Get the unique type identifier for this format.

        Returns:
            Type name (e.g., "text", "json")
        """
        ...

    @staticmethod
    def get_display_name() -> str:
        """Get the human-readable name for this format."""
        ...

    def render(self, report: Report, include_timing: bool = True) -> str:
        """Render a verification report.

        Args:
            report: Report to render
            include_timing: Include the wall-clock time of the run

        Returns:
            Rendered report ending with a newline
        """
        ...
