"""Report renderer registry."""

from src.models.report_renderer import ReportRenderer
from src.outputs.json_renderer import JsonReportRenderer
from src.outputs.text_renderer import TextReportRenderer

# Registry of available report renderers
REPORT_RENDERERS: dict[str, type[ReportRenderer]] = {
    "text": TextReportRenderer,
    "json": JsonReportRenderer,
}


def get_report_renderer(format_name: str) -> ReportRenderer:
    """Get a renderer instance for the given format.

    Args:
        format_name: Format name (e.g., "text", "json")

    Returns:
        Instance of the renderer

    Raises:
        ValueError: If the format is not supported
    """
    if format_name not in REPORT_RENDERERS:
        raise ValueError(
            f"Unsupported report format: {format_name}. Supported formats: {', '.join(REPORT_RENDERERS.keys())}"
        )

    renderer_class = REPORT_RENDERERS[format_name]
    return renderer_class()


def get_available_report_formats() -> list[tuple[str, str]]:
    """Get list of available report formats.

    Returns:
        List of (type_name, display_name) tuples
    """
    return [
        (renderer_class.get_type_name(), renderer_class.get_display_name())
        for renderer_class in REPORT_RENDERERS.values()
    ]


__all__ = [
    "REPORT_RENDERERS",
    "get_report_renderer",
    "get_available_report_formats",
    "TextReportRenderer",
    "JsonReportRenderer",
]
