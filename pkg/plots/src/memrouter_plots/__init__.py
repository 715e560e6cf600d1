"""Figure rendering for memrouter sweep CSVs."""

from .render import EXPECTED_HEADERS, FigureJob, SchemaError, main, render

__all__ = ["EXPECTED_HEADERS", "FigureJob", "SchemaError", "main", "render"]

__version__ = "0.1.0"
