"""Offline figure renderer for converter-sim CSV outputs."""

from .errors import MissingFile, PlotgenError, SchemaError
from .figures import FIGURE_IDS, FigureSpec, discover
from .render import render

__all__ = [
    "FIGURE_IDS",
    "FigureSpec",
    "MissingFile",
    "PlotgenError",
    "SchemaError",
    "discover",
    "render",
]
