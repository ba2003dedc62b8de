"""Evaluate coefficient documents on rectangular grids and write plot-ready tables."""

from . import export
