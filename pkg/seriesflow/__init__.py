"""Main seriesflow package."""
from seriesflow.core.registry import command
from seriesflow.core.series import Backend, Series1, SeriesK
from seriesflow.util.classes import Config, ScalarArg

__version__ = "1.0.0"

# Only expose classes and functions that are meant to be used in modules
__all__ = [
    "command",
    "Backend",
    "Config",
    "ScalarArg",
    "Series1",
    "SeriesK"
]
