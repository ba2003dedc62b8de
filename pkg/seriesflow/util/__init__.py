"""Utility functions shared by the seriesflow core and modules."""

from .constants import *
from .misc import *
from .classes import Config, ScalarArg
