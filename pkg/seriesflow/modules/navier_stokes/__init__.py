"""Space-time series of incompressible Navier-Stokes flows."""

from . import commands, flow
