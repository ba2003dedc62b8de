"""Series solution of the sixth Painlevé equation about x = -1, with residual and Runge-Kutta checks."""

from . import commands, members, oracle, solver
