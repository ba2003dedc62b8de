"""Numerical reference for the series solution: fixed-step Runge-Kutta integration of the equation in normal form.

The y'' terms of the shifted equation share the multiplier ``2 (x-1)^2 (x-2)^2 y (y-1) (y-x+1)``; dividing the
remaining terms by it gives ``y'' = f(x, y, y')``. Integration starts at x = 0 from y = a0, y' = a1 and runs in plain
floats, or in mpmath at a chosen number of decimal digits.
"""

import math
from contextlib import nullcontext
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import mpmath
import numpy as np

from seriesflow.core.equations import builtin_pvi_shifted
from seriesflow.core.series import Series1, evalK, to_mpf
from seriesflow.modules.pvi.solver import PviParams
from seriesflow.util.misc import InvalidParameter, OracleBreakdown, OrderError, get_logger

log = get_logger(__name__)


class NormalForm:
    """Right-hand side f(x, y, p) of y'' = f, derived from the shifted equation."""

    def __init__(self, params: PviParams, convert: Callable = float):
        values = {k: convert(v) for k, v in params.as_dict().items()}
        self.second_order = []
        self.rest = []
        for t in builtin_pvi_shifted().terms:
            polynomial = [(d[0], c.bind(values, convert)) for d, c in t.polynomial]
            has_second = any(f.derivative == (2,) for f in t.factors)
            others = [(f.derivative[0], f.power) for f in t.factors if f.derivative != (2,)]
            (self.second_order if has_second else self.rest).append((polynomial, others))

    @staticmethod
    def _sum(terms, x, y, p):
        total = 0
        for polynomial, factors in terms:
            value = sum(c * x ** d for d, c in polynomial)
            for order, power in factors:
                value *= (y if order == 0 else p) ** power
            total += value
        return total

    def multiplier(self, x, y):
        return self._sum(self.second_order, x, y, None)

    def __call__(self, x, y, p):
        m = self.multiplier(x, y)
        if m == 0:
            raise OracleBreakdown(f"The y'' multiplier vanishes at x = {x}, y = {y}.")
        value = -self._sum(self.rest, x, y, p) / m
        if not mpmath.isfinite(value):
            raise OracleBreakdown(f"Non-finite right-hand side at x = {x}, y = {y}, y' = {p}.")
        return value


def rk4(f: Callable, x0, y0, p0, x1, step: float):
    """Integrate y'' = f(x, y, y') from x0 to x1 with the classical fourth order scheme.

    The interval is split into equal steps no longer than step.
    """
    n = max(1, math.ceil(float(x1 - x0) / step - 1e-9))
    h = (x1 - x0) / n
    x, y, p = x0, y0, p0
    for _ in range(n):
        k1y, k1p = p, f(x, y, p)
        k2y, k2p = p + h / 2 * k1p, f(x + h / 2, y + h / 2 * k1y, p + h / 2 * k1p)
        k3y, k3p = p + h / 2 * k2p, f(x + h / 2, y + h / 2 * k2y, p + h / 2 * k2p)
        k4y, k4p = p + h * k3p, f(x + h, y + h * k3y, p + h * k3p)
        y = y + h / 6 * (k1y + 2 * k2y + 2 * k3y + k4y)
        p = p + h / 6 * (k1p + 2 * k2p + 2 * k3p + k4p)
        x = x + h
    return y, p


@dataclass
class OracleRow:
    x: float
    series: object
    reference: object
    error: object


@dataclass
class OracleTable:
    """Series values next to the numerical reference on a grid of x."""

    order: int
    step: float
    dps: Optional[int]
    rows: List[OracleRow] = field(default_factory=list)

    @property
    def max_error(self) -> float:
        return max((float(r.error) for r in self.rows), default=0.0)


def oracle_compare(series: Series1, params: PviParams, x_max: float = 0.1, step: float = 1e-4, points: int = 11,
                   dps: Optional[int] = None, grid: Optional[Sequence[float]] = None) -> OracleTable:
    """Compare a series solution with the Runge-Kutta reference on [0, x_max].

    Args:
        series: Solution of order at least 1; a0 and a1 seed the integration.
        params: Equation constants.
        x_max: Right end of the grid.
        step: Largest Runge-Kutta step.
        points: Number of equally spaced grid points, including 0 and x_max.
        dps: Decimal digits for mpmath integration. Plain floats when None.
        grid: Explicit non-negative grid, replacing x_max and points.
    """
    if series.order < 1:
        raise OrderError("The reference integration needs both a0 and a1.")
    if step <= 0:
        raise InvalidParameter(f"The integration step must be positive, got {step}.")
    if grid is None:
        if x_max < 0 or points < 1:
            raise InvalidParameter("The grid needs x_max >= 0 and at least one point.")
        grid = [x_max * k / (points - 1) for k in range(points)] if points > 1 and x_max > 0 else [0.0]
    grid = sorted(float(x) for x in grid)
    if grid[0] < 0:
        raise InvalidParameter("The reference integration runs from x = 0 towards positive x only.")

    table = OracleTable(series.order, step, dps)
    with (mpmath.workdps(dps) if dps else nullcontext()):
        convert = to_mpf if dps else float
        f = NormalForm(params, convert)
        x_prev = convert(0)
        y, p = convert(series[0]), convert(series[1])
        for x in grid:
            x = convert(x)
            if x > x_prev:
                y, p = rk4(f, x_prev, y, p, x, step)
                x_prev = x
            value = evalK(series, (x,))
            table.rows.append(OracleRow(float(x), value, y, abs(value - y)))
    log.info("Oracle comparison at order %d: max error %.3g", series.order, table.max_error)
    return table


def convergence_slope(table: OracleTable, floor: float = 0.0) -> float:
    """Slope of log(error) against log(x) over the grid points whose error lies above the noise floor."""
    points = [(float(mpmath.log(r.x)), float(mpmath.log(r.error))) for r in table.rows
              if r.x > 0 and float(r.error) > floor]
    if len(points) < 2:
        raise OracleBreakdown("Not enough grid points above the noise floor to fit a convergence slope.")
    xs, ys = zip(*points)
    return float(np.polyfit(xs, ys, 1)[0])


def to_original_x(x_shifted):
    """Map the expansion variable back to the equation's own coordinate, where the expansion point is x = -1."""
    return x_shifted - 1
