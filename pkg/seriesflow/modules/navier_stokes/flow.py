"""Four-variable series solutions of the incompressible Navier-Stokes equations.

The velocity components u, v, w and the pressure P are series in (x, y, z, t). A flow is verified by substituting
it into the three momentum equations and the continuity equation, and new time levels are generated from the
momentum equations solved for the time derivative.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Mapping, Optional, Sequence, Tuple

import numpy as np

from seriesflow.core.equations import builtin_continuity, builtin_navier_stokes
from seriesflow.core.residual import ResidualReport, evaluate
from seriesflow.core.series import (Backend, Index, Scalar, SeriesK, diffK, evalK, from_array, mulK, truncate,
                                    zeros)
from seriesflow.util.constants import FLOW_AXES
from seriesflow.util.misc import BackendMismatch, CapMismatch, InvalidParameter, OrderError, get_logger

log = get_logger(__name__)

COMPONENTS = {"x": "u", "y": "v", "z": "w"}


@dataclass(frozen=True)
class FlowSeries:
    """Velocity and pressure series sharing the caps (X, Y, Z, T), plus the fluid constants."""

    u: SeriesK
    v: SeriesK
    w: SeriesK
    pressure: SeriesK
    rho: Scalar
    nu: Scalar

    def __post_init__(self):
        series = (self.u, self.v, self.w, self.pressure)
        if any(s.axes != FLOW_AXES for s in series):
            raise CapMismatch(f"Flow fields must be series over {FLOW_AXES}.")
        if len({s.backend for s in series}) > 1:
            raise BackendMismatch("All flow fields must use the same backend.")
        if len({s.caps for s in series}) > 1:
            raise CapMismatch(f"Flow fields must share their caps, got {[s.caps for s in series]}.")
        backend = self.u.backend
        object.__setattr__(self, "rho", backend.coerce(self.rho))
        object.__setattr__(self, "nu", backend.coerce(self.nu))
        if self.rho == 0:
            raise InvalidParameter("The density must be nonzero.")
        if self.nu < 0:
            raise InvalidParameter("The kinematic viscosity must be non-negative.")

    @property
    def backend(self) -> Backend:
        return self.u.backend

    @property
    def caps(self) -> Index:
        return self.u.caps

    def velocity(self, component: str) -> SeriesK:
        if component not in COMPONENTS:
            raise InvalidParameter(f"Unknown component {component!r}, expected one of x, y, z.")
        return getattr(self, COMPONENTS[component])

    def bindings(self) -> Dict[str, SeriesK]:
        return {"u": self.u, "v": self.v, "w": self.w, "P": self.pressure}

    def params(self) -> Dict[str, Scalar]:
        return {"rho_inv": self.backend.one() / self.rho, "nu": self.nu}


@dataclass
class FlowReport:
    """Residuals of the momentum and continuity equations."""

    momentum: Dict[str, ResidualReport] = field(default_factory=dict)
    continuity: Optional[ResidualReport] = None

    @property
    def reports(self) -> Tuple[ResidualReport, ...]:
        return tuple(self.momentum.values()) + ((self.continuity,) if self.continuity else ())

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)


def continuity_residual(flow: FlowSeries, tolerance: Optional[float] = None) -> ResidualReport:
    return evaluate(builtin_continuity(), flow.bindings(), {}, tolerance)


def verify(flow: FlowSeries, tolerance: Optional[float] = None) -> FlowReport:
    """Substitute a flow into the momentum and continuity equations."""
    report = FlowReport()
    for component in COMPONENTS:
        report.momentum[component] = evaluate(builtin_navier_stokes(component), flow.bindings(), flow.params(),
                                              tolerance)
    report.continuity = continuity_residual(flow, tolerance)
    log.info("Navier-Stokes residuals: %s", "; ".join(r.summary() for r in report.reports))
    return report


def momentum_identity(component: str, flow: FlowSeries, index: Sequence[int]) -> Scalar:
    """Coefficient (i, j, k, l) of one momentum equation, assembled from its single-index sums.

    Needs i+2, j+2, k+2 and l+1 within the caps.
    """
    i, j, k, l = (int(n) for n in index)
    X, Y, Z, T = flow.caps
    if min(i, j, k, l) < 0 or i + 2 > X or j + 2 > Y or k + 2 > Z or l + 1 > T:
        raise OrderError(f"Index {tuple(index)} is outside the range where the momentum identity is trustworthy "
                         f"for caps {flow.caps}.")
    F = flow.velocity(component)
    box = (slice(0, i + 1), slice(0, j + 1), slice(0, k + 1), slice(0, l + 1))
    flipped = (slice(i, None, -1), slice(j, None, -1), slice(k, None, -1), slice(l, None, -1))
    convection = sum(
        np.sum(carrier.array[box] * diffK(F, axis).array[flipped])
        for carrier, axis in ((flow.u, "x"), (flow.v, "y"), (flow.w, "z")))
    time = (l + 1) * F[i, j, k, l + 1]
    shifted = [i, j, k, l]
    axis = "xyz".index(component)
    shifted[axis] += 1
    pressure = shifted[axis] * flow.pressure[shifted]
    viscous = ((i + 2) * (i + 1) * F[i + 2, j, k, l] + (j + 2) * (j + 1) * F[i, j + 2, k, l]
               + (k + 2) * (k + 1) * F[i, j, k + 2, l])
    params = flow.params()
    value = time + convection + params["rho_inv"] * pressure - params["nu"] * viscous
    return float(value) if flow.backend is Backend.FLOAT else value


def time_march(u0: SeriesK, v0: SeriesK, w0: SeriesK, pressure: SeriesK, steps: int, rho: Scalar,
               nu: Scalar) -> FlowSeries:
    """Generate time levels 1..steps from the velocity at t = 0 and a prescribed pressure.

    Level l+1 follows from the momentum equations solved for the time derivative:

        (l+1) F[., l+1] = -(1/rho) dP/d(component) + nu Laplacian(F) - (u.grad) F     at level l

    Each level loses two orders along every spatial axis, so the result has caps (X-2L, Y-2L, Z-2L, L).

    Args:
        u0, v0, w0: Velocity at t = 0, over (x, y, z) or over (x, y, z, t) with any time cap.
        pressure: Pressure over (x, y, z, t) with caps at least (X-1, Y-1, Z-1, L) when L > 0.
        steps: Number of time levels L to generate.
    """
    initial = [_level_zero(s) for s in (u0, v0, w0)]
    if len({s.caps for s in initial}) > 1:
        raise CapMismatch("The initial velocity components must share their caps.")
    backend = initial[0].backend
    if pressure.backend is not backend or any(s.backend is not backend for s in initial):
        raise BackendMismatch("Initial velocity and pressure must use the same backend.")
    if steps < 0:
        raise InvalidParameter(f"The number of time steps must be non-negative, got {steps}.")
    X, Y, Z = initial[0].caps
    out_caps = (X - 2 * steps, Y - 2 * steps, Z - 2 * steps)
    if min(out_caps) < 0:
        raise CapMismatch(f"Spatial caps {(X, Y, Z)} are too small for {steps} time steps; each step uses two "
                          f"orders per axis.")
    if pressure.axes != FLOW_AXES:
        raise CapMismatch(f"The pressure must be a series over {FLOW_AXES}.")
    lost = 1 if steps else 0
    needed = (X - lost, Y - lost, Z - lost, steps)
    if any(c < n for c, n in zip(pressure.caps, needed)):
        raise CapMismatch(f"The pressure caps {pressure.caps} must be at least {needed}.")
    rho, nu = backend.coerce(rho), backend.coerce(nu)
    if rho == 0:
        raise InvalidParameter("The density must be nonzero.")
    rho_inv = backend.one() / rho

    work = {}
    for name, series in zip(COMPONENTS.values(), initial):
        array = zeros((X, Y, Z, steps), FLOW_AXES, backend).array.copy()
        array[..., 0] = series.array
        work[name] = array

    for l in range(steps):
        trusted = (X - 2 * l, Y - 2 * l, Z - 2 * l)
        target = tuple(slice(0, c - 1) for c in trusted)
        current = {name: from_array(array[tuple(slice(0, c + 1) for c in trusted) + (slice(0, l + 1),)],
                                    FLOW_AXES, backend)
                   for name, array in work.items()}
        new_level = {}
        for component, name in COMPONENTS.items():
            F = current[name]
            convection = (mulK(current["u"], diffK(F, "x")) + mulK(current["v"], diffK(F, "y"))
                          + mulK(current["w"], diffK(F, "z")))
            laplacian = diffK(F, "x", 2) + diffK(F, "y", 2) + diffK(F, "z", 2)
            gradient = diffK(pressure, component)
            rhs = (nu * laplacian.array[target + (l,)] - convection.array[target + (l,)]
                   - rho_inv * gradient.array[target + (l,)])
            new_level[name] = rhs / (l + 1)
        for name, values in new_level.items():
            work[name][target + (l + 1,)] = values
        log.debug("Time level %d computed on spatial caps %s", l + 1, tuple(c - 2 for c in trusted))

    final = tuple(slice(0, c + 1) for c in out_caps) + (slice(0, steps + 1),)
    fields_ = {name: from_array(array[final], FLOW_AXES, backend) for name, array in work.items()}
    return FlowSeries(fields_["u"], fields_["v"], fields_["w"], truncate(pressure, out_caps + (steps,)), rho, nu)


def _level_zero(series: SeriesK) -> SeriesK:
    if series.axes == FLOW_AXES:
        return from_array(series.array[..., 0], FLOW_AXES[:3], series.backend)
    if series.axes == FLOW_AXES[:3]:
        return series
    raise CapMismatch(f"Initial data must be a series over {FLOW_AXES[:3]} or {FLOW_AXES}, got {series.axes}.")


def _taylor(kind: str, order: int, backend: Backend, scale: Fraction = Fraction(1)) -> np.ndarray:
    """Taylor coefficients of sin(scale*x), cos(scale*x) or exp(scale*x) about 0."""
    values = []
    for n in range(order + 1):
        c = scale ** n / math.factorial(n)
        if kind == "sin":
            c = c * (-1) ** ((n - 1) // 2) if n % 2 else 0
        elif kind == "cos":
            c = 0 if n % 2 else c * (-1) ** (n // 2)
        values.append(c)
    array = np.empty(order + 1, dtype=backend.dtype)
    array[:] = [Fraction(c) if backend is Backend.EXACT else float(c) for c in values]
    return array


def taylor_green(order: int, nu: Scalar, rho: Scalar, backend: Backend = Backend.EXACT,
                 time_order: Optional[int] = None) -> FlowSeries:
    """Taylor-Green vortex as a flow series with spatial caps ``order`` and time cap ``time_order``.

        u = -cos x sin y exp(-2 nu t),   v = sin x cos y exp(-2 nu t),   w = 0,
        P = -(rho/4) (cos 2x + cos 2y) exp(-4 nu t)

    All coefficients with a nonzero z power vanish.
    """
    T = order if time_order is None else time_order
    if order < 0 or T < 0:
        raise InvalidParameter("Taylor-Green caps must be non-negative.")
    nu_exact = Fraction(nu)
    rho_value = float(rho) if backend is Backend.FLOAT else Fraction(rho)
    nu_value = float(nu) if backend is Backend.FLOAT else nu_exact
    sin, cos = _taylor("sin", order, backend), _taylor("cos", order, backend)
    cos2 = _taylor("cos", order, backend, Fraction(2))
    decay = _taylor("exp", T, backend, -2 * nu_exact)
    decay_p = _taylor("exp", T, backend, -4 * nu_exact)
    caps = (order, order, order, T)

    def field_array(plane: np.ndarray) -> np.ndarray:
        array = zeros(caps, FLOW_AXES, backend).array.copy()
        array[:, :, 0, :] = plane
        return array

    u = field_array(-np.multiply.outer(np.multiply.outer(cos, sin), decay))
    v = field_array(np.multiply.outer(np.multiply.outer(sin, cos), decay))
    spatial_p = zeros((order, order), ("x", "y"), backend).array.copy()
    spatial_p[:, 0] += cos2
    spatial_p[0, :] += cos2
    p = field_array(-(rho_value / 4) * np.multiply.outer(spatial_p, decay_p))
    return FlowSeries(from_array(u, FLOW_AXES, backend), from_array(v, FLOW_AXES, backend),
                      zeros(caps, FLOW_AXES, backend), from_array(p, FLOW_AXES, backend), rho_value, nu_value)


def uniform_flow(speed: Scalar, caps: Sequence[int], backend: Backend = Backend.EXACT, rho: Scalar = 1,
                 nu: Scalar = 0) -> FlowSeries:
    """Constant velocity (speed, 0, 0) at constant pressure."""
    u = zeros(caps, FLOW_AXES, backend).array.copy()
    u[(0, 0, 0, 0)] = backend.coerce(speed)
    zero = zeros(caps, FLOW_AXES, backend)
    return FlowSeries(from_array(u, FLOW_AXES, backend), zero, zero, zero, rho, nu)


def evaluate_flow(flow: FlowSeries, point: Mapping[str, object]) -> Dict[str, Scalar]:
    """Values of u, v, w and P at a point."""
    return {name: evalK(series, point) for name, series in flow.bindings().items()}


def zero_flow(caps: Sequence[int], backend: Backend = Backend.EXACT, rho: Scalar = 1, nu: Scalar = 0) -> FlowSeries:
    return uniform_flow(0, caps, backend, rho, nu)
