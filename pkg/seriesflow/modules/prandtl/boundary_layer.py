"""Series solutions of the unsteady two-dimensional boundary-layer (Prandtl) equations.

The streamwise velocity u = sum A[i, j, k] x^i y^j t^k and the normal velocity v = sum B[i, j, k] x^i y^j t^k are
built level by level in y from two inputs: the outer flow U(x, t) and the wall shear rate A[., 1, .]. No-slip and
impermeability fix A[., 0, .] = B[., 0, .] = 0, and continuity gives B from A. The momentum equation, with the pressure
gradient replaced by -(U_t + U U_x), then fixes every level j >= 2.

Level j >= 4 loses one order in x every third level and one order in t every second level, relative to the wall
input. ``level_caps`` tracks this staircase and ``required_input_caps`` inverts it for a requested output rectangle.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import bisect

from seriesflow.core.equations import builtin_continuity, builtin_prandtl
from seriesflow.core.residual import ResidualReport, evaluate, evaluate_pointwise
from seriesflow.core.series import (Backend, Index, Scalar, SeriesK, add, diffK, evalK, from_array, mulK, scale,
                                    weights, zeros)
from seriesflow.util.constants import BOUNDARY_LAYER_AXES, WALL_AXES
from seriesflow.util.misc import (BackendMismatch, CapMismatch, InvalidParameter, MissingCoefficient, OrderError,
                                  get_logger)

log = get_logger(__name__)

Caps2 = Tuple[int, int]


def _ratio(numerator: int, denominator: int, backend: Backend) -> Scalar:
    if backend is Backend.EXACT:
        return Fraction(numerator, denominator)
    return numerator / denominator


def _check_planar(series: SeriesK, what: str):
    if series.axes != WALL_AXES:
        raise CapMismatch(f"The {what} must be a series over {WALL_AXES}, got {series.axes}.")


@dataclass(frozen=True)
class BoundaryLayerSeries:
    """Velocity series u (A) and v (B) over (x, y, t) with shared caps (I, J, K)."""

    u: SeriesK
    v: SeriesK
    nu: Scalar
    rho: Scalar

    def __post_init__(self):
        if self.u.axes != BOUNDARY_LAYER_AXES or self.v.axes != BOUNDARY_LAYER_AXES:
            raise CapMismatch(f"Boundary-layer fields must be series over {BOUNDARY_LAYER_AXES}.")
        if self.u.backend is not self.v.backend:
            raise BackendMismatch("u and v must use the same backend.")
        if self.u.caps != self.v.caps:
            raise CapMismatch(f"u and v must share their caps, got {self.u.caps} and {self.v.caps}.")
        object.__setattr__(self, "nu", self.u.backend.coerce(self.nu))
        object.__setattr__(self, "rho", self.u.backend.coerce(self.rho))
        if self.nu == 0 or self.rho == 0:
            raise InvalidParameter("Viscosity and density must be nonzero.")
        if np.any(self.u.array[:, 0, :]) or np.any(self.v.array[:, 0, :]):
            raise InvalidParameter("u and v must vanish at the wall (no-slip and impermeability).")
        if self.v.caps[1] >= 1 and np.any(self.v.array[:, 1, :]):
            raise InvalidParameter("dv/dy must vanish at the wall.")

    @property
    def backend(self) -> Backend:
        return self.u.backend

    @property
    def caps(self) -> Index:
        return self.u.caps


def lift_external(U: SeriesK, y_cap: int) -> SeriesK:
    """Outer flow U(x, t) as a series over (x, y, t) that is constant in y."""
    _check_planar(U, "outer flow")
    array = zeros((U.caps[0], y_cap, U.caps[1]), BOUNDARY_LAYER_AXES, U.backend).array.copy()
    array[:, 0, :] = U.array
    return from_array(array, BOUNDARY_LAYER_AXES, U.backend)


def a2_from_external(U: SeriesK, nu: Scalar) -> SeriesK:
    """A[., 2, .] = -(U_t + U U_x) / (2 nu), with caps (IU-1, KU-1)."""
    _check_planar(U, "outer flow")
    if min(U.caps) < 1:
        raise OrderError(f"The outer flow needs caps of at least (1, 1), got {U.caps}.")
    nu = U.backend.coerce(nu)
    return scale(add(diffK(U, "t"), mulK(U, diffK(U, "x"))), U.backend.one() / (-2 * nu))


def a3_from_wall(wall: SeriesK, nu: Scalar) -> SeriesK:
    """A[i, 3, k] = (k+1) A[i, 1, k+1] / (6 nu), with caps (I1, K1-1)."""
    _check_planar(wall, "wall shear rate")
    if wall.caps[1] < 1:
        raise MissingCoefficient("The y^3 level needs the time derivative of the wall shear rate; its time cap "
                                 "must be at least 1.")
    nu = wall.backend.coerce(nu)
    return scale(diffK(wall, "t"), wall.backend.one() / (6 * nu))


def level_caps(wall_caps: Caps2, external_caps: Caps2, levels: int) -> Dict[int, Caps2]:
    """Trustworthy (x, t) caps of every level 1..levels for the given input caps.

    Negative caps mean that nothing on the level is trustworthy.
    """
    (i1, k1), (iu, ku) = wall_caps, external_caps
    caps: Dict[int, Caps2] = {}
    fixed = {1: (i1, k1), 2: (iu - 1, ku - 1), 3: (i1, k1 - 1)}
    for j in range(1, levels + 1):
        if j in fixed:
            caps[j] = fixed[j]
            continue
        lower = range(1, j - 2)
        caps[j] = (min(caps[j - 2][0], min(caps[q][0] for q in lower) - 1),
                   min(caps[j - 2][1] - 1, min(caps[q][1] for q in lower)))
    return caps


def _needed(caps: Index) -> Dict[int, Caps2]:
    """Level caps a construction of output caps (I, J, K) relies on: continuity reads x up to I+1 below level J."""
    i, levels, k = caps
    return {j: ((i + 1, k) if j < levels else (i, k)) for j in range(1, levels + 1)}


def required_input_caps(caps: Index) -> Tuple[Caps2, Caps2]:
    """Smallest wall and outer-flow caps that make every coefficient of the output rectangle trustworthy.

    >>> required_input_caps((3, 8, 3))
    ((6, 6), (7, 7))
    """
    i, levels, k = caps
    if min(caps) < 0 or levels < 1:
        raise InvalidParameter(f"Output caps must be non-negative with at least one level in y, got {caps}.")
    offsets = level_caps((0, 0), (1, 1), levels)
    needed = _needed(caps)
    i1 = max(needed[j][0] - offsets[j][0] for j in needed)
    k1 = max(needed[j][1] - offsets[j][1] for j in needed)
    return (i1, k1), (i1 + 1, k1 + 1)


class LevelTable:
    """Coefficients A[i, j, k] being built level by level, with the trustworthy caps of each finished level."""

    def __init__(self, x_cap: int, levels: int, k_cap: int, backend: Backend):
        self.array = zeros((x_cap, levels, k_cap), BOUNDARY_LAYER_AXES, backend).array.copy()
        self.backend = backend
        # The wall level vanishes identically
        self.caps: Dict[int, Caps2] = {0: (x_cap, k_cap)}

    def set_level(self, j: int, values: np.ndarray, caps: Caps2):
        ci, ck = min(caps[0], self.array.shape[0] - 1), min(caps[1], self.array.shape[2] - 1)
        if ci >= 0 and ck >= 0:
            self.array[:ci + 1, j, :ck + 1] = values[:ci + 1, :ck + 1]
        self.caps[j] = (ci, ck)

    def require(self, j: int, x_cap: int, k_cap: int):
        have = self.caps.get(j)
        if have is None or have[0] < x_cap or have[1] < k_cap:
            raise MissingCoefficient(f"Level y^{j} is needed up to (x^{x_cap}, t^{k_cap}) but only "
                                     f"{have or 'nothing'} is known.")


def a_general(i: int, j: int, k: int, table: LevelTable, nu: Scalar) -> Scalar:
    """A[i, j, k] for j >= 4 from lower levels, with B eliminated through continuity.

        nu (j-1) j A[i,j,k] = (k+1) A[i,j-2,k+1]
                              + sum_{q=1}^{j-3} sum_{p<=i, r<=k} (i-p+1) A[p,q,r] A[i-p+1,j-2-q,k-r]
                              - sum_{q=2}^{j-2} sum_{p<=i, r<=k} ((p+1)(j-1-q)/q) A[p+1,q-1,r] A[i-p,j-1-q,k-r]
    """
    if j < 4:
        raise InvalidParameter(f"The general recurrence starts at y^4, got j = {j}.")
    table.require(j - 2, i, k + 1)
    for q in range(1, j - 2):
        table.require(q, i + 1, k)
    backend, A = table.backend, table.array
    column = (-1, 1)
    w_first = weights(range(i + 1, 0, -1), backend).reshape(column)
    w_second = weights(range(1, i + 2), backend).reshape(column)
    total = (k + 1) * A[i, j - 2, k + 1]
    for q in range(1, j - 2):
        total += np.sum(w_first * A[:i + 1, q, :k + 1] * A[i + 1:0:-1, j - 2 - q, k::-1])
    for q in range(2, j - 1):
        total -= _ratio(j - 1 - q, q, backend) * np.sum(
            w_second * A[1:i + 2, q - 1, :k + 1] * A[i::-1, j - 1 - q, k::-1])
    value = total / (nu * (j - 1) * j)
    return float(value) if backend is Backend.FLOAT else value


def a_from_momentum(i: int, j: int, k: int, u: SeriesK, v: SeriesK, nu: Scalar) -> Scalar:
    """A[i, j, k] for j >= 4 from the momentum coefficient at (i, j-2, k), keeping B as given."""
    if j < 4:
        raise InvalidParameter(f"The general recurrence starts at y^4, got j = {j}.")
    A, B = u.array, v.array
    backend = u.backend
    if (i + 1 > u.caps[0] or j - 1 > u.caps[1] or k + 1 > u.caps[2]
            or i > v.caps[0] or j - 2 > v.caps[1] or k > v.caps[2]):
        raise MissingCoefficient(f"A[{i}, {j}, {k}] needs A and B beyond their caps {u.caps}.")
    m = j - 2
    column = (-1, 1)
    total = (k + 1) * A[i, m, k + 1]
    w = weights(range(i + 1, 0, -1), backend).reshape(column)
    for q in range(m + 1):
        total += np.sum(w * A[:i + 1, q, :k + 1] * A[i + 1:0:-1, m - q, k::-1])
        total += (m - q + 1) * np.sum(B[:i + 1, q, :k + 1] * A[i::-1, m - q + 1, k::-1])
    value = total / (backend.coerce(nu) * (j - 1) * j)
    return float(value) if backend is Backend.FLOAT else value


def b_from_a(a: SeriesK) -> SeriesK:
    """Continuity: B[i, j, k] = -((i+1)/j) A[i+1, j-1, k] for j >= 2, and B vanishes on levels 0 and 1.

    Output caps are (I-1, J+1, K) for input caps (I, J, K).
    """
    if a.axes != BOUNDARY_LAYER_AXES:
        raise CapMismatch(f"A must be a series over {BOUNDARY_LAYER_AXES}.")
    ia, ja, ka = a.caps
    if ia < 1:
        raise OrderError("B needs A up to at least x^1.")
    backend = a.backend
    out = zeros((ia - 1, ja + 1, ka), BOUNDARY_LAYER_AXES, backend).array.copy()
    w = weights(range(1, ia + 1), backend).reshape(-1, 1)
    for j in range(2, ja + 2):
        out[:, j, :] = _ratio(-1, j, backend) * (w * a.array[1:, j - 1, :])
    return from_array(out, BOUNDARY_LAYER_AXES, backend)


def construct(U: SeriesK, wall: SeriesK, nu: Scalar, rho: Scalar, caps: Sequence[int]) -> BoundaryLayerSeries:
    """Build u and v on the output rectangle (I, J, K) from the outer flow and the wall shear rate.

    Raises:
        CapMismatch: If the input caps do not make the whole rectangle trustworthy. ``required_input_caps`` gives
            the smallest sufficient caps.
    """
    _check_planar(U, "outer flow")
    _check_planar(wall, "wall shear rate")
    if U.backend is not wall.backend:
        raise BackendMismatch("Outer flow and wall shear rate must use the same backend.")
    backend = U.backend
    caps = tuple(int(c) for c in caps)
    if len(caps) != 3:
        raise CapMismatch(f"Output caps must be (I, J, K), got {caps}.")
    nu, rho = backend.coerce(nu), backend.coerce(rho)
    if nu == 0 or rho == 0:
        raise InvalidParameter("Viscosity and density must be nonzero.")
    wall_req, external_req = required_input_caps(caps)
    I, J, K = caps
    staircase = level_caps(wall.caps, U.caps, J)
    for j, (need_i, need_k) in _needed(caps).items():
        have_i, have_k = staircase[j]
        if have_i < need_i or have_k < need_k:
            raise CapMismatch(f"Inputs with wall caps {wall.caps} and outer-flow caps {U.caps} only determine level "
                              f"y^{j} up to {staircase[j]}; output caps {caps} need wall caps {wall_req} and "
                              f"outer-flow caps {external_req}.")

    x_cap = max([I + 1] + [c[0] for c in staircase.values()])
    k_cap = max([K] + [c[1] for c in staircase.values()])
    table = LevelTable(x_cap, J, k_cap, backend)
    table.set_level(1, wall.array, staircase[1])
    if J >= 2:
        table.set_level(2, a2_from_external(U, nu).array, staircase[2])
    if J >= 3:
        table.set_level(3, a3_from_wall(wall, nu).array, staircase[3])
    for j in range(4, J + 1):
        ci, ck = staircase[j]
        level = zeros((max(ci, 0), max(ck, 0)), WALL_AXES, backend).array.copy()
        for i in range(ci + 1):
            for k in range(ck + 1):
                level[i, k] = a_general(i, j, k, table, nu)
        table.set_level(j, level, staircase[j])
        log.debug("Level y^%d computed up to %s", j, staircase[j])

    a = from_array(table.array[:I + 1, :J + 1, :K + 1], BOUNDARY_LAYER_AXES, backend)
    b = b_from_a(from_array(table.array[:I + 2, :J, :K + 1], BOUNDARY_LAYER_AXES, backend))
    return BoundaryLayerSeries(a, b, nu, rho)


@dataclass
class BoundaryLayerReport:
    momentum: ResidualReport
    continuity: ResidualReport

    @property
    def passed(self) -> bool:
        return self.momentum.passed and self.continuity.passed


def _bindings(layer: BoundaryLayerSeries, U: SeriesK) -> Dict[str, SeriesK]:
    if U.backend is not layer.backend:
        raise BackendMismatch("Outer flow and boundary layer must use the same backend.")
    return {"u": layer.u, "v": layer.v, "U": lift_external(U, layer.caps[1])}


def verify(layer: BoundaryLayerSeries, U: SeriesK, tolerance: Optional[float] = None) -> BoundaryLayerReport:
    """Momentum and continuity residuals; a constructed layer is zero up to (I-1, J-2, K-1) and (I-1, J-1, K)."""
    bindings = _bindings(layer, U)
    momentum = evaluate(builtin_prandtl(), bindings, {"nu": layer.nu}, tolerance)
    continuity = evaluate(builtin_continuity(BOUNDARY_LAYER_AXES, ("u", "v")), bindings, {}, tolerance)
    log.info("Boundary-layer residuals: %s; %s", momentum.summary(), continuity.summary())
    return BoundaryLayerReport(momentum, continuity)


def pointwise_residual(layer: BoundaryLayerSeries, U: SeriesK, point: Sequence) -> Scalar:
    """Momentum residual of the truncated polynomials at a point (x, y, t)."""
    return evaluate_pointwise(builtin_prandtl(), _bindings(layer, U), {"nu": layer.nu}, point)


def wall_shear_profile(layer: BoundaryLayerSeries) -> SeriesK:
    """Wall shear rate du/dy at y = 0 as a series in (x, t)."""
    if layer.caps[1] < 1:
        raise OrderError("The wall shear rate needs u up to y^1.")
    return from_array(layer.u.array[:, 1, :], WALL_AXES, layer.backend)


@dataclass
class SeparationPoint:
    """Sign change of the wall shear rate between two grid points, with the bisected root."""

    lower: float
    upper: float
    root: float


def separation_points(shear: SeriesK, t: float, x_min: float, x_max: float, points: int = 101,
                      xtol: float = 1e-14) -> List[SeparationPoint]:
    """Locate zeros of the wall shear rate along x at a fixed time."""
    _check_planar(shear, "wall shear rate")

    def f(x):
        return float(evalK(shear, (x, t)))

    grid = np.linspace(x_min, x_max, points)
    values = [f(x) for x in grid]
    found = []
    for (a, fa), (b, fb) in zip(zip(grid, values), zip(grid[1:], values[1:])):
        if fa == 0:
            found.append(SeparationPoint(float(a), float(a), float(a)))
        elif fa * fb < 0:
            found.append(SeparationPoint(float(a), float(b), float(bisect(f, a, b, xtol=xtol))))
    if values and values[-1] == 0:
        found.append(SeparationPoint(float(grid[-1]), float(grid[-1]), float(grid[-1])))
    return found
