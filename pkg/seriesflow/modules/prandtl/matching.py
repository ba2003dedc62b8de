"""Choose the wall shear rate so that the boundary-layer velocity meets the outer flow at a matching height."""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from seriesflow.core.series import Backend, SeriesK, evalK, from_array, to_backend
from seriesflow.modules.prandtl.boundary_layer import construct, required_input_caps
from seriesflow.util.constants import WALL_AXES
from seriesflow.util.misc import CapMismatch, InvalidParameter, get_logger

log = get_logger(__name__)


@dataclass
class MatchResult:
    wall: SeriesK
    residual_norm: float
    iterations: int
    converged: bool


def match_wall_slope(U: SeriesK, nu: float, rho: float, caps: Sequence[int], y_match: float,
                     x_grid: Sequence[float], t_grid: Sequence[float], initial: Optional[SeriesK] = None,
                     max_iterations: int = 20, tolerance: float = 1e-12, step: float = 1e-7) -> MatchResult:
    """Newton iteration on the wall shear coefficients for u(x, y_match, t) = U(x, t) on a grid.

    The Jacobian is approximated by forward differences and each update is the least-squares solution of the
    linearised system, so over- and under-determined grids are both accepted. Runs in the float backend.
    """
    if y_match <= 0:
        raise InvalidParameter(f"The matching height must be positive, got {y_match}.")
    wall_caps, external_caps = required_input_caps(caps)
    if U.caps[0] < external_caps[0] or U.caps[1] < external_caps[1]:
        raise CapMismatch(f"Output caps {tuple(caps)} need outer-flow caps {external_caps}, got {U.caps}.")
    U = to_backend(U, Backend.FLOAT)
    nu, rho = float(nu), float(rho)
    shape = (wall_caps[0] + 1, wall_caps[1] + 1)
    if initial is not None:
        if initial.caps != wall_caps:
            raise CapMismatch(f"The initial wall shear rate must have caps {wall_caps}, got {initial.caps}.")
        vector = np.asarray(to_backend(initial, Backend.FLOAT).array, dtype=float).ravel()
    else:
        vector = np.zeros(shape[0] * shape[1])
    points = [(float(x), float(t)) for x in x_grid for t in t_grid]
    targets = np.array([evalK(U, p) for p in points])

    def residuals(v: np.ndarray) -> np.ndarray:
        layer = construct(U, from_array(v.reshape(shape), WALL_AXES, Backend.FLOAT), nu, rho, caps)
        return np.array([evalK(layer.u, (x, y_match, t)) for x, t in points]) - targets

    r = residuals(vector)
    iterations = 0
    while np.linalg.norm(r) > tolerance and iterations < max_iterations:
        jacobian = np.empty((len(r), len(vector)))
        for n in range(len(vector)):
            h = step * max(1.0, abs(vector[n]))
            shifted = vector.copy()
            shifted[n] += h
            jacobian[:, n] = (residuals(shifted) - r) / h
        delta = np.linalg.lstsq(jacobian, -r, rcond=None)[0]
        vector = vector + delta
        r = residuals(vector)
        iterations += 1
        log.debug("Matching iteration %d: residual norm %.3g", iterations, np.linalg.norm(r))
    norm = float(np.linalg.norm(r))
    converged = norm <= tolerance
    if not converged:
        log.warning("Wall shear matching stopped after %d iterations with residual norm %.3g", iterations, norm)
    return MatchResult(from_array(vector.reshape(shape), WALL_AXES, Backend.FLOAT), norm, iterations, converged)
