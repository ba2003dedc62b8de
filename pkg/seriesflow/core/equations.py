"""Builtin polynomial differential expressions.

Each builtin is written as ``left-hand side - right-hand side`` so that an exact solution has a zero residual.
"""

from typing import Sequence

from seriesflow.core.residual import ParamCoeff, PolyDiffExpression, factor, term
from seriesflow.util.constants import BOUNDARY_LAYER_AXES, FLOW_AXES, PVI_AXES
from seriesflow.util.misc import InvalidParameter

_alpha = ParamCoeff.param("alpha")
_beta = ParamCoeff.param("beta")
_gamma = ParamCoeff.param("gamma")
_delta = ParamCoeff.param("delta")


def _coefficients(values: Sequence) -> dict:
    """Ascending polynomial coefficients as {degree: coefficient}."""
    return {d: c for d, c in enumerate(values) if not (isinstance(c, int) and c == 0)}


def builtin_pvi_shifted() -> PolyDiffExpression:
    """Sixth Painlevé equation, cleared of denominators, in the variable x = x_original - 1.

    The left-hand side collects the y'' terms with the multiplier ``2 (x-1)^2 (x-2)^2 y (y-1) (y-x+1)``.
    """
    ax = PVI_AXES
    y = factor("y", ax)
    y2 = factor("y", ax, 2)
    y3 = factor("y", ax, 3)
    p = factor("y", ax, x=1)
    p2 = factor("y", ax, 2, x=1)
    q = factor("y", ax, x=2)

    lhs = [
        term(ax, _coefficients([8, -24, 26, -12, 2]), y3, q, label="y^3 y''"),
        term(ax, _coefficients([0, -8, 24, -26, 12, -2]), y2, q, label="y^2 y''"),
        term(ax, _coefficients([-8, 32, -50, 38, -14, 2]), y, q, label="y y''"),
    ]
    rhs = [
        term(ax, _coefficients([12, -36, 39, -18, 3]), y2, p2, label="y^2 y'^2"),
        term(ax, _coefficients([0, -8, 24, -26, 12, -2]), y, p2, label="y y'^2"),
        term(ax, _coefficients([-4, 16, -25, 19, -7, 1]), p2, label="y'^2"),
        term(ax, _coefficients([12, -26, 18, -4]), y3, p, label="y^3 y'"),
        term(ax, _coefficients([-16, 40, -36, 14, -2]), y2, p, label="y^2 y'"),
        term(ax, _coefficients([4, -14, 18, -10, 2]), y, p, label="y y'"),
        term(ax, {0: 2 * _alpha}, factor("y", ax, 6), label="y^6"),
        term(ax, {1: -4 * _alpha}, factor("y", ax, 5), label="y^5"),
        term(ax, {0: -4 * _alpha - 2 * _beta - 4 * _gamma + 4 * _delta,
                  1: 4 * _alpha + 2 * _beta + 2 * _gamma - 6 * _delta,
                  2: 2 * _alpha + 2 * _delta}, factor("y", ax, 4), label="y^4"),
        term(ax, {0: -8 * _gamma - 8 * _delta,
                  1: 4 * _alpha + 4 * _beta + 12 * _gamma + 12 * _delta,
                  2: -4 * _alpha - 4 * _beta - 4 * _gamma - 4 * _delta}, y3, label="y^3"),
        term(ax, {0: 2 * _alpha + 4 * _beta - 4 * _gamma + 4 * _delta,
                  1: -4 * _alpha - 8 * _beta + 10 * _gamma - 6 * _delta,
                  2: 2 * _alpha + 2 * _beta - 8 * _gamma + 2 * _delta,
                  3: 2 * _beta + 2 * _gamma}, y2, label="y^2"),
        term(ax, {1: -4 * _beta, 2: 8 * _beta, 3: -4 * _beta}, y, label="y"),
        term(ax, {0: -2 * _beta, 1: 6 * _beta, 2: -6 * _beta, 3: 2 * _beta}, label="1"),
    ]
    return (PolyDiffExpression(ax, tuple(lhs), "pvi")
            - PolyDiffExpression(ax, tuple(rhs), "pvi"))


_VELOCITIES = {"x": "u", "y": "v", "z": "w"}


def builtin_navier_stokes(component: str = "x") -> PolyDiffExpression:
    """Incompressible momentum equation along one axis.

    ``F_t + u F_x + v F_y + w F_z + rho_inv P_component - nu (F_xx + F_yy + F_zz)`` where F is the velocity
    component. The parameters are ``rho_inv`` (inverse density) and ``nu`` (kinematic viscosity).
    """
    ax = FLOW_AXES
    if component not in _VELOCITIES:
        raise InvalidParameter(f"Unknown momentum component {component!r}, expected one of x, y, z.")
    f = _VELOCITIES[component]
    one = {(0, 0, 0, 0): 1}
    nu = {(0, 0, 0, 0): -ParamCoeff.param("nu")}
    terms = [
        term(ax, one, factor(f, ax, t=1), label="time"),
        term(ax, one, factor("u", ax), factor(f, ax, x=1), label="convection"),
        term(ax, one, factor("v", ax), factor(f, ax, y=1), label="convection"),
        term(ax, one, factor("w", ax), factor(f, ax, z=1), label="convection"),
        term(ax, {(0, 0, 0, 0): ParamCoeff.param("rho_inv")}, factor("P", ax, **{component: 1}), label="pressure"),
        term(ax, nu, factor(f, ax, x=2), label="viscosity"),
        term(ax, nu, factor(f, ax, y=2), label="viscosity"),
        term(ax, nu, factor(f, ax, z=2), label="viscosity"),
    ]
    return PolyDiffExpression(ax, tuple(terms), f"momentum-{component}")


def builtin_continuity(axes: Sequence[str] = FLOW_AXES,
                       velocities: Sequence[str] = ("u", "v", "w")) -> PolyDiffExpression:
    """Divergence of the velocity, over the spatial axes paired with the given velocity names."""
    axes = tuple(axes)
    one = {(0,) * len(axes): 1}
    terms = tuple(term(axes, one, factor(v, axes, **{a: 1}), label=f"d{v}/d{a}")
                  for a, v in zip(axes, velocities))
    return PolyDiffExpression(axes, terms, "continuity")


def builtin_prandtl() -> PolyDiffExpression:
    """Boundary-layer momentum equation with the pressure gradient taken from the outer flow U(x, t).

    ``u_t + u u_x + v u_y - U_t - U U_x - nu u_yy``, with U given over the same axes and constant in y.
    """
    ax = BOUNDARY_LAYER_AXES
    one = {(0, 0, 0): 1}
    minus = {(0, 0, 0): -1}
    terms = (
        term(ax, one, factor("u", ax, t=1), label="time"),
        term(ax, one, factor("u", ax), factor("u", ax, x=1), label="convection"),
        term(ax, one, factor("v", ax), factor("u", ax, y=1), label="convection"),
        term(ax, minus, factor("U", ax, t=1), label="outer flow"),
        term(ax, minus, factor("U", ax), factor("U", ax, x=1), label="outer flow"),
        term(ax, {(0, 0, 0): -ParamCoeff.param("nu")}, factor("u", ax, y=2), label="viscosity"),
    )
    return PolyDiffExpression(ax, terms, "prandtl")
