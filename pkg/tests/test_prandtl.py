"""Tests for the boundary-layer module."""

import random
from fractions import Fraction

import numpy as np
import pytest

from seriesflow.core.series import Backend, constant, evalK, from_array, from_items, monomial, truncate, zeros
from seriesflow.modules.prandtl import boundary_layer as bl
from seriesflow.modules.prandtl.matching import match_wall_slope
from seriesflow.util.constants import BOUNDARY_LAYER_AXES, WALL_AXES
from seriesflow.util.misc import CapMismatch, InvalidParameter, MissingCoefficient, OrderError
from . import utils

pytestmark = pytest.mark.prandtl

CAPS = (3, 8, 3)


def _random_inputs(seed: int, caps=CAPS):
    rng = random.Random(seed)
    wall_caps, external_caps = bl.required_input_caps(caps)
    U = utils.random_series(rng, external_caps, WALL_AXES)
    wall = utils.random_series(rng, wall_caps, WALL_AXES)
    nu = utils.rational(rng, 3, nonzero=True)
    return U, wall, nu


def test_required_input_caps():
    assert bl.required_input_caps((3, 8, 3)) == ((6, 6), (7, 7))
    assert bl.required_input_caps((3, 4, 3)) == ((4, 4), (5, 5))
    with pytest.raises(InvalidParameter):
        bl.required_input_caps((3, 0, 3))


def test_level_caps_staircase():
    caps = bl.level_caps((6, 6), (7, 7), 8)
    assert caps[1] == (6, 6)
    assert caps[2] == (6, 6)
    assert caps[3] == (6, 5)
    assert caps[8][0] >= CAPS[0] and caps[8][1] >= CAPS[2]


def test_constant_outer_flow_gives_no_second_level():
    U, wall, nu = _random_inputs(0)
    U = constant(Fraction(5, 2), U.caps, WALL_AXES)
    layer = bl.construct(U, wall, nu, 1, CAPS)
    assert not np.any(layer.u.array[:, 2, :])
    assert bl.verify(layer, U).passed


def test_stagnant_layer():
    """Constant outer flow without wall shear leaves the fluid at rest."""
    wall_caps, external_caps = bl.required_input_caps(CAPS)
    U = constant(1, external_caps, WALL_AXES)
    layer = bl.construct(U, zeros(wall_caps, WALL_AXES), 1, 1, CAPS)
    assert not np.any(layer.u.array) and not np.any(layer.v.array)


def test_steady_wall_shear_gives_no_third_level():
    wall_caps, external_caps = bl.required_input_caps(CAPS)
    U, _, nu = _random_inputs(1)
    wall = from_items([((i, 0), Fraction(i + 1, 3)) for i in range(wall_caps[0] + 1)], wall_caps, WALL_AXES,
                      Backend.EXACT)
    layer = bl.construct(U, wall, nu, 1, CAPS)
    assert not np.any(layer.u.array[:, 3, :])


@pytest.mark.parametrize("seed", range(10))
def test_random_layers_verify(seed):
    U, wall, nu = _random_inputs(100 + seed)
    layer = bl.construct(U, wall, nu, 1, CAPS)
    assert layer.caps == CAPS
    report = bl.verify(layer, U)
    assert report.momentum.trustworthy_order == (2, 6, 2)
    assert report.passed
    assert report.momentum.exact_zero and report.continuity.exact_zero


def test_general_recurrence_matches_momentum_form():
    """Eliminating v through continuity gives the same coefficients as the momentum equation with v kept."""
    U, wall, nu = _random_inputs(7)
    layer = bl.construct(U, wall, nu, 1, CAPS)
    for i in range(3):
        for j in range(4, 9):
            for k in range(3):
                assert bl.a_from_momentum(i, j, k, layer.u, layer.v, nu) == layer.u[i, j, k]
    with pytest.raises(MissingCoefficient):
        bl.a_from_momentum(3, 4, 0, layer.u, layer.v, nu)


def test_continuity_coefficients():
    U, wall, nu = _random_inputs(8)
    layer = bl.construct(U, wall, nu, 1, CAPS)
    A, B = layer.u, layer.v
    for i in range(3):
        for j in range(2, 9):
            for k in range(4):
                assert B[i, j, k] == -Fraction(i + 1, j) * A[i + 1, j - 1, k]
    assert not np.any(B.array[:, :2, :])


def test_insufficient_input_caps():
    U, wall, nu = _random_inputs(2)
    with pytest.raises(CapMismatch):
        bl.construct(U, truncate(wall, (5, None)), nu, 1, CAPS)
    with pytest.raises(CapMismatch):
        bl.construct(truncate(U, (None, 6)), wall, nu, 1, CAPS)
    with pytest.raises(InvalidParameter):
        bl.construct(U, wall, 0, 1, CAPS)


def test_wall_conditions_are_enforced():
    layer = bl.construct(*_random_inputs(3), 1, (2, 4, 2))
    u = layer.u.array.copy()
    u[0, 0, 0] = 1
    with pytest.raises(InvalidParameter):
        bl.BoundaryLayerSeries(from_array(u, BOUNDARY_LAYER_AXES, Backend.EXACT), layer.v, layer.nu, layer.rho)


def test_truncation_residual_shrinks_with_more_levels():
    """Stagnation-point flow U = x: the pointwise residual falls as more levels in y are kept."""
    residuals = []
    for levels in (4, 6, 8):
        caps = (2, levels, 1)
        wall_caps, external_caps = bl.required_input_caps(caps)
        U = monomial((1, 0), external_caps, WALL_AXES, 1.0, Backend.FLOAT)
        wall = monomial((1, 0), wall_caps, WALL_AXES, 1.2326, Backend.FLOAT)
        layer = bl.construct(U, wall, 1.0, 1.0, caps)
        assert bl.verify(layer, U).passed
        residuals.append(abs(bl.pointwise_residual(layer, U, (0.5, 0.2, 0.1))))
    assert residuals[0] > residuals[1] > residuals[2]


def test_wall_shear_profile():
    U, wall, nu = _random_inputs(4)
    layer = bl.construct(U, wall, nu, 1, CAPS)
    assert bl.wall_shear_profile(layer) == truncate(wall, (3, 3))


def test_separation_point():
    shear = from_items([((0, 0), 1.0), ((1, 0), -4.0)], (1, 0), WALL_AXES, Backend.FLOAT)
    found = bl.separation_points(shear, 0.0, 0.0, 1.0, points=100)
    assert len(found) == 1
    assert found[0].lower < 0.25 < found[0].upper
    assert found[0].root == pytest.approx(0.25, abs=1e-12)
    assert bl.separation_points(constant(1.0, (1, 0), WALL_AXES, Backend.FLOAT), 0.0, 0.0, 1.0) == []


def test_matching_meets_the_outer_flow():
    caps = (1, 4, 1)
    _, external_caps = bl.required_input_caps(caps)
    U = from_items([((0, 0), 1.0), ((1, 0), 1.0)], external_caps, WALL_AXES, Backend.FLOAT)
    x_grid, t_grid = [0.0, 0.5, 1.0], [0.0, 0.5]
    result = match_wall_slope(U, 1.0, 1.0, caps, 0.5, x_grid, t_grid, tolerance=1e-9)
    assert result.converged
    layer = bl.construct(U, result.wall, 1.0, 1.0, caps)
    for x in x_grid:
        for t in t_grid:
            assert evalK(layer.u, (x, 0.5, t)) == pytest.approx(evalK(U, (x, t)), abs=1e-8)
    with pytest.raises(InvalidParameter):
        match_wall_slope(U, 1.0, 1.0, caps, 0.0, x_grid, t_grid)


def test_second_level_from_the_outer_flow():
    nu = Fraction(1, 3)
    U = monomial((1, 0), (2, 2), WALL_AXES)
    level = bl.a2_from_external(U, nu)
    assert level.caps == (1, 1)
    assert level[0, 0] == 0
    assert level[1, 0] == Fraction(-3, 2)
    assert not np.any(bl.a2_from_external(constant(Fraction(5, 2), (3, 3), WALL_AXES), nu).array)
    with pytest.raises(OrderError):
        bl.a2_from_external(constant(1, (0, 2), WALL_AXES), nu)


def test_third_level_from_the_wall_shear_rate():
    nu = Fraction(1, 7)
    level = bl.a3_from_wall(monomial((0, 1), (1, 1), WALL_AXES, 6 * nu), nu)
    assert level[0, 0] == 1
    steady = from_items([((i, 0), i + 1) for i in range(3)], (2, 2), WALL_AXES, Backend.EXACT)
    assert not np.any(bl.a3_from_wall(steady, nu).array)
    with pytest.raises(MissingCoefficient):
        bl.a3_from_wall(constant(1, (2, 0), WALL_AXES), nu)


def test_continuity_levels():
    A = utils.random_series(random.Random(9), (3, 3, 2), BOUNDARY_LAYER_AXES)
    B = bl.b_from_a(A)
    assert B.caps == (2, 4, 2)
    assert not np.any(B.array[:, :2, :])
    for i in range(3):
        for k in range(3):
            assert B[i, 2, k] == -Fraction(i + 1, 2) * A[i + 1, 1, k]
    assert not np.any(bl.b_from_a(zeros((3, 3, 2), BOUNDARY_LAYER_AXES)).array)


def test_general_recurrence_on_zero_levels():
    table = bl.LevelTable(2, 4, 2, Backend.EXACT)
    for j in (1, 2, 3):
        table.set_level(j, zeros((2, 2), WALL_AXES).array, (2, 2))
    assert bl.a_general(0, 4, 0, table, Fraction(1, 2)) == 0
    with pytest.raises(InvalidParameter):
        bl.a_general(0, 3, 0, table, Fraction(1, 2))
    with pytest.raises(MissingCoefficient):
        bl.a_general(0, 4, 0, bl.LevelTable(2, 4, 2, Backend.EXACT), Fraction(1, 2))
