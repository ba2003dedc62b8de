"""Tests for the Navier-Stokes module."""

import math
import random
from fractions import Fraction

import pytest

from seriesflow.core.series import Backend, monomial, truncate
from seriesflow.modules.navier_stokes import flow as ns
from seriesflow.util.constants import FLOW_AXES
from seriesflow.util.misc import CapMismatch, InvalidParameter, OrderError
from . import utils

pytestmark = pytest.mark.navier_stokes

NU = Fraction(1, 10)


def _random_flow(seed: int, caps=(3, 3, 3, 2)) -> ns.FlowSeries:
    rng = random.Random(seed)
    u, v, w, p = (utils.random_series(rng, caps, FLOW_AXES) for _ in range(4))
    return ns.FlowSeries(u, v, w, p, 2, Fraction(1, 3))


def test_rest_and_uniform_flow_have_zero_residuals():
    for flow in (ns.zero_flow((2, 2, 2, 2)), ns.uniform_flow(Fraction(3, 2), (2, 2, 2, 2), nu=NU)):
        report = ns.verify(flow)
        assert report.passed
        assert all(r.exact_zero for r in report.reports)
        assert [r.label for r in report.reports] == ["momentum-x", "momentum-y", "momentum-z", "continuity"]


def test_exact_taylor_green():
    flow = ns.taylor_green(4, NU, 1)
    assert flow.caps == (4, 4, 4, 4)
    assert flow.backend is Backend.EXACT
    report = ns.verify(flow)
    assert report.passed
    assert report.momentum["x"].trustworthy_order == (2, 2, 2, 3)
    assert report.continuity.trustworthy_order == (3, 3, 3, 4)


def test_float_taylor_green():
    flow = ns.taylor_green(10, 0.1, 1.0, Backend.FLOAT)
    assert ns.verify(flow, tolerance=1e-10).passed


def test_float_taylor_green_follows_the_exact_one():
    exact = ns.taylor_green(8, NU, 1)
    inexact = ns.taylor_green(8, 0.1, 1.0, Backend.FLOAT)
    for name in ("u", "v", "w", "pressure"):
        a, b = getattr(exact, name), getattr(inexact, name)
        assert a.caps == b.caps == (8, 8, 8, 8)
        assert b.array.astype(float) == pytest.approx(a.array.astype(float), rel=0, abs=1e-10)


def test_taylor_green_needs_the_right_viscosity():
    flow = ns.taylor_green(4, NU, 1)
    wrong = ns.FlowSeries(flow.u, flow.v, flow.w, flow.pressure, flow.rho, Fraction(1, 5))
    report = ns.verify(wrong)
    assert not report.momentum["x"].passed
    assert report.continuity.passed


def test_taylor_green_values():
    flow = ns.taylor_green(16, 0.1, 1.0, Backend.FLOAT)
    x, y, t = 0.1, 0.2, 0.05
    values = ns.evaluate_flow(flow, {"x": x, "y": y, "z": 0.3, "t": t})
    decay = math.exp(-2 * 0.1 * t)
    assert values["u"] == pytest.approx(-math.cos(x) * math.sin(y) * decay, abs=1e-10)
    assert values["v"] == pytest.approx(math.sin(x) * math.cos(y) * decay, abs=1e-10)
    assert values["w"] == 0
    assert values["P"] == pytest.approx(-0.25 * (math.cos(2 * x) + math.cos(2 * y)) * decay ** 2, abs=1e-10)


def test_time_march_reproduces_taylor_green():
    """One step from the t = 0 slice gives the first time level of the known solution."""
    flow = ns.taylor_green(6, NU, 1, time_order=2)
    marched = ns.time_march(flow.u, flow.v, flow.w, flow.pressure, 1, flow.rho, flow.nu)
    assert marched.caps == (4, 4, 4, 1)
    for name in ("u", "v", "w"):
        assert getattr(marched, name) == truncate(getattr(flow, name), (4, 4, 4, 1))


@pytest.mark.parametrize("seed, spatial, steps", [(0, 5, 1), (1, 5, 1), (2, 6, 2)])
def test_time_march_of_random_data_solves_momentum(seed, spatial, steps):
    rng = random.Random(500 + seed)
    u0, v0, w0 = (utils.random_series(rng, (spatial,) * 3, FLOW_AXES[:3]) for _ in range(3))
    pressure = utils.random_series(rng, (spatial - 1,) * 3 + (steps,), FLOW_AXES)
    marched = ns.time_march(u0, v0, w0, pressure, steps, Fraction(3, 2), NU)
    out = spatial - 2 * steps
    assert marched.caps == (out, out, out, steps)
    assert truncate(marched.u, (out, out, out, 0)).array[..., 0].tolist() == \
        truncate(u0, (out,) * 3).array.tolist()
    report = ns.verify(marched)
    for component in ("x", "y", "z"):
        assert report.momentum[component].conclusive
        assert report.momentum[component].passed, report.momentum[component].summary()


def test_time_march_without_steps():
    flow = ns.taylor_green(3, NU, 1)
    marched = ns.time_march(flow.u, flow.v, flow.w, flow.pressure, 0, 1, NU)
    assert marched.caps == (3, 3, 3, 0)
    assert marched.u == truncate(flow.u, (3, 3, 3, 0))


def test_time_march_caps():
    flow = ns.taylor_green(4, NU, 1, time_order=1)
    with pytest.raises(CapMismatch):
        ns.time_march(flow.u, flow.v, flow.w, flow.pressure, 3, 1, NU)
    with pytest.raises(CapMismatch):
        ns.time_march(flow.u, flow.v, flow.w, flow.pressure, 2, 1, NU)
    with pytest.raises(InvalidParameter):
        ns.time_march(flow.u, flow.v, flow.w, flow.pressure, 1, 0, NU)


@pytest.mark.parametrize("seed", range(3))
def test_momentum_identity_matches_engine(seed):
    """The single-index sums reproduce the engine's residual coefficients for an arbitrary flow."""
    flow = _random_flow(seed)
    report = ns.verify(flow)
    for component in ("x", "y", "z"):
        residual = report.momentum[component].residual
        for index in ((0, 0, 0, 0), (1, 0, 1, 1), (1, 1, 1, 0)):
            assert ns.momentum_identity(component, flow, index) == residual[index]
    with pytest.raises(OrderError):
        ns.momentum_identity("x", flow, (2, 0, 0, 0))


def test_invalid_flows():
    with pytest.raises(InvalidParameter):
        ns.uniform_flow(1, (2, 2, 2, 2), rho=0)
    with pytest.raises(InvalidParameter):
        ns.uniform_flow(1, (2, 2, 2, 2), nu=-1)
    with pytest.raises(InvalidParameter):
        ns.zero_flow((1, 1, 1, 1)).velocity("q")
    flow = ns.zero_flow((2, 2, 2, 2))
    with pytest.raises(CapMismatch):
        ns.FlowSeries(flow.u, flow.v, flow.w, ns.zero_flow((2, 2, 2, 1)).pressure, 1, 0)


def test_continuity_residual_of_a_compressing_flow():
    """u = x alone has divergence 1."""
    rest = ns.zero_flow((2, 2, 2, 2))
    flow = ns.FlowSeries(monomial((1, 0, 0, 0), (2, 2, 2, 2), FLOW_AXES), rest.v, rest.w, rest.pressure, 1, 0)
    report = ns.continuity_residual(flow)
    assert report.residual[0, 0, 0, 0] == 1
    assert report.first_nonzero == (0, 0, 0, 0)
    assert not report.passed
    assert ns.continuity_residual(rest).passed
    assert ns.continuity_residual(ns.taylor_green(5, NU, 1)).exact_zero
