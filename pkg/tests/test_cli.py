"""Run the command line interface end to end on small cases."""

import csv
from fractions import Fraction

import pytest

from seriesflow.core.io import Document, read_document, write_document
from seriesflow.core.series import Backend, constant, from_items
from seriesflow.modules.prandtl import boundary_layer as bl
from seriesflow.util.constants import EXIT_ERROR, EXIT_OK, EXIT_VERIFICATION_FAILED, WALL_AXES
from . import utils

pytestmark = pytest.mark.cli

UNIT = ["--alpha", "1", "--beta", "1", "--gamma", "1", "--delta", "1"]


@pytest.fixture(autouse=True)
def empty_user_config(tmp_path, monkeypatch):
    """Keep a personal config file from changing the defaults."""
    config_file = tmp_path / "config.yaml"
    config_file.write_text("")
    monkeypatch.setenv("SERIESFLOW_CONFIG", str(config_file))


@pytest.fixture
def pvi_solution(tmp_path):
    path = tmp_path / "pvi.yaml"
    assert utils.run_cli(["pvi-solve", *UNIT, "--a0", "2", "--a1", "1", "--order", "9", "--out", str(path)]) == 0
    return path


def _read_csv(path):
    with open(path, encoding="utf-8") as f:
        return list(csv.reader(f))


def test_pvi_solve_writes_the_table(pvi_solution):
    document = read_document(pvi_solution)
    assert document.kind == "pvi-solution"
    assert document.backend is Backend.EXACT
    y = document.require("y")
    assert y.caps == (9,)
    assert y[2] == Fraction(5, 48)
    assert y[9] == Fraction(95777442903929, 19503969730560)
    assert document.metadata["parameters"]["alpha"] == "1"


def test_pvi_solve_to_stdout(capsys):
    assert utils.run_cli(["pvi-solve", *UNIT, "--a0", "2", "--a1", "1", "--order", "3"]) == EXIT_OK
    assert "311/864" in capsys.readouterr().out


def test_pvi_verify(pvi_solution, tmp_path):
    assert utils.run_cli(["pvi-verify", "--doc", str(pvi_solution)]) == EXIT_OK
    residual = tmp_path / "residual.yaml"
    assert utils.run_cli(["pvi-verify", "--doc", str(pvi_solution), "--alpha", "2", "--out", str(residual)]) \
        == EXIT_VERIFICATION_FAILED
    document = read_document(residual)
    assert document.verdict["passed"] is False


def test_too_short_series_fails_verification(tmp_path):
    path = tmp_path / "short.yaml"
    assert utils.run_cli(["pvi-solve", *UNIT, "--a0", "2", "--a1", "1", "--order", "1", "--out", str(path)]) \
        == EXIT_OK
    residual = tmp_path / "residual.yaml"
    assert utils.run_cli(["pvi-verify", "--doc", str(path), "--out", str(residual)]) == EXIT_VERIFICATION_FAILED
    assert not residual.exists()


def test_singular_seed_is_an_input_error(tmp_path):
    assert utils.run_cli(["pvi-solve", *UNIT, "--a0", "1", "--a1", "1", "--order", "4",
                          "--out", str(tmp_path / "x.yaml")]) == EXIT_ERROR


def test_pvi_crosscheck():
    assert utils.run_cli(["pvi-crosscheck", *UNIT, "--a0", "3/2", "--a1", "-1", "--i-max", "6"]) == EXIT_OK
    assert utils.run_cli(["pvi-crosscheck", "--list-members"]) == EXIT_OK
    assert utils.run_cli(["pvi-crosscheck", *UNIT]) == EXIT_ERROR


def test_pvi_oracle(tmp_path):
    solution = tmp_path / "float.yaml"
    table = tmp_path / "oracle.csv"
    assert utils.run_cli(["pvi-solve", *UNIT, "--a0", "2", "--a1", "1", "--order", "12", "--backend", "float",
                          "--out", str(solution)]) == EXIT_OK
    assert utils.run_cli(["pvi-oracle", "--doc", str(solution), "--x-max", "0.05", "--points", "6",
                          "--max-error", "1e-6", "--out", str(table)]) == EXIT_OK
    rows = _read_csv(table)
    assert rows[0] == ["x", "x_original", "series", "reference", "error"]
    assert len(rows) == 7
    assert float(rows[1][1]) == -1


def test_navier_stokes_round_trip(tmp_path):
    flow = tmp_path / "flow.yaml"
    marched = tmp_path / "marched.yaml"
    assert utils.run_cli(["ns-taylor-green", "--order", "4", "--out", str(flow)]) == EXIT_OK
    assert read_document(flow).metadata["nu"] == "1/10"
    assert utils.run_cli(["ns-verify", "--doc", str(flow)]) == EXIT_OK
    assert utils.run_cli(["ns-verify", "--doc", str(flow), "--nu", "1/5"]) == EXIT_VERIFICATION_FAILED
    assert utils.run_cli(["ns-march", "--doc", str(flow), "--steps", "1", "--out", str(marched)]) == EXIT_OK
    assert read_document(marched).require("u").caps == (2, 2, 2, 1)


def test_prandtl_round_trip(tmp_path):
    caps = (2, 4, 2)
    wall_caps, external_caps = bl.required_input_caps(caps)
    inputs = tmp_path / "inputs.yaml"
    layer = tmp_path / "layer.yaml"
    U = constant(Fraction(3, 2), external_caps, WALL_AXES)
    wall = constant(Fraction(1, 2), wall_caps, WALL_AXES)
    write_document(Document("prandtl-input", Backend.EXACT, {"U": U, "A1": wall}), inputs)
    assert utils.run_cli(["prandtl-solve", "--external", str(inputs), "--caps", "2", "4", "2",
                          "--out", str(layer)]) == EXIT_OK
    assert read_document(layer).require("u").caps == caps
    assert utils.run_cli(["prandtl-verify", "--doc", str(layer)]) == EXIT_OK
    assert utils.run_cli(["prandtl-solve", "--external", str(inputs), "--caps", "2", "4",
                          "--out", str(layer)]) == EXIT_ERROR


def test_prandtl_shear(tmp_path):
    shear = tmp_path / "shear.yaml"
    out = tmp_path / "separation.csv"
    A1 = from_items([((0, 0), 1.0), ((1, 0), -4.0)], (1, 0), WALL_AXES, Backend.FLOAT)
    write_document(Document("prandtl-input", Backend.FLOAT, {"A1": A1}), shear)
    assert utils.run_cli(["prandtl-shear", "--doc", str(shear), "--t", "0", "--x-max", "1", "--points", "100",
                          "--out", str(out)]) == EXIT_OK
    rows = _read_csv(out)
    assert rows[0] == ["t", "x_lower", "x_upper", "x_root"]
    assert float(rows[1][3]) == pytest.approx(0.25)


def test_profile(pvi_solution, tmp_path):
    out = tmp_path / "profile.csv"
    assert utils.run_cli(["profile", "--doc", str(pvi_solution), "--grid", "x=0:0.1:3", "--out", str(out)]) \
        == EXIT_OK
    rows = _read_csv(out)
    assert rows[0] == ["x", "y", "trusted"]
    assert [row[0] for row in rows[1:]] == ["0", "0.050000000000000003", "0.10000000000000001"]
    assert rows[1][1] == "2"
    assert all(row[2] == "true" for row in rows[1:])


def test_profile_of_a_zero_field(tmp_path):
    flow = tmp_path / "flow.yaml"
    out = tmp_path / "profile.csv"
    assert utils.run_cli(["ns-taylor-green", "--order", "2", "--out", str(flow)]) == EXIT_OK
    assert utils.run_cli(["profile", "--doc", str(flow), "--fields", "w", "--grid", "x=0.5", "t=0:1:2",
                          "--delimiter", ";", "--out", str(out)]) == EXIT_OK
    with open(out, encoding="utf-8") as f:
        lines = f.read().splitlines()
    assert lines == ["x;y;z;t;w;trusted", "0.5;0;0;0;0;true", "0.5;0;0;1;0;true"]


def test_profile_rejects_unknown_axes(pvi_solution):
    assert utils.run_cli(["profile", "--doc", str(pvi_solution), "--grid", "q=0:1"]) == EXIT_ERROR


def test_inspection_commands():
    assert utils.run_cli(["commands"]) == EXIT_OK
    assert utils.run_cli(["config"]) == EXIT_OK
    assert utils.run_cli(["config", "backend.default", "pvi.oracle.step"]) == EXIT_OK
    assert utils.run_cli(["config", "no.such.key"]) == EXIT_ERROR


def test_usage_errors(tmp_path):
    assert utils.run_cli(["pvi-slove"]) == EXIT_ERROR
    assert utils.run_cli(["pvi-solve", "--bogus"]) == EXIT_ERROR
    assert utils.run_cli(["pvi-verify", "--doc", str(tmp_path / "missing.yaml")]) == EXIT_ERROR
    assert utils.run_cli(["--version"]) == EXIT_OK


def test_user_config_is_validated(tmp_path):
    config_file = tmp_path / "bad.yaml"
    config_file.write_text("pvi:\n    nonsense: 1\n")
    assert utils.run_cli(["--config", str(config_file), "commands"]) == EXIT_ERROR
    good = tmp_path / "good.yaml"
    good.write_text("backend:\n    default: float\n")
    solution = tmp_path / "pvi.yaml"
    assert utils.run_cli(["--config", str(good), "pvi-solve", *UNIT, "--a0", "2", "--a1", "1", "--order", "3",
                          "--out", str(solution)]) == EXIT_OK
    assert read_document(solution).backend is Backend.FLOAT


def test_output_is_byte_identical_across_runs(pvi_solution, capsys):
    solve = ["pvi-solve", *UNIT, "--a0", "2", "--a1", "1/3", "--order", "12"]
    profile = ["profile", "--doc", str(pvi_solution), "--grid", "x=0:0.2:7"]
    for args in (solve, profile, solve + ["--backend", "float"]):
        assert utils.run_cli(args) == EXIT_OK
        first = capsys.readouterr().out
        assert utils.run_cli(args) == EXIT_OK
        second = capsys.readouterr().out
        assert first
        assert first.encode("utf-8") == second.encode("utf-8")
