"""Tests for configuration handling, the command registry, coefficient documents and grid profiles."""

import math
from fractions import Fraction
from typing import List, Optional

import pytest

from seriesflow.core import config, registry
from seriesflow.core.io import Document, dump_document, format_scalar, load_document
from seriesflow.core.series import Backend, Series1, SeriesK
from seriesflow.modules.profile.export import emit_profile, parse_grid, trust_radius
from seriesflow.util.classes import Config, ScalarArg
from seriesflow.util.misc import CapMismatch, DocumentError, InvalidParameter, SeriesflowError


@pytest.fixture(autouse=True)
def loaded_config():
    registry.find_modules()
    config.load_config(config_dict={})
    yield
    config.load_config(config_dict={})


def test_defaults_are_loaded():
    assert config.get("backend.default") == "exact"
    assert config.get("verify.float_tolerance") == pytest.approx(1e-10)
    assert config.get("pvi.crosscheck.i_max") == 15
    assert config.get("navier_stokes.nu") == "1/10"
    assert config.get("no.such.key", "fallback") == "fallback"


def test_user_values_override_defaults():
    config.load_config(config_dict={"backend": {"default": "float"}, "pvi": {"oracle": {"dps": 30}}})
    assert config.get("backend.default") == "float"
    assert config.get("pvi.oracle.dps") == 30
    assert config.get("pvi.oracle.step") == pytest.approx(1e-4)
    config.validate_config()


def test_unknown_keys_are_rejected():
    with pytest.raises(SeriesflowError):
        config.validate_config({"nosuch": {"key": 1}})
    with pytest.raises(SeriesflowError):
        config.validate_config({"prandtl": {"viscosity": 1}})
    with pytest.raises(SeriesflowError):
        config.validate_config({"pvi": 3})
    config.validate_config({"prandtl": {"matcher": {"tolerance": 1e-8}}})


def test_sections_must_be_mappings():
    with pytest.raises(SeriesflowError):
        config.load_config(config_dict={"backend": "float"})


def test_read_yaml(tmp_path):
    with pytest.raises(SeriesflowError):
        config.read_yaml(tmp_path / "missing.yaml")
    broken = tmp_path / "broken.yaml"
    broken.write_text("backend: [unclosed\n")
    with pytest.raises(SeriesflowError):
        config.read_yaml(broken)
    listing = tmp_path / "list.yaml"
    listing.write_text("- a\n- b\n")
    with pytest.raises(SeriesflowError):
        config.read_yaml(listing)
    empty = tmp_path / "empty.yaml"
    empty.write_text("")
    assert config.read_yaml(empty) == {}


def test_set_and_get_values():
    config.set_value("profile.points", 5)
    assert config.get("profile.points") == 5
    config.set_default("profile.points", 7)
    assert config.get("profile.points") == 5
    config.set_default("profile.new_key", 3)
    assert config.get("profile.new_key") == 3
    nested = {}
    config.set_value("a.b.c", 1, config_dict=nested)
    assert nested == {"a": {"b": {"c": 1}}}


def test_module_config_is_declared():
    config.validate_module_config()
    assert "prandtl-shear" in config.config_usage["profile.delimiter"]
    assert config.get_config_description("prandtl.nu") == "Kinematic viscosity"


def test_module_keys_need_their_prefix():
    with pytest.raises(ValueError):
        registry.handle_config(Config("other.key", 1, "Misplaced"), "pvi")
    with pytest.raises(ValueError):
        registry.handle_config(Config("pvi.undescribed", 1), "pvi")


def test_signature_types():
    assert registry.get_type_hint_type(Optional[List[int]]) == (int, True, True)
    assert registry.get_type_hint_type(ScalarArg) == (ScalarArg, False, False)
    assert registry.option_name("x_max") == "--x-max"


def test_registered_commands():
    expected = {"pvi-solve", "pvi-verify", "pvi-oracle", "pvi-crosscheck", "ns-taylor-green", "ns-verify",
                "ns-march", "prandtl-solve", "prandtl-verify", "prandtl-shear", "profile"}
    assert expected <= set(registry.commands)
    assert registry.commands["ns-verify"].module_name == "navier_stokes"


def test_scalar_arguments_follow_the_backend():
    job = registry.JobSpec("ns-taylor-green", {"order": "2", "backend": "float"})
    arguments = registry.resolve_arguments(job)
    assert arguments["order"] == 2
    assert arguments["backend"] is Backend.FLOAT
    assert arguments["nu"] == pytest.approx(0.1)
    exact = registry.resolve_arguments(registry.JobSpec("ns-taylor-green", {"order": "2"}))
    assert exact["nu"] == Fraction(1, 10)
    with pytest.raises(InvalidParameter):
        registry.resolve_arguments(registry.JobSpec("ns-taylor-green", {}))
    with pytest.raises(InvalidParameter):
        registry.resolve_arguments(registry.JobSpec("ns-taylor-green", {"order": "two"}))


def test_document_round_trip():
    exact = Document("test", Backend.EXACT,
                     {"y": Series1([2, 1, Fraction(5, 48)]),
                      "u": SeriesK([[0, Fraction(-1, 3)], [1, 0]], ("x", "t"))},
                     {"nu": Fraction(1, 10), "order": 2})
    text = dump_document(exact)
    loaded = load_document(text)
    assert loaded.fields["y"] == exact.fields["y"]
    assert loaded.fields["u"] == exact.fields["u"]
    assert loaded.metadata == {"nu": "1/10", "order": 2}
    assert dump_document(loaded) == text

    inexact = Document("test", Backend.FLOAT, {"y": Series1([0.1, 1 / 3, -2.5e-17])})
    assert load_document(dump_document(inexact)).fields["y"] == inexact.fields["y"]


def test_scalar_formatting():
    assert format_scalar(Fraction(5, 48)) == "5/48"
    assert format_scalar(Fraction(3)) == "3"
    assert format_scalar(0.1) == "0.10000000000000001"
    assert format_scalar(2.0) == "2"


@pytest.mark.parametrize("text", [
    "schema: other/format\nversion: 1\nbackend: exact\n",
    "schema: seriesflow/coefficients\nversion: 99\nbackend: exact\n",
    "schema: seriesflow/coefficients\nversion: 1\nbackend: decimal\n",
    "schema: seriesflow/coefficients\nversion: 1\nbackend: exact\n"
    "fields: {y: {axes: [x], caps: [1], coefficients: [[[2], '1']]}}\n",
    "schema: seriesflow/coefficients\nversion: 1\nbackend: exact\n"
    "fields: {y: {axes: [x], caps: [1], coefficients: [[[0], 'one']]}}\n",
    "schema: seriesflow/coefficients\nversion: 1\nbackend: exact\nfields: {y: {axes: [x]}}\n",
    "- not a document\n",
])
def test_malformed_documents(text):
    with pytest.raises(DocumentError):
        load_document(text)


def test_document_backends_must_agree():
    with pytest.raises(DocumentError):
        dump_document(Document("test", Backend.EXACT, {"y": Series1([0.5, 1.0])}))


def test_trust_radius():
    geometric = Series1([2 ** n for n in range(9)])
    assert trust_radius(geometric, "x") == pytest.approx(0.5)
    assert trust_radius(Series1([1, 0, 0]), "x") == math.inf
    two_axes = SeriesK([[1, 0], [0, 0], [16, 0]], ("x", "t"))
    assert trust_radius(two_axes, "x") == pytest.approx(0.25)
    assert trust_radius(two_axes, "t") == math.inf


def test_parse_grid():
    grid = parse_grid(["x=0:1:3", "t=0.5"], ("x", "y", "t"), 11)
    assert grid == {"x": [0.0, 0.5, 1.0], "y": [0.0], "t": [0.5]}
    assert len(parse_grid(["x=0:1"], ("x",), 5)["x"]) == 5
    with pytest.raises(CapMismatch):
        parse_grid(["z=1"], ("x",), 5)
    with pytest.raises(CapMismatch):
        parse_grid(["x"], ("x",), 5)
    for bad in ("x=a", "x=0:1:0", "x=0:1:2:3"):
        with pytest.raises(InvalidParameter):
            parse_grid([bad], ("x",), 5)
    with pytest.raises(InvalidParameter):
        parse_grid([], ("x",), 0)


def test_emit_profile_flags_points_outside_the_trusted_region():
    exp = Series1([1.0 / math.factorial(n) for n in range(11)])
    table = emit_profile(Document("test", Backend.FLOAT, {"y": exp}), {"x": [0.0, 0.5, 10.0]})
    assert table.header == ["x", "y", "trusted"]
    assert table.rows[1][1] == pytest.approx(math.exp(0.5), rel=1e-10)
    assert [row[-1] for row in table.rows] == [True, True, False]
    assert table.untrusted == 1
    with pytest.raises(CapMismatch):
        emit_profile(Document("test", Backend.FLOAT, {"y": exp}), {"t": [0.0]})


def test_errors_carry_only_their_message():
    error = InvalidParameter("The density must be nonzero.", "navier_stokes", "time_march")
    assert str(error) == "The density must be nonzero."
    assert error.args == ("The density must be nonzero.",)
    assert (error.module, error.function) == ("navier_stokes", "time_march")
    assert isinstance(error, SeriesflowError)
