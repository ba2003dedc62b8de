"""Command line front end of the boundary-layer module."""

import csv
import sys
from typing import List, Optional

from seriesflow.core.console import console
from seriesflow.core.io import Document, format_scalar, read_document, write_document
from seriesflow.core.prints import print_reports
from seriesflow.core.registry import command
from seriesflow.core.series import Backend, SeriesK, parse_scalar, to_backend
from seriesflow.modules.prandtl import boundary_layer as bl
from seriesflow.modules.prandtl.matching import match_wall_slope
from seriesflow.util.classes import Config, ScalarArg
from seriesflow.util.constants import EXIT_OK, EXIT_VERIFICATION_FAILED
from seriesflow.util.misc import CapMismatch, InvalidParameter, get_logger

log = get_logger(__name__)

LAYER_KIND = "prandtl-layer"

CONFIG = [
    Config("prandtl.nu", default=1, description="Kinematic viscosity"),
    Config("prandtl.rho", default=1, description="Density")
]


def _constant(name: str, given: Optional[str], document: Document, fallback=None):
    text = given if given is not None else document.metadata.get(name, fallback)
    if text is None:
        raise InvalidParameter(f"No value for {name}; give it with --{name}.")
    return parse_scalar(str(text), document.backend)


def _caps(caps: List[int]):
    if len(caps) != 3:
        raise CapMismatch(f"--caps takes three values I J K, got {len(caps)}.")
    return tuple(caps)


@command("prandtl-solve", description="Build the boundary-layer series from the outer flow and the wall shear rate",
         config=CONFIG + [
             Config("prandtl.matcher.max_iterations", default=20, description="Newton iterations of the matcher"),
             Config("prandtl.matcher.tolerance", default=1e-12, description="Residual norm the matcher stops at")
         ])
def prandtl_solve(external: str, caps: List[int], wall: Optional[str] = None,
                  nu: ScalarArg = Config("prandtl.nu"), rho: ScalarArg = Config("prandtl.rho"),
                  y_match: Optional[float] = None, x_grid: Optional[List[float]] = None,
                  t_grid: Optional[List[float]] = None,
                  max_iterations: int = Config("prandtl.matcher.max_iterations"),
                  tolerance: float = Config("prandtl.matcher.tolerance"), out: Optional[str] = None):
    """Read U (axes x, t) and the wall shear rate A1 (axes x, t) and write u, v and both inputs.

    The inputs may share one document. With --y-match the wall shear rate is not read but chosen by Newton
    iteration so that u meets U at that height on the grid given by --x-grid and --t-grid, in the float backend.
    """
    caps = _caps(caps)
    external_doc = read_document(external)
    U = external_doc.require("U")
    nu, rho = parse_scalar(str(nu), external_doc.backend), parse_scalar(str(rho), external_doc.backend)
    if y_match is not None:
        if not x_grid or not t_grid:
            raise InvalidParameter("Matching needs --x-grid and --t-grid.")
        result = match_wall_slope(U, float(nu), float(rho), caps, y_match, x_grid, t_grid,
                                  max_iterations=max_iterations, tolerance=tolerance)
        console.print(f"Matching {'converged' if result.converged else 'did not converge'} after "
                      f"{result.iterations} iterations, residual norm {result.residual_norm:.3g}", highlight=False)
        U, A1, nu, rho = to_backend(U, Backend.FLOAT), result.wall, float(nu), float(rho)
    else:
        wall_doc = read_document(wall) if wall else external_doc
        A1 = wall_doc.require("A1")
    layer = bl.construct(U, A1, nu, rho, caps)
    log.info("Constructed boundary layer with caps %s", layer.caps)
    write_document(Document(LAYER_KIND, layer.backend, {"u": layer.u, "v": layer.v, "U": U, "A1": A1},
                            {"nu": layer.nu, "rho": layer.rho, "caps": list(caps),
                             "matched_at": y_match}), out)
    return EXIT_OK


@command("prandtl-verify", description="Substitute a boundary layer into the momentum and continuity equations")
def prandtl_verify(doc: str, nu: Optional[ScalarArg] = None, tolerance: float = Config("verify.float_tolerance"),
                   out: Optional[str] = None):
    """Exit with status 2 when a residual is nonzero within its trustworthy order."""
    document = read_document(doc)
    u, v, U = document.require("u"), document.require("v"), document.require("U")
    layer = bl.BoundaryLayerSeries(u, v, _constant("nu", nu, document), _constant("rho", None, document, 1))
    report = bl.verify(layer, U, tolerance)
    reports = [report.momentum, report.continuity]
    print_reports(f"Boundary-layer residuals of {doc}", reports)
    passed = all(r.passed for r in reports)
    if out:
        fields = {r.label: r.residual for r in reports if r.residual is not None}
        write_document(Document("prandtl-residual", layer.backend, fields, {"source": doc, "nu": layer.nu},
                                {"passed": passed, "equations": [r.as_dict() for r in reports]}), out)
    return EXIT_OK if passed else EXIT_VERIFICATION_FAILED


@command("prandtl-shear", description="Locate sign changes of the wall shear rate along x at a fixed time")
def prandtl_shear(doc: str, t: float, x_max: float, x_min: float = 0.0, points: int = 101,
                  delimiter: str = Config("profile.delimiter"), out: Optional[str] = None):
    """Write one CSV row per separation point: the bracketing grid points and the refined root."""
    document = read_document(doc)
    shear: SeriesK = document.require("A1") if "u" not in document.fields \
        else bl.wall_shear_profile(bl.BoundaryLayerSeries(document.require("u"), document.require("v"),
                                                          _constant("nu", None, document, 1),
                                                          _constant("rho", None, document, 1)))
    found = bl.separation_points(shear, t, x_min, x_max, points)
    if not found:
        console.print(f"The wall shear rate keeps its sign on [{x_min}, {x_max}] at t = {t}.", highlight=False)
    f = open(out, "w", newline="", encoding="utf-8") if out else sys.stdout
    try:
        writer = csv.writer(f, delimiter=delimiter, lineterminator="\n")
        writer.writerow(["t", "x_lower", "x_upper", "x_root"])
        for point in found:
            writer.writerow([format_scalar(float(t)), format_scalar(point.lower), format_scalar(point.upper),
                             format_scalar(point.root)])
    finally:
        if out:
            f.close()
    return EXIT_OK
