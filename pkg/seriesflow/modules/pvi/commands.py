"""Command line front end of the sixth Painlevé module."""

import csv
import sys
from typing import Dict, Optional

from rich import box
from rich.table import Table

from seriesflow.core.console import console
from seriesflow.core.io import Document, format_scalar, read_document, write_document
from seriesflow.core.prints import print_reports
from seriesflow.core.registry import command
from seriesflow.core.series import Backend, Series1, parse_scalar
from seriesflow.modules.pvi import oracle, solver
from seriesflow.modules.pvi.members import MEMBERS
from seriesflow.util.classes import Config, ScalarArg
from seriesflow.util.constants import EXIT_OK, EXIT_VERIFICATION_FAILED
from seriesflow.util.misc import DocumentError, InvalidParameter, get_logger

log = get_logger(__name__)

SOLUTION_KIND = "pvi-solution"
PARAMETER_NAMES = ("alpha", "beta", "gamma", "delta")


def _metadata(params: solver.PviParams, seed: solver.PviSeed, order: int) -> dict:
    return {
        "equation": "pvi-shifted",
        "expansion_point": "x = -1",
        "parameters": params.as_dict(),
        "seed": {"a0": seed.a0, "a1": seed.a1},
        "order": order
    }


def _read_solution(path: str, overrides: Dict[str, Optional[str]]):
    """Read a solution document and the equation constants, preferring values given on the command line."""
    document = read_document(path)
    series = document.require("y")
    if series.ndim != 1:
        raise DocumentError(f"Field 'y' of '{path}' must be a series in one variable.")
    stored = document.metadata.get("parameters") or {}
    values = {}
    for name in PARAMETER_NAMES:
        text = overrides.get(name)
        if text is None:
            text = stored.get(name)
        if text is None:
            raise InvalidParameter(f"'{path}' does not record {name}; give it with --{name}.")
        values[name] = parse_scalar(text if isinstance(text, str) else str(text), document.backend)
    return document, Series1(series.array, document.backend), solver.PviParams(**values)


@command("pvi-solve", description="Compute the series solution of the shifted sixth Painlevé equation")
def pvi_solve(alpha: ScalarArg, beta: ScalarArg, gamma: ScalarArg, delta: ScalarArg, a0: ScalarArg, a1: ScalarArg,
              order: int, backend: Backend = Config("backend.default"), out: Optional[str] = None):
    """Write the coefficients a_0..a_order as a document."""
    params = solver.PviParams(alpha, beta, gamma, delta)
    seed = solver.PviSeed(a0, a1)
    series = solver.solve(params, seed, order, backend)
    log.info("Solved PVI up to order %d", order)
    write_document(Document(SOLUTION_KIND, backend, {"y": series}, _metadata(params, seed, order)), out)
    return EXIT_OK


@command("pvi-verify", description="Substitute a PVI series into the equation and check the residual")
def pvi_verify(doc: str, alpha: Optional[ScalarArg] = None, beta: Optional[ScalarArg] = None,
               gamma: Optional[ScalarArg] = None, delta: Optional[ScalarArg] = None,
               tolerance: float = Config("verify.float_tolerance"), out: Optional[str] = None):
    """Exit with status 2 when a trustworthy coefficient is nonzero or the series is too short to check."""
    document, series, params = _read_solution(doc, {"alpha": alpha, "beta": beta, "gamma": gamma,
                                                      "delta": delta})
    report = solver.verify(series, params, tolerance)
    print_reports(f"Residual of {doc}", [report])
    if not report.conclusive:
        log.warning("The series is too short for any trustworthy residual coefficient")
    elif out:
        write_document(Document("pvi-residual", document.backend, {"residual": report.residual},
                                {"source": doc, "parameters": params.as_dict()}, report.as_dict()), out)
    return EXIT_OK if report.passed else EXIT_VERIFICATION_FAILED


@command("pvi-oracle", description="Compare a PVI series with a Runge-Kutta integration of the equation",
         config=[
             Config("pvi.oracle.step", default=1e-4, description="Largest Runge-Kutta step"),
             Config("pvi.oracle.x_max", default=0.1, description="Right end of the comparison grid"),
             Config("pvi.oracle.points", default=11, description="Number of grid points, including both ends"),
             Config("pvi.oracle.dps", description="Decimal digits for multiprecision integration, floats if unset")
         ])
def pvi_oracle(doc: str, step: float = Config("pvi.oracle.step"), x_max: float = Config("pvi.oracle.x_max"),
               points: int = Config("pvi.oracle.points"), dps: Optional[int] = Config("pvi.oracle.dps"),
               max_error: Optional[float] = None, min_slope: Optional[float] = None,
               delimiter: str = Config("profile.delimiter"), out: Optional[str] = None):
    """Write a CSV table of series value, reference value and difference over the grid.

    With --max-error the command fails when the largest difference exceeds it, and with --min-slope when the
    fitted slope of log error against log x falls below it.
    """
    _, series, params = _read_solution(doc, {})
    table = oracle.oracle_compare(series, params, x_max=x_max, step=step, points=points, dps=dps)
    _write_oracle_csv(table, delimiter, out)

    status = EXIT_OK
    console.print(f"Largest difference: {table.max_error:.3g}", highlight=False)
    if max_error is not None and table.max_error > max_error:
        log.error("The largest difference %.3g exceeds %.3g", table.max_error, max_error)
        status = EXIT_VERIFICATION_FAILED
    if min_slope is not None:
        slope = oracle.convergence_slope(table)
        console.print(f"Convergence slope: {slope:.2f}", highlight=False)
        if slope < min_slope:
            log.error("The convergence slope %.2f is below %.2f", slope, min_slope)
            status = EXIT_VERIFICATION_FAILED
    return status


def _write_oracle_csv(table: oracle.OracleTable, delimiter: str, out: Optional[str]):
    f = open(out, "w", newline="", encoding="utf-8") if out else sys.stdout
    try:
        writer = csv.writer(f, delimiter=delimiter, lineterminator="\n")
        writer.writerow(["x", "x_original", "series", "reference", "error"])
        for row in table.rows:
            writer.writerow([format_scalar(row.x), format_scalar(oracle.to_original_x(row.x)),
                             format_scalar(float(row.series)), format_scalar(float(row.reference)),
                             format_scalar(float(row.error))])
    finally:
        if out:
            f.close()


@command("pvi-crosscheck", description="Check the 65-member coefficient expansion against the residual engine",
         config=[
             Config("pvi.crosscheck.i_max", default=15, description="Highest coefficient index to compare")
         ])
def pvi_crosscheck(alpha: Optional[ScalarArg] = None, beta: Optional[ScalarArg] = None,
                   gamma: Optional[ScalarArg] = None, delta: Optional[ScalarArg] = None,
                   a0: Optional[ScalarArg] = None, a1: Optional[ScalarArg] = None,
                   i_max: int = Config("pvi.crosscheck.i_max"), backend: Backend = Config("backend.default"),
                   list_members: bool = False):
    """Exit with status 2 when the two evaluations disagree."""
    if list_members:
        _print_members()
        return EXIT_OK
    values = {"alpha": alpha, "beta": beta, "gamma": gamma, "delta": delta, "a0": a0, "a1": a1}
    missing = [name for name, value in values.items() if value is None]
    if missing:
        raise InvalidParameter(f"The cross-check needs {', '.join('--' + m for m in missing)}.")
    check = solver.members_vs_engine(i_max, solver.PviParams(alpha, beta, gamma, delta), solver.PviSeed(a0, a1))
    if check:
        console.print(f"[green]{check.summary()}[/green]", highlight=False)
        return EXIT_OK
    console.print(f"[red]{check.summary()}[/red]", highlight=False)
    return EXIT_VERIFICATION_FAILED


def _print_members():
    table = Table(title="Members of the coefficient identity at x^i", box=box.SIMPLE, title_justify="left")
    for column in ("Member", "Side", "Coefficient", "Product", "From i", "Term"):
        table.add_column(column)
    for m in MEMBERS:
        start = f"= {m.shift}" if m.exact else f">= {m.shift}"
        table.add_row(str(m.id), m.side, str(m.coefficient), "*".join(m.factors.upper()) or "1", start, m.source)
    console.print(table)
