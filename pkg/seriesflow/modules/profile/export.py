"""Tabulate the fields of a coefficient document on a rectangular grid.

Each row of the table holds one grid point, the value of every requested field there and a flag telling whether
the point lies inside the region where the truncated series can be trusted. That region is estimated per axis as
half of a radius of convergence obtained from a root test on the upper half of the coefficients.
"""

import csv
import itertools
import math
import sys
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from seriesflow.core.io import Document, format_scalar, read_document
from seriesflow.core.registry import command
from seriesflow.core.series import SeriesK, evalK
from seriesflow.util.classes import Config
from seriesflow.util.constants import EXIT_OK
from seriesflow.util.misc import CapMismatch, InvalidParameter, get_logger

log = get_logger(__name__)

TRUSTED_COLUMN = "trusted"


@dataclass
class ProfileTable:
    """Grid evaluation of document fields, ready to be written as CSV."""

    axes: List[str]
    fields: List[str]
    rows: List[list] = field(default_factory=list)

    @property
    def header(self) -> List[str]:
        return [*self.axes, *self.fields, TRUSTED_COLUMN]

    @property
    def untrusted(self) -> int:
        return sum(1 for row in self.rows if not row[-1])


def trust_radius(series: SeriesK, axis) -> float:
    """Estimate the radius of convergence along one axis.

    The coefficients of degree n along the axis are reduced to their largest magnitude m_n, and the radius is the
    smallest m_n ** (-1/n) over the upper half of the degrees. A series with no nonzero coefficient there gives inf.
    """
    position = series.axis_index(axis)
    cap = series.caps[position]
    magnitudes = np.moveaxis(series.array, position, 0)
    estimates = []
    for n in range(max(1, math.ceil(cap / 2)), cap + 1):
        level = np.asarray(magnitudes[n])
        m = max(abs(float(v)) for v in level.flat) if level.size else 0.0
        if m > 0:
            estimates.append(math.exp(-math.log(m) / n))
    return min(estimates) if estimates else math.inf


def parse_grid(specs: Sequence[str], axes: Sequence[str], points: int) -> Dict[str, List[float]]:
    """Turn grid options into a list of values per axis.

    Each spec is 'axis=value', 'axis=low:high' (with the given number of points) or 'axis=low:high:n'. Axes that are
    not named stay at 0.
    """
    if points < 1:
        raise InvalidParameter(f"A grid needs at least one point per axis, got {points}.")
    grid = {axis: [0.0] for axis in axes}
    for spec in specs:
        name, sep, values = spec.partition("=")
        name = name.strip()
        if not sep or name not in grid:
            raise CapMismatch(f"Grid option {spec!r} must name one of the axes {', '.join(axes)} as 'axis=...'.")
        parts = values.split(":")
        try:
            if len(parts) == 1:
                grid[name] = [float(parts[0])]
            elif len(parts) in (2, 3):
                n = int(parts[2]) if len(parts) == 3 else points
                if n < 1:
                    raise ValueError(n)
                grid[name] = [float(v) for v in np.linspace(float(parts[0]), float(parts[1]), n)]
            else:
                raise ValueError(values)
        except ValueError:
            raise InvalidParameter(f"Could not read the grid option {spec!r}.")
    return grid


def default_fields(document: Document) -> List[str]:
    """Fields over the largest set of axes, in document order."""
    if not document.fields:
        raise InvalidParameter(f"The {document.kind} document has no fields to evaluate.")
    widest = max(document.fields.values(), key=lambda s: s.ndim).axes
    return [name for name, series in document.fields.items() if series.axes == widest]


def emit_profile(document: Document, grid: Dict[str, List[float]], fields: Optional[Sequence[str]] = None
                 ) -> ProfileTable:
    """Evaluate fields of a document at every point of a rectangular grid.

    Args:
        document: Document holding the series.
        grid: Values per axis. Every axis of the requested fields must be present.
        fields: Names of the fields to evaluate. They must share their axes. Defaults to the fields over the
            largest set of axes.
    """
    names = list(fields) if fields else default_fields(document)
    series = [document.require(name) for name in names]
    axes = list(series[0].axes)
    for name, s in zip(names, series):
        if list(s.axes) != axes:
            raise CapMismatch(f"Field {name!r} has axes {s.axes}, but {names[0]!r} has {tuple(axes)}.")
    missing = [axis for axis in axes if axis not in grid]
    if missing:
        raise CapMismatch(f"The grid has no values for the axes {', '.join(missing)}.")

    radii = [{axis: trust_radius(s, axis) for axis in axes} for s in series]
    log.debug("Trust radii: %s", dict(zip(names, radii)))
    table = ProfileTable(axes, names)
    for point in itertools.product(*(grid[axis] for axis in axes)):
        at = dict(zip(axes, point))
        values = [float(evalK(s, at)) for s in series]
        trusted = all(abs(at[axis]) < r[axis] / 2 for r in radii for axis in axes)
        table.rows.append([*point, *values, trusted])

    if table.untrusted:
        log.warning("%d of %d grid points lie outside the region where the series can be trusted",
                    table.untrusted, len(table.rows))
    log.info("Evaluated %s at %d grid points", ", ".join(names), len(table.rows))
    return table


def write_profile(table: ProfileTable, path: Optional[str] = None, delimiter: str = ",") -> None:
    """Write the table as CSV with a header row, to stdout when no path is given."""
    f = open(path, "w", newline="", encoding="utf-8") if path else sys.stdout
    try:
        writer = csv.writer(f, delimiter=delimiter, lineterminator="\n")
        writer.writerow(table.header)
        for row in table.rows:
            writer.writerow([format_scalar(v) for v in row[:-1]] + [str(row[-1]).lower()])
    finally:
        if path:
            f.close()


@command("profile", description="Evaluate the fields of a document on a grid and write a CSV table",
         config=[
             Config("profile.points", default=11, description="Grid points per axis for ranges without a count"),
             Config("profile.delimiter", default=",", description="Column delimiter of CSV output")
         ])
def profile(doc: str, grid: Optional[List[str]] = None, fields: Optional[List[str]] = None,
            points: int = Config("profile.points"), delimiter: str = Config("profile.delimiter"),
            out: Optional[str] = None):
    """Grid options look like 'x=0:0.1', 'x=0:0.1:21' or 't=0.5'; axes not named are held at 0."""
    document = read_document(doc)
    names = fields or default_fields(document)
    axes = document.require(names[0]).axes
    table = emit_profile(document, parse_grid(grid or [], axes, points), names)
    write_profile(table, out, delimiter)
    return EXIT_OK
