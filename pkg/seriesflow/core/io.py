"""Reading and writing coefficient documents.

A document is UTF-8 YAML with a fixed schema name and version. Every field is a series given by its axis labels,
its caps and its nonzero coefficients as ``[multi-index, value]`` pairs in lexicographic order. Exact values are
written as ``"p/q"`` (or ``"n"``), floats with 17 significant digits, so exact documents read back bit for bit and
identical inputs give byte-identical files.
"""

import logging
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Optional, Union

import yaml

from seriesflow.core.series import Backend, Scalar, SeriesK, from_items, parse_scalar
from seriesflow.util.constants import DOCUMENT_SCHEMA, DOCUMENT_VERSION, FLOAT_DIGITS
from seriesflow.util.misc import DocumentError, SeriesflowError

_log = logging.getLogger(__name__)


@dataclass
class Document:
    """Named series of one backend together with the metadata needed to reproduce them."""

    kind: str
    backend: Backend
    fields: Dict[str, SeriesK] = field(default_factory=dict)
    metadata: Dict[str, Any] = field(default_factory=dict)
    verdict: Optional[Dict[str, Any]] = None

    def require(self, name: str) -> SeriesK:
        """Return a field, with a message naming the document kind when it is absent."""
        if name not in self.fields:
            raise DocumentError(f"The {self.kind} document has no field {name!r} (fields: "
                                f"{', '.join(sorted(self.fields)) or 'none'}).")
        return self.fields[name]


def format_scalar(value: Scalar) -> str:
    """Serialize one coefficient.

    >>> format_scalar(Fraction(5, 48))
    '5/48'
    >>> format_scalar(0.1)
    '0.10000000000000001'
    """
    if isinstance(value, Fraction):
        return str(value)
    return format(float(value), f".{FLOAT_DIGITS}g")


def _metadata_value(value):
    if isinstance(value, Fraction) or isinstance(value, float):
        return format_scalar(value)
    if isinstance(value, Backend):
        return value.value
    if isinstance(value, (list, tuple)):
        return [_metadata_value(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _metadata_value(v) for k, v in value.items()}
    return value


def _series_to_dict(series: SeriesK) -> dict:
    return {
        "axes": list(series.axes),
        "caps": list(series.caps),
        "coefficients": [[list(index), format_scalar(value)] for index, value in sorted(series.items())]
    }


def document_to_dict(document: Document) -> dict:
    data = {
        "schema": DOCUMENT_SCHEMA,
        "version": DOCUMENT_VERSION,
        "kind": document.kind,
        "backend": document.backend.value,
        "fields": {name: _series_to_dict(series) for name, series in document.fields.items()},
        "metadata": _metadata_value(document.metadata)
    }
    if document.verdict is not None:
        data["verdict"] = _metadata_value(document.verdict)
    return data


def dump_document(document: Document) -> str:
    """Serialize a document to YAML text."""
    for name, series in document.fields.items():
        if series.backend is not document.backend:
            raise DocumentError(f"Field {name!r} uses the {series.backend.value} backend in a "
                                f"{document.backend.value} document.")
    return yaml.safe_dump(document_to_dict(document), sort_keys=True, default_flow_style=None, allow_unicode=True,
                          width=120)


def write_document(document: Document, path: Optional[Union[str, Path]] = None) -> None:
    """Write a document to a file, or to stdout when no path is given."""
    text = dump_document(document)
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    path = Path(path)
    if path.parent and not path.parent.is_dir():
        os.makedirs(path.parent, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)
    _log.info("Wrote %s document to %s", document.kind, path)


def _series_from_dict(name: str, data: Any, backend: Backend) -> SeriesK:
    if not isinstance(data, dict) or not {"axes", "caps", "coefficients"} <= set(data):
        raise DocumentError(f"Field {name!r} needs 'axes', 'caps' and 'coefficients'.")
    axes, caps, entries = data["axes"], data["caps"], data["coefficients"] or []
    if not isinstance(axes, list) or not isinstance(caps, list) or len(axes) != len(caps):
        raise DocumentError(f"Field {name!r} must have one cap per axis.")
    if not all(isinstance(c, int) and c >= 0 for c in caps):
        raise DocumentError(f"Field {name!r} has invalid caps {caps}.")
    items = []
    for entry in entries:
        if not isinstance(entry, list) or len(entry) != 2 or not isinstance(entry[0], list):
            raise DocumentError(f"Malformed coefficient entry {entry!r} in field {name!r}.")
        index, text = entry
        if len(index) != len(axes) or not all(isinstance(i, int) and 0 <= i <= c for i, c in zip(index, caps)):
            raise DocumentError(f"Coefficient index {index} in field {name!r} lies outside the caps {caps}.")
        try:
            value = parse_scalar(str(text), backend)
        except SeriesflowError as e:
            raise DocumentError(f"Field {name!r}, index {index}: {e}")
        items.append((index, value))
    return from_items(items, caps, axes, backend)


def document_from_dict(data: Any, source: str = "document") -> Document:
    if not isinstance(data, dict):
        raise DocumentError(f"{source} is not a coefficient document.")
    if data.get("schema") != DOCUMENT_SCHEMA:
        raise DocumentError(f"{source} has schema {data.get('schema')!r}, expected {DOCUMENT_SCHEMA!r}.")
    if data.get("version") != DOCUMENT_VERSION:
        raise DocumentError(f"{source} has version {data.get('version')!r}; this release reads version "
                            f"{DOCUMENT_VERSION}.")
    try:
        backend = Backend(data.get("backend"))
    except ValueError:
        raise DocumentError(f"{source} names an unknown backend {data.get('backend')!r}.")
    fields = data.get("fields") or {}
    if not isinstance(fields, dict):
        raise DocumentError(f"{source}: 'fields' must be a mapping.")
    return Document(
        kind=str(data.get("kind", "")),
        backend=backend,
        fields={name: _series_from_dict(name, value, backend) for name, value in fields.items()},
        metadata=data.get("metadata") or {},
        verdict=data.get("verdict")
    )


def load_document(text: str, source: str = "document") -> Document:
    """Parse a document from YAML text."""
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise DocumentError(f"{source} is not valid YAML:\n{e}")
    return document_from_dict(data, source)


def read_document(path: Union[str, Path]) -> Document:
    """Read a document from a file."""
    try:
        with open(path, encoding="utf-8") as f:
            text = f.read()
    except FileNotFoundError:
        raise DocumentError(f"Could not find the document '{path}'.")
    except (OSError, UnicodeDecodeError) as e:
        raise DocumentError(f"Could not read the document '{path}': {e}")
    return load_document(text, f"'{path}'")
