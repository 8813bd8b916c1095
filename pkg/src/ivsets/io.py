"""CSV exchange for covariance matrices and datasets."""

from __future__ import annotations

import csv
import io
from typing import Sequence

import numpy as np

from .errors import FormatError
from .simulate import Dataset
from .wright import CovarianceModel


def _rows(text: str) -> list[list[str]]:
    rows = [r for r in csv.reader(io.StringIO(text)) if any(c.strip() for c in r)]
    if not rows:
        raise FormatError("empty CSV")
    return [[c.strip() for c in r] for r in rows]


def _numeric(rows: list[list[str]], width: int) -> np.ndarray:
    out = np.empty((len(rows), width))
    for i, r in enumerate(rows, start=2):
        if len(r) != width:
            raise FormatError(f"row {i} has {len(r)} fields, expected {width}")
        for j, c in enumerate(r):
            try:
                out[i - 2, j] = float(c)
            except ValueError:
                raise FormatError(f"row {i}, column {j + 1}: {c!r} is not a number") from None
    return out


def load_covariance(csv_text: str, variables: Sequence[str] | None = None) -> CovarianceModel:
    """Parse a header-plus-square-matrix CSV.

    With ``variables`` the result is restricted and reordered to them.
    Asymmetry beyond 1e-8 and non-positive-definite matrices are rejected.
    """
    rows = _rows(csv_text)
    header, body = rows[0], rows[1:]
    if len(set(header)) != len(header) or any(not h for h in header):
        raise FormatError("header must list distinct, non-empty variable names")
    if len(body) != len(header):
        raise FormatError(f"{len(body)} data rows for {len(header)} variables")
    model = CovarianceModel(tuple(header), _numeric(body, len(header)))
    if variables is None:
        return model
    missing = [v for v in variables if v not in model]
    if missing:
        raise FormatError(f"covariance file lacks {', '.join(missing)}")
    return model.restricted(tuple(variables))


def export_covariance(model: CovarianceModel) -> str:
    """CSV with shortest round-tripping float repr, so load(export(m)) is bit-exact."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(model.variables)
    for row in model.matrix:
        w.writerow([repr(float(x)) for x in row])
    return buf.getvalue()


def export_dataset(d: Dataset) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(d.variables)
    for row in d.data:
        w.writerow([repr(float(x)) for x in row])
    return buf.getvalue()


def load_dataset(csv_text: str) -> Dataset:
    rows = _rows(csv_text)
    header, body = rows[0], rows[1:]
    if len(set(header)) != len(header):
        raise FormatError("duplicate column names")
    return Dataset(tuple(header), _numeric(body, len(header)))
