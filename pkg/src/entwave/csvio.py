"""Versioned CSV artifacts consumed by the analysis and plotting tools.

Every file starts with a comment line ``# schema=<name>.v<k>`` followed by
a comment line with the column names; readers check the schema before
trusting the columns.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

DIAGNOSTICS_SCHEMA = "entwave.diagnostics.v1"
FITS_SCHEMA = "entwave.fits.v1"
RESIDUALS_SCHEMA = "entwave.residuals.v1"

FITS_COLUMNS = [
    "experiment",
    "quantity",
    "kind",
    "value",
    "confidence",
    "window_lo",
    "window_hi",
    "residual",
    "n_samples",
    "passed",
]


class SchemaError(ValueError):
    pass


def _write_table(path, schema: str, columns: list[str], rows) -> None:
    path = Path(path)
    with path.open("w") as fh:
        fh.write(f"# schema={schema}\n")
        fh.write("# " + ",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(str(v) for v in row) + "\n")


def _read_header(path) -> tuple[str, list[str]]:
    with open(path) as fh:
        first = fh.readline().strip()
        second = fh.readline().strip()
    if not first.startswith("# schema="):
        raise SchemaError(f"{path}: missing schema line, got {first!r}")
    schema = first.split("=", 1)[1]
    columns = second.lstrip("# ").split(",")
    return schema, columns


def write_diagnostics_csv(path, series) -> None:
    from .diagnostics import COLUMNS

    rows = zip(*(series.data[c] for c in COLUMNS))
    _write_table(path, DIAGNOSTICS_SCHEMA, COLUMNS, rows)


def read_diagnostics_csv(path) -> dict[str, np.ndarray]:
    schema, columns = _read_header(path)
    if schema != DIAGNOSTICS_SCHEMA:
        raise SchemaError(
            f"{path}: schema {schema!r} unsupported (want {DIAGNOSTICS_SCHEMA})"
        )
    data = np.loadtxt(path, delimiter=",", skiprows=2, ndmin=2)
    if data.shape[1] != len(columns):
        raise SchemaError(
            f"{path}: {data.shape[1]} columns but header names {len(columns)}"
        )
    return {c: data[:, j] for j, c in enumerate(columns)}


def fit_row(experiment: str, quantity: str, fit, passed: bool) -> list:
    return [
        experiment,
        quantity,
        fit.kind,
        repr(fit.value),
        repr(fit.confidence),
        repr(fit.window[0]),
        repr(fit.window[1]),
        repr(fit.residual),
        fit.n_samples,
        "pass" if passed else "fail",
    ]


def write_fits_csv(path, rows: list[list]) -> None:
    _write_table(path, FITS_SCHEMA, FITS_COLUMNS, rows)


def read_fits_csv(path) -> list[dict]:
    schema, columns = _read_header(path)
    if schema != FITS_SCHEMA:
        raise SchemaError(f"{path}: schema {schema!r} unsupported (want {FITS_SCHEMA})")
    out = []
    with open(path) as fh:
        for line in fh:
            if line.startswith("#") or not line.strip():
                continue
            parts = line.strip().split(",")
            row = dict(zip(columns, parts))
            for key in ("value", "confidence", "window_lo", "window_hi", "residual"):
                row[key] = float(row[key])
            row["n_samples"] = int(row["n_samples"])
            out.append(row)
    return out


def write_residuals_csv(path, report: dict) -> None:
    c = report["c_envelope"]
    rows = [
        (repr(t), repr(s), repr(c))
        for t, s in zip(report["times"], report["normalized_sup"])
    ]
    _write_table(path, RESIDUALS_SCHEMA, ["t", "normalized_sup", "c_envelope"], rows)
