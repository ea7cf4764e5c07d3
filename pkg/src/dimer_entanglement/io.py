"""CSV tables and susceptibility-curve files.

Curve files look like::

    # label: NIC II synthetic
    temperature_K,chi_cm3_per_mol,sigma_chi
    5.0,0.00127...,1e-05

Lines starting with ``#`` are comments; the first ``# label:`` comment is
kept as the curve label. Floats are written with ``repr`` so every file
written here parses back to the same values and re-serializes to the same
bytes.
"""

from __future__ import annotations

import csv
import io
import math
from pathlib import Path

import numpy as np

from .analysis import SusceptibilityCurve
from .errors import DomainError

T_COLUMN = "temperature_K"
CHI_COLUMN = "chi_cm3_per_mol"
SIGMA_COLUMN = "sigma_chi"
_LABEL_PREFIX = "# label: "


class ParseError(ValueError):
    pass


def format_cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if value is None:
        return ""
    return repr(float(value))


def parse_cell(text: str):
    text = text.strip()
    if text == "":
        return None
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"not a number: {text!r}") from None


def write_table(path, header, rows, comments=()) -> None:
    buf = io.StringIO()
    for c in comments:
        buf.write(f"# {c}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_cell(v) for v in row])
    Path(path).write_text(buf.getvalue())


def read_table(path):
    """Return ``(comments, header, rows)`` with numeric cells parsed."""
    comments, data_lines = [], []
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            comments.append(line[1:].strip())
        elif line.strip():
            data_lines.append(line)
    if not data_lines:
        raise ParseError(f"{path}: no header line")
    reader = csv.reader(data_lines)
    header = [h.strip() for h in next(reader)]
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if len(row) != len(header):
            raise ParseError(f"{path}: row {lineno} has {len(row)} fields, expected {len(header)}")
        try:
            rows.append([parse_cell(c) for c in row])
        except ParseError as exc:
            raise ParseError(f"{path}: row {lineno}: {exc}") from None
    return comments, header, rows


def read_curve(path) -> SusceptibilityCurve:
    comments, header, rows = read_table(path)
    if header[:2] != [T_COLUMN, CHI_COLUMN] or len(header) > 3 or (len(header) == 3 and header[2] != SIGMA_COLUMN):
        raise ParseError(f"{path}: header must be {T_COLUMN},{CHI_COLUMN}[,{SIGMA_COLUMN}]")
    if any(v is None or (isinstance(v, float) and not math.isfinite(v)) for row in rows for v in row):
        raise ParseError(f"{path}: empty or non-finite cell")
    label = ""
    for c in comments:
        if c.startswith("label:"):
            label = c[len("label:") :].strip()
            break
    arr = np.array(rows, dtype=float).reshape(-1, len(header))
    sigma = arr[:, 2] if len(header) == 3 else None
    try:
        return SusceptibilityCurve(arr[:, 0], arr[:, 1], sigma, label)
    except DomainError as exc:
        raise ParseError(f"{path}: {exc}") from None


def write_curve(path, curve: SusceptibilityCurve) -> None:
    header = [T_COLUMN, CHI_COLUMN]
    columns = [curve.t, curve.chi]
    if curve.sigma is not None:
        header.append(SIGMA_COLUMN)
        columns.append(curve.sigma)
    comments = [f"label: {curve.label}"] if curve.label else []
    write_table(path, header, zip(*columns), comments)
