"""Artifact writers: manifest, time-series CSV, sweep summary CSV.

Floats are written with ``repr`` (shortest round-trip decimal), which is what
makes the byte-identical reproducibility contract testable.
"""

from __future__ import annotations

import os

from .diagnostics import CSV_COLUMNS

__all__ = [
    "fmt",
    "write_series_csv",
    "write_summary_csv",
    "write_relax_csv",
    "write_manifest",
    "read_csv_columns",
]


def fmt(x) -> str:
    return repr(float(x))


def write_series_csv(path, samples) -> None:
    lines = [",".join(CSV_COLUMNS)]
    for row in samples:
        lines.append(",".join(fmt(v) for v in row.as_tuple()))
    _write_text(path, "\n".join(lines) + "\n")


SUMMARY_COLUMNS = ("A", "outcome", "t_star_or_horizon", "terminal_l2_dist", "max_l2_dist")


def write_summary_csv(path, rows) -> None:
    """rows: iterable of (A, outcome_status, t_value, terminal_l2, max_l2)."""
    lines = [",".join(SUMMARY_COLUMNS)]
    for A, status, t_value, terminal_l2, max_l2 in rows:
        lines.append(
            ",".join([fmt(A), status, fmt(t_value), fmt(terminal_l2), fmt(max_l2)])
        )
    _write_text(path, "\n".join(lines) + "\n")


RELAX_COLUMNS = ("A", "tau", "ratio", "l2_initial", "l2_final")


def write_relax_csv(path, rows) -> None:
    lines = [",".join(RELAX_COLUMNS)]
    for A, tau, ratio, l2_init, l2_final in rows:
        lines.append(",".join(fmt(v) for v in (A, tau, ratio, l2_init, l2_final)))
    _write_text(path, "\n".join(lines) + "\n")


def write_manifest(path, entries) -> None:
    """entries: iterable of (key, value); values are written as-is."""
    lines = [f"{key} = {value}" for key, value in entries]
    _write_text(path, "\n".join(lines) + "\n")


def _write_text(path, text: str) -> None:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def read_csv_columns(path) -> dict:
    """Read one of our CSVs back into {column: list[str]} (strings, not floats)."""
    with open(path) as fh:
        lines = [line for line in fh.read().splitlines() if line]
    header = lines[0].split(",")
    cols: dict = {name: [] for name in header}
    for line in lines[1:]:
        for name, cell in zip(header, line.split(",")):
            cols[name].append(cell)
    return cols
