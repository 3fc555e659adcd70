"""CSV, report and config serialisation.

Floats are written with 17 significant digits so every value reads back
bit-identically.
"""

from __future__ import annotations

import csv
import io
import math
import sys
from pathlib import Path
from typing import Iterable, Sequence

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

from .errors import ConfigError

__all__ = [
    "fmt",
    "write_csv",
    "read_csv",
    "trajectory_rows",
    "em_grid_rows",
    "curve_rows",
    "branch_rows",
    "report_lines",
    "delta_sample_rows",
    "load_config",
    "TRAJECTORY_COLUMNS",
    "EM_GRID_COLUMNS",
    "CURVE_COLUMNS",
    "BRANCH_COLUMNS",
    "CHI_SCAN_COLUMNS",
    "SAMPLE_COLUMNS",
]

TRAJECTORY_COLUMNS = ("t", "theta", "p_theta", "phi")
EM_GRID_COLUMNS = ("h", "j", "status", "r")
CURVE_COLUMNS = ("curve_id", "kind", "j", "h", "x")
BRANCH_COLUMNS = ("index", "alpha_minus", "alpha_plus", "open_left", "open_right")
CHI_SCAN_COLUMNS = ("j", "chi")
SAMPLE_COLUMNS = ("point", "side", "j", "two_chi")


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def write_csv(stream, columns: Sequence[str], rows: Iterable[Sequence]) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(v) for v in row])


def _parse(cell: str):
    if cell == "":
        return None
    if cell in ("true", "false"):
        return cell == "true"
    try:
        n = int(cell)
        if str(n) == cell:  # keeps "-0" a float
            return n
    except ValueError:
        pass
    try:
        return float(cell)
    except ValueError:
        return cell


def read_csv(source) -> tuple[list[str], list[list]]:
    """Read a CSV written by :func:`write_csv`; accepts a path or text stream."""
    if isinstance(source, (str, Path)):
        with open(source, newline="") as fh:
            return read_csv(fh)
    reader = csv.reader(source)
    header = next(reader)
    return header, [[_parse(c) for c in row] for row in reader]


def trajectory_rows(record):
    for t, (theta, p, phi, _) in zip(record.times, record.states):
        yield float(t), float(theta), float(p), float(phi)


def em_grid_rows(grid):
    for h, j, cell in grid.rows():
        yield h, j, cell.status.value, cell.r


def curve_rows(curves):
    for cv in curves:
        for j, h, x in cv.samples:
            yield cv.curve_id, cv.kind, float(j), float(h), float(x)


def branch_rows(brs):
    for br in brs:
        yield br.index, float(br.alpha_minus), float(br.alpha_plus), br.open_left, br.open_right


def _delta_lines(name, d):
    return [
        (f"{name}.value_real", d.value_real),
        (f"{name}.value_int", d.value_int),
        (f"{name}.residual", d.residual),
        (f"{name}.side", "+" if d.side > 0 else "-"),
        (f"{name}.seed_theta", d.seed_theta),
        (f"{name}.uncertainty", d.estimate.uncertainty),
        (f"{name}.samples_used", d.estimate.samples_used),
    ]


def report_lines(report, potential_label: str) -> list[str]:
    """``key: value`` lines for a :class:`MonodromyReport`."""
    c = report.circuit
    items = [
        ("potential", potential_label),
        ("circuit.a", float(c.a)),
        ("circuit.b", float(c.b)),
        ("circuit.j_amplitude", float(c.j_amplitude)),
        ("index", report.index),
        ("has_monodromy", report.has_monodromy),
    ]
    items += _delta_lines("delta_a", report.delta_a)
    items += _delta_lines("delta_b", report.delta_b)
    for name in ("delta_a_minus", "delta_b_minus"):
        d = getattr(report, name)
        if d is not None:
            items += _delta_lines(name, d)
    for name in ("transfer_a", "transfer_b"):
        m = getattr(report, name)
        if m is not None:
            items += [(f"{name}.{k}", getattr(m, k)) for k in ("m11", "m12", "m21", "m22")]
    return [f"{k}: {fmt(v)}" for k, v in items]


def delta_sample_rows(report):
    for point, name in (("a", "delta_a"), ("b", "delta_b"), ("a", "delta_a_minus"), ("b", "delta_b_minus")):
        d = getattr(report, name)
        if d is None:
            continue
        side = "+" if d.side > 0 else "-"
        for j, v in d.samples:
            yield point, side, float(j), float(v)


def load_config(path) -> dict:
    """Flat ``key = value`` file (TOML syntax); dashes in keys become underscores."""
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc
    out = {}
    for k, v in data.items():
        if isinstance(v, dict):
            raise ConfigError(f"config must be flat; got table [{k}]")
        if isinstance(v, float) and not math.isfinite(v):
            raise ConfigError(f"non-finite value for {k}")
        out[k.replace("-", "_")] = v
    return out


def to_text(columns, rows) -> str:
    buf = io.StringIO()
    write_csv(buf, columns, rows)
    return buf.getvalue()
