"""CSV and JSON serialisation with fixed formatting."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path

from .formatting import fmt, rounded

CURVE_COLUMNS = ("c_minus", "c_plus", "p", "r_minus", "branch_id")
SWEEP_COLUMNS = ("param", "sigma", "rho_or_rs", "h_s_or_lambda_s", "converged")


@dataclass(frozen=True)
class SweepRow:
    param: float
    sigma: float
    rho_or_rs: float
    h_s_or_lambda_s: float
    converged: bool


def _cell(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    return fmt(x)


def _csv_text(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_cell(x) for x in row])
    return buf.getvalue()


def curve_csv(points) -> str:
    """``points`` are :class:`~conefold.spiral.CurvePoint` objects."""
    return _csv_text(CURVE_COLUMNS, [(c.c_minus, c.c_plus, c.p, c.r_minus, int(c.branch_id)) for c in points])


def read_curve_csv(text: str) -> list[dict]:
    rows = list(csv.DictReader(io.StringIO(text)))
    if rows and tuple(rows[0].keys()) != CURVE_COLUMNS:
        raise ValueError("unexpected curve CSV header")
    return [{k: (int(v) if k == "branch_id" else float(v)) for k, v in r.items()} for r in rows]


def sweep_csv(rows) -> str:
    return _csv_text(SWEEP_COLUMNS, [(r.param, r.sigma, r.rho_or_rs, r.h_s_or_lambda_s, bool(r.converged)) for r in rows])


def read_sweep_csv(text: str) -> list[SweepRow]:
    rows = list(csv.DictReader(io.StringIO(text)))
    if rows and tuple(rows[0].keys()) != SWEEP_COLUMNS:
        raise ValueError("unexpected sweep CSV header")
    return [
        SweepRow(float(r["param"]), float(r["sigma"]), float(r["rho_or_rs"]), float(r["h_s_or_lambda_s"]), r["converged"] == "true")
        for r in rows
    ]


def json_text(obj) -> str:
    return json.dumps(rounded(obj), indent=2, sort_keys=True) + "\n"


def read_json(text: str):
    """Inverse of :func:`json_text`; non-finite numbers come back as floats."""
    def fix(x):
        if isinstance(x, dict):
            return {k: fix(v) for k, v in x.items()}
        if isinstance(x, list):
            return [fix(v) for v in x]
        if x in ("nan", "inf", "-inf"):
            return float(x)
        return x

    return fix(json.loads(text))


def write_text(path, text: str) -> None:
    Path(path).write_text(text)
