"""CSV / JSON serialization of run records."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict

from .runner import FIELDS, RunRecord

_INT = ("seed", "trial", "m", "oracle_calls")
_FLOAT = ("grad_norm", "f_subopt", "wall_ms")


def _fmt(name, v):
    if name in _FLOAT:
        return format(float(v), ".17g")
    return str(v)


def records_to_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(FIELDS)
    for r in records:
        w.writerow([_fmt(k, getattr(r, k)) for k in FIELDS])
    return buf.getvalue()


def parse_csv(text: str) -> list[RunRecord]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != FIELDS:
        raise ValueError(f"CSV header must be {','.join(FIELDS)}")
    out = []
    for row in rows[1:]:
        d = dict(zip(FIELDS, row))
        for k in _INT:
            d[k] = int(d[k])
        for k in _FLOAT:
            d[k] = float(d[k])
        out.append(RunRecord(**d))
    return out


def write_csv(records, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(records_to_csv(records))


def read_csv(path) -> list[RunRecord]:
    with open(path, newline="") as fh:
        return parse_csv(fh.read())


def _json_float(v):
    return None if isinstance(v, float) and not math.isfinite(v) else v


def sweep_to_json(result, fit=None) -> str:
    doc = {
        "records": [{k: _json_float(getattr(r, k)) for k in FIELDS} for r in result.records],
        "aggregate": [asdict(a) for a in result.aggregate],
        "failures": [{"m": m, "trial": t, "error": e} for m, t, e in result.failures],
    }
    if fit is not None:
        doc["fit"] = asdict(fit)
    return json.dumps(doc, indent=2)
