"""JSON and CSV serialization of metric reports."""

from __future__ import annotations

import csv
import io
import json
import math

from .metrics import COLUMNS, MetricsReport

CSV_HEADER = ["method", "IQI", "FF", "FS", "FI", "MIM", "RMSE", "PSNR", "Entropy"]


def _num(v):
    if v is None:
        return None
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return float(v)


def report_dict(report: MetricsReport, method: str | None = None, paths: dict | None = None, extra: dict | None = None) -> dict:
    out = {"method": method, "inputs": dict(paths or {})}
    for name in COLUMNS + ("i_af", "i_bf"):
        out[name] = _num(getattr(report, name))
    out["surrogate_reference"] = report.surrogate_reference
    out["degenerate"] = dict(report.degenerate)
    if extra:
        out.update(extra)
    return out


def to_json(entries: list[dict] | dict) -> str:
    return json.dumps(entries, indent=2, sort_keys=False) + "\n"


def to_csv(entries: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for e in entries:
        row = [e.get("method") or ""]
        for name in COLUMNS:
            v = e[name]
            row.append("" if v is None else (v if isinstance(v, str) else repr(v)))
        writer.writerow(row)
    return buf.getvalue()


def render(entries: list[dict], fmt: str) -> str:
    if fmt == "csv":
        return to_csv(entries)
    if fmt == "json":
        return to_json(entries[0] if len(entries) == 1 else entries)
    raise ValueError(f"unknown report format {fmt!r}")
