"""Report assembly and deterministic serialization.

Reports are JSON objects with a stable field order: config echo, config
hash, status, per-trial records, aggregate — and, when timing is requested,
a final top-level "timing" key.  Everything outside "timing" is a pure
function of the config, so two runs of the same config produce byte-equal
files when timing is omitted.  Floats are printed with 17 significant
digits, which round-trips IEEE doubles exactly.
"""

from __future__ import annotations

import csv
import math

from .config import ExperimentConfig


def format_float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    s = format(x, ".17g")
    # keep a marker so "1.0" stays distinguishable from the integer 1
    if "e" not in s and "." not in s and "n" not in s and "N" not in s:
        s += ".0"
    return s


def _dump(obj, out: list) -> None:
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(format_float(obj))
    elif isinstance(obj, str):
        out.append('"')
        for ch in obj:
            if ch == '"':
                out.append('\\"')
            elif ch == "\\":
                out.append("\\\\")
            elif ord(ch) < 0x20:
                out.append(f"\\u{ord(ch):04x}")
            else:
                out.append(ch)
        out.append('"')
    elif isinstance(obj, dict):
        out.append("{")
        first = True
        for k, v in obj.items():
            if not isinstance(k, str):
                raise TypeError(f"report keys must be strings, got {k!r}")
            if not first:
                out.append(",")
            first = False
            _dump(k, out)
            out.append(":")
            _dump(v, out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, v in enumerate(obj):
            if i:
                out.append(",")
            _dump(v, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__} in a report")


def dump_json(obj) -> str:
    """Compact deterministic JSON in insertion order, 17-digit floats,
    trailing newline."""
    out: list = []
    _dump(obj, out)
    out.append("\n")
    return "".join(out)


def build_report(config: ExperimentConfig, records: list, aggregate: dict,
                 *, status: str = "complete",
                 timing: dict | None = None) -> dict:
    report = {
        "config": config.to_dict(),
        "config_sha256": config.sha256(),
        "status": status,
        "records": records,
        "aggregate": aggregate,
    }
    if timing is not None:
        report["timing"] = timing
    return report


def write_report(report: dict, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dump_json(report))


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if v is True:
        return "true"
    if v is False:
        return "false"
    if isinstance(v, float):
        return format_float(v)
    if isinstance(v, (list, tuple, dict)):
        return dump_json(v).rstrip("\n")
    return str(v)


def records_to_csv(records: list, path) -> None:
    """Flat table of the records: columns are the union of record keys in
    first-seen order, missing values empty."""
    columns: list = []
    seen = set()
    for rec in records:
        for k in rec:
            if k not in seen:
                seen.add(k)
                columns.append(k)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for rec in records:
            writer.writerow([_csv_cell(rec.get(c)) for c in columns])
