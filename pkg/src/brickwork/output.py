"""Self-describing CSV / JSON output and the flat ``key = value`` config format.

CSV files start with one ``#``-prefixed JSON line of metadata, then an
ordinary header row.  Every float is written with ``repr`` so equal inputs
give byte-identical files.
"""
from __future__ import annotations

import csv
import io
import json
import math
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Optional

import numpy as np

from .errors import InvalidArgument


def jsonable(x: Any) -> Any:
    """Convert numpy scalars, fractions and non-finite floats into strict-JSON values."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [jsonable(v) for v in x.tolist()]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    return x


def dumps(obj: Any) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, allow_nan=False)


def _flatten(d: dict, prefix: str = "") -> Iterable[tuple[str, Any]]:
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            yield from _flatten(v, key + ".")
        else:
            yield key, v


def _cell(v: Any) -> str:
    v = jsonable(v)
    if isinstance(v, (list, dict)):
        return json.dumps(v, sort_keys=True)
    if v is None:
        return ""
    return repr(v) if isinstance(v, float) else str(v)


def render_table(rows: list[dict], meta: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps({"meta": jsonable(meta), "rows": jsonable(rows)}, sort_keys=True, indent=1) + "\n"
    if fmt != "csv":
        raise InvalidArgument(f"unknown format {fmt!r}")
    buf = io.StringIO()
    buf.write("# " + dumps(meta) + "\n")
    columns = list(rows[0]) if rows else []
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_cell(row.get(c)) for c in columns])
    return buf.getvalue()


def render_summary(summary: dict, meta: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps({"meta": jsonable(meta), "summary": jsonable(summary)}, sort_keys=True, indent=1) + "\n"
    rows = [{"key": k, "value": v} for k, v in _flatten(summary)]
    return render_table(rows, meta, fmt)


def emit(text: str, out: Optional[str]) -> None:
    if out in (None, "", "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def read_table(text: str) -> tuple[dict, list[dict]]:
    """Parse a CSV produced by :func:`render_table` back into ``(meta, rows)``."""
    first, _, body = text.partition("\n")
    if not first.startswith("# "):
        raise InvalidArgument("missing metadata line")
    rows = list(csv.DictReader(io.StringIO(body)))
    return json.loads(first[2:]), rows


# -- flat config files ---------------------------------------------------------

def parse_config(text: str) -> dict[str, str]:
    """``key = value`` lines; ``#`` starts a comment, blank lines are ignored."""
    out: dict[str, str] = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidArgument(f"config line {n}: expected key = value")
        k, v = (s.strip() for s in line.split("=", 1))
        if not k:
            raise InvalidArgument(f"config line {n}: empty key")
        out[k.replace("-", "_")] = v
    return out


def format_config(values: dict) -> str:
    lines = []
    for k in sorted(values):
        v = values[k]
        if v is None:
            continue
        if isinstance(v, bool):
            v = "true" if v else "false"
        lines.append(f"{k} = {v}")
    return "\n".join(lines) + "\n"
