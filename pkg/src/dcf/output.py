"""Deterministic CSV/JSON writers for sweep tables.

CSV: ``# key: <json value>`` metadata lines, one header row, then rows.
Floats are written with ``repr`` (shortest round-trip form).
JSON: one object ``{"meta": {...}, "columns": [{"name": ..., "values": [...]}]}``.
"""
from __future__ import annotations

import csv
import io
import json
import math
from typing import Mapping, Sequence

FORMAT_VERSION = "1"
UNITS = "natural units: hbar = v_F = c = e = 1, l_B^2 = 1/B, omega_B = 2B"


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else ("nan" if math.isnan(v) else ("inf" if v > 0 else "-inf"))
    return str(v)


def _plain(v):
    """numpy scalars and tuples to plain JSON-able values."""
    if hasattr(v, "item") and not isinstance(v, (list, tuple, dict)):
        return v.item()
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    return v


def base_meta(command: str, config: Mapping, truncation_order=None, B: float | None = None) -> dict:
    meta = {"format_version": FORMAT_VERSION, "units": UNITS, "command": command}
    if B is not None:
        meta["omega_B"] = 2.0 * B
    meta["truncation_order"] = truncation_order
    meta["config"] = dict(config)
    return meta


def render_csv(meta: Mapping, columns: Mapping[str, Sequence]) -> str:
    buf = io.StringIO()
    for key, value in meta.items():
        buf.write(f"# {key}: {json.dumps(_plain(value), sort_keys=True)}\n")
    names = list(columns)
    n = len(next(iter(columns.values()))) if names else 0
    if any(len(columns[c]) != n for c in names):
        raise ValueError("columns differ in length")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(names)
    cols = [[_cell(_plain(v)) for v in columns[c]] for c in names]
    writer.writerows(zip(*cols))
    return buf.getvalue()


def render_json(meta: Mapping, columns: Mapping[str, Sequence]) -> str:
    doc = {
        "meta": _plain(dict(meta)),
        "columns": [{"name": name, "values": _plain(list(vals))} for name, vals in columns.items()],
    }
    return json.dumps(doc, indent=1, allow_nan=True) + "\n"


def render(meta: Mapping, columns: Mapping[str, Sequence], fmt: str = "csv") -> str:
    if fmt == "csv":
        return render_csv(meta, columns)
    if fmt == "json":
        return render_json(meta, columns)
    raise ValueError(f"unknown format {fmt!r}")


def write(path: str, text: str) -> None:
    """Write ``text`` to ``path``; ``-`` means stdout."""
    if path == "-":
        import sys

        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
