"""Machine-readable reports.

Reports are JSON objects carrying ``"schema": 1`` and a ``"kind"``. Floats
are rounded to 9 decimals so golden files compare byte for byte, except the
edge weights of embedded graphs; infinite values are written as ``null``.
"""

import csv
import io
import json
import math
import typing as t

import numpy as np

from spanner_forge import __version__

SCHEMA_VERSION = 1
DECIMALS = 9
FORMATS = ("json", "csv", "dot")
GRAPH_KEYS = frozenset({"spanner"})


def rounded(
    value: t.Any,
    decimals: t.Optional[int] = DECIMALS,
    exact: t.Collection[str] = (),
) -> t.Any:
    """Copy of a JSON-like structure with every float rounded.

    Args:
        value: Structure to copy.
        decimals: Decimals to keep. ``None`` keeps full precision.
        exact: Mapping keys whose values keep full precision at any depth.
    """
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not math.isfinite(value):
            return None
        result = value if decimals is None else round(value, decimals)
        return 0.0 if result == 0 else result
    if isinstance(value, t.Mapping):
        return {
            str(key): rounded(item, None if key in exact else decimals, exact)
            for key, item in value.items()
        }
    if isinstance(value, (list, tuple, set, frozenset, np.ndarray)):
        items = sorted(value) if isinstance(value, (set, frozenset)) else value
        return [rounded(item, decimals, exact) for item in items]
    return value


def make_report(kind: str, payload: t.Mapping[str, t.Any]) -> t.Dict[str, t.Any]:
    """Versioned report envelope around ``payload``."""
    report = {"schema": SCHEMA_VERSION, "kind": kind, "version": __version__}
    report.update(payload)
    return report


def dumps_report(report: t.Mapping[str, t.Any]) -> str:
    """Stable JSON text of a report.

    Embedded graphs keep full-precision weights so they stay subgraphs of the
    graph files they were built from.
    """
    text = json.dumps(rounded(report, exact=GRAPH_KEYS), indent=2, sort_keys=True)
    return text + "\n"


def dumps_rows(rows: t.Sequence[t.Mapping[str, t.Any]]) -> str:
    """CSV text with one row per mapping; columns in first-seen order."""
    columns: t.List[str] = []
    for row in rows:
        columns.extend(key for key in row if key not in columns)
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(
            {
                key: json.dumps(value) if isinstance(value, (list, dict)) else value
                for key, value in rounded(row).items()
            }
        )
    return buffer.getvalue()


def report_rows(report: t.Mapping[str, t.Any]) -> t.List[t.Dict[str, t.Any]]:
    """Rows for CSV output.

    Per-pair stretch entries, per-level statistics or per-instance results
    are flattened when present; otherwise the scalar fields form one row.
    """
    for key in ("per_pair", "per_level", "instances"):
        nested = report.get(key)
        if nested is None and isinstance(report.get("stretch"), t.Mapping):
            nested = report["stretch"].get(key)
        if nested is None and isinstance(report.get("diagnostics"), t.Mapping):
            nested = report["diagnostics"].get(key)
        if nested:
            return [dict(row) for row in nested]
    return [
        {
            key: value
            for key, value in report.items()
            if not isinstance(value, (list, dict))
        }
    ]
