"""CSV and summary writers. Floats are written with repr() so every row
round-trips exactly and bound recomputation from a row is bit-faithful."""
import csv
import io
import math
import os
from datetime import datetime, timezone

import numpy as np

from .experiments import COLUMNS, EXTRA_COLUMNS


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def columns_for(rows):
    lead = [k for k in ("sweep_parameter", "sweep_value") if rows and k in rows[0]]
    return lead + COLUMNS + EXTRA_COLUMNS


def rows_to_csv(rows, timestamp=True):
    buf = io.StringIO()
    if timestamp:
        buf.write(f"# generated {datetime.now(timezone.utc).isoformat()}\n")
    cols = columns_for(rows)
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for row in rows:
        w.writerow([_fmt(row.get(c, "")) for c in cols])
    return buf.getvalue()


def write_csv(path, rows, timestamp=True):
    with open(path, "w", newline="") as fh:
        fh.write(rows_to_csv(rows, timestamp))


def read_csv(path):
    """Parse a report back into dicts of strings (comment lines skipped)."""
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def summarize(rows):
    n = len(rows)
    ratios = [r["ratio"] for r in rows if isinstance(r["ratio"], float)
              and not math.isnan(r["ratio"])]
    deltas = [r["delta"] for r in rows if isinstance(r["delta"], float)]

    def rate(key):
        vals = [r[key] for r in rows if isinstance(r[key], (bool, np.bool_))]
        return (sum(bool(v) for v in vals) / len(vals)) if vals else float("nan")

    return {
        "trials": n,
        "passed": sum(1 for r in rows if r["passed"] is True),
        "pass_rate": rate("passed"),
        "remainder_pass_rate": rate("remainder_passed"),
        "first_order_pass_rate": rate("first_order_passed"),
        "max_ratio": max(ratios) if ratios else float("nan"),
        "max_delta": max(deltas) if deltas else float("nan"),
        "numerical_failures": sum(1 for r in rows if r["status"] != "ok"),
    }


def summary_text(rows, title, timestamp=True):
    s = summarize(rows)
    lines = []
    if timestamp:
        lines.append(f"# generated {datetime.now(timezone.utc).isoformat()}")
    lines.append(f"experiment: {title}")
    for key, val in s.items():
        lines.append(f"{key}: {_fmt(val)}")
    return "\n".join(lines) + "\n"


def write_outputs(out_dir, rows, title, timestamp=True):
    os.makedirs(out_dir, exist_ok=True)
    write_csv(os.path.join(out_dir, "report.csv"), rows, timestamp)
    with open(os.path.join(out_dir, "summary.txt"), "w") as fh:
        fh.write(summary_text(rows, title, timestamp))
    return summarize(rows)


def all_checks_passed(rows):
    for r in rows:
        if r["passed"] is not True:
            return False
        for key in ("remainder_passed", "first_order_passed"):
            if r[key] is False:
                return False
    return True
