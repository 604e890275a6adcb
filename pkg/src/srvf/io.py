"""Reading and writing curves, SRVFs, reparametrisations and reports.

CSV files carry a header row.  Curves use ``t,x1,...,xd`` with one knot per
row; SRVFs use ``t,q1,...,qd`` where row ``k`` holds the value on the cell
starting at ``t_k`` and the final row (``t = 1``) repeats the last value.
JSON files hold ``{"dim", "knots", "samples"}`` for curves and
``{"kind": "srvf", "dim", "knots", "values"}`` for SRVFs.  Numbers are
written with 17 significant digits so that a write/read cycle is lossless.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .curves import Reparametrisation, SampledCurve, Srvf

__all__ = [
    "ParseError",
    "fmt",
    "read_table",
    "read_curve",
    "read_srvf",
    "read_any",
    "read_reparam",
    "write_curve",
    "write_srvf",
    "write_reparam",
    "write_alignment",
    "write_rows",
    "read_corpus",
    "write_matrix",
]


class ParseError(ValueError):
    """Malformed input file; ``line`` is 1-based when known."""

    def __init__(self, msg, path=None, line=None):
        where = str(path) if path else "<input>"
        if line is not None:
            where += f", line {line}"
        super().__init__(f"{where}: {msg}")
        self.path = path
        self.line = line


def fmt(x):
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return format(float(x), ".17g")


def read_table(text, path=None, prefix=None):
    """Parse a header + numeric rows CSV, checking the ``t`` column.

    Returns ``(header, t, data)`` with ``data`` of shape ``(rows, cols - 1)``.
    """
    rows = [(i + 1, r) for i, r in enumerate(csv.reader(io.StringIO(text))) if any(c.strip() for c in r)]
    if not rows:
        raise ParseError("empty file", path, 1)
    line0, header = rows[0]
    header = [h.strip() for h in header]
    if len(header) < 2 or header[0] != "t":
        raise ParseError(f"header must start with 't' and have at least 2 columns, got {header}", path, line0)
    if prefix is not None:
        for k, h in enumerate(header[1:], start=1):
            if h != f"{prefix}{k}":
                raise ParseError(f"expected column '{prefix}{k}', got '{h}'", path, line0)
    if len(rows) < 3:
        raise ParseError("need at least two data rows", path, rows[-1][0])
    t, data = [], []
    for line, r in rows[1:]:
        if len(r) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(r)}", path, line)
        try:
            vals = [float(v) for v in r]
        except ValueError:
            raise ParseError(f"non-numeric field in {r}", path, line) from None
        if not all(math.isfinite(v) for v in vals):
            raise ParseError("non-finite value", path, line)
        if t and vals[0] <= t[-1]:
            raise ParseError(f"t must be strictly increasing ({vals[0]!r} after {t[-1]!r})", path, line)
        t.append(vals[0])
        data.append(vals[1:])
    if t[0] != 0.0:
        raise ParseError(f"t must start at 0, got {t[0]!r}", path, rows[1][0])
    if t[-1] != 1.0:
        raise ParseError(f"t must end at 1, got {t[-1]!r}", path, rows[-1][0])
    return header, np.array(t), np.array(data)


def _load_json(text, path):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e.msg}", path, e.lineno) from None


def _json_arrays(obj, key, path):
    try:
        knots = np.asarray(obj["knots"], dtype=float)
        arr = np.asarray(obj[key], dtype=float)
    except (KeyError, TypeError, ValueError) as e:
        raise ParseError(f"bad JSON object: {e}", path) from None
    if arr.ndim != 2:
        raise ParseError(f"'{key}' must be a list of points", path)
    dim = obj.get("dim", arr.shape[1])
    if dim != arr.shape[1]:
        raise ParseError(f"dim={dim} but points have {arr.shape[1]} coordinates", path)
    if not np.all(np.isfinite(arr)) or not np.all(np.isfinite(knots)):
        raise ParseError("non-finite value", path)
    return knots, arr


def _wrap(fn, path):
    try:
        return fn()
    except ParseError:
        raise
    except ValueError as e:
        raise ParseError(str(e), path) from None


def curve_from_json(obj, path=None):
    knots, samples = _json_arrays(obj, "samples", path)
    return _wrap(lambda: SampledCurve.anchored(samples, knots), path)


def srvf_from_json(obj, path=None):
    knots, values = _json_arrays(obj, "values", path)
    return _wrap(lambda: Srvf(values, knots), path)


def read_curve(path):
    """Load a curve; it is translated to start at the origin."""
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".json":
        return curve_from_json(_load_json(text, path), path)
    _, t, data = read_table(text, path, prefix="x")
    return _wrap(lambda: SampledCurve.anchored(data, t), path)


def read_srvf(path):
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".json":
        return srvf_from_json(_load_json(text, path), path)
    _, t, data = read_table(text, path, prefix="q")
    return _wrap(lambda: Srvf(data[:-1], t), path)


def read_any(path):
    """Load a curve or an SRVF, whichever the file holds."""
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".json":
        obj = _load_json(text, path)
        if isinstance(obj, dict) and obj.get("kind") == "srvf":
            return srvf_from_json(obj, path)
        return curve_from_json(obj, path)
    first = text.lstrip().split("\n", 1)[0]
    cols = [c.strip() for c in first.split(",")]
    if len(cols) > 1 and cols[1] == "q1":
        return read_srvf(path)
    return read_curve(path)


def read_reparam(path):
    path = Path(path)
    header, t, data = read_table(path.read_text(), path)
    if header != ["t", "gamma"]:
        raise ParseError(f"expected header t,gamma, got {header}", path, 1)
    return _wrap(lambda: Reparametrisation(data[:, 0], t), path)


def _write_csv(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(x) for x in r])


def _write_json(path, obj):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=1) + "\n")


def _floats(a):
    # repr of a python float is the shortest exact round-trip form
    return np.asarray(a, dtype=float).tolist()


def write_curve(path, c, format="csv"):
    if format == "json":
        _write_json(path, {"dim": c.dim, "knots": _floats(c.knots), "samples": _floats(c.samples)})
        return
    header = ["t"] + [f"x{k + 1}" for k in range(c.dim)]
    _write_csv(path, header, (np.concatenate([[t], x]) for t, x in zip(c.knots, c.samples)))


def write_srvf(path, q, format="csv"):
    if format == "json":
        _write_json(path, {"kind": "srvf", "dim": q.dim, "knots": _floats(q.knots), "values": _floats(q.values)})
        return
    header = ["t"] + [f"q{k + 1}" for k in range(q.dim)]
    vals = np.vstack([q.values, q.values[-1:]])
    _write_csv(path, header, (np.concatenate([[t], v]) for t, v in zip(q.knots, vals)))


def write_reparam(path, gamma):
    _write_csv(path, ["t", "gamma"], zip(gamma.knots, gamma.values))


def write_alignment(path, result, format="csv"):
    if format == "json":
        _write_json(path, result.to_json())
        return
    _write_csv(path, ["t", "beta", "gamma"], zip(result.beta.knots, result.beta.values, result.gamma.values))


def write_rows(path, header, rows):
    """Write dict rows (or sequences) as CSV with 17 digit numbers."""
    rows = [[r.get(h) for h in header] if isinstance(r, dict) else r for r in rows]
    _write_csv(path, header, rows)


def read_corpus(path, skip_bad=False):
    """Load a shape corpus: a JSON array of ``{id, file}`` or ``{id, samples[, knots]}``.

    Returns ``(ids, curves, errors)``; bad entries raise unless ``skip_bad``.
    """
    path = Path(path)
    data = _load_json(path.read_text(), path)
    if not isinstance(data, list):
        raise ParseError("corpus must be a JSON array", path)
    ids, curves, errors = [], [], []
    for k, entry in enumerate(data):
        try:
            if not isinstance(entry, dict) or "id" not in entry:
                raise ParseError(f"entry {k} needs an 'id'", path)
            if "file" in entry:
                ref = Path(entry["file"])
                if not ref.is_absolute():
                    ref = path.parent / ref
                c = read_curve(ref)
            elif "samples" in entry:
                samples = entry["samples"]
                knots = entry.get("knots")
                if knots is None:
                    knots = np.linspace(0.0, 1.0, len(samples))
                c = curve_from_json({"knots": knots, "samples": samples}, f"{path}[{k}]")
            else:
                raise ParseError(f"entry {k} needs 'file' or 'samples'", path)
        except (ParseError, OSError) as e:
            if not skip_bad:
                raise ParseError(f"shape {k}: {e}", path) from None
            errors.append(f"shape {k}: {e}")
            continue
        ids.append(str(entry["id"]))
        curves.append(c)
    return ids, curves, errors


def write_matrix(path, ids, matrix):
    _write_csv(path, ["id"] + list(ids), ([i] + list(row) for i, row in zip(ids, matrix)))
