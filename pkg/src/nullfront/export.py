"""Text exports: OBJ meshes of curve fronts, locus CSV, JSON reports.

All floats are written with 17 significant digits and LF line endings, so
identical inputs give byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile

import numpy as np

from .frontgen import NullFront
from .singular import SingularLocus

__all__ = ["SCHEMA_VERSION", "export_locus", "export_mesh", "jsonable", "mesh_text", "write_report"]

SCHEMA_VERSION = 1


def _fmt(x: float) -> str:
    return "%.17g" % x


def _atomic_write(path, text: str):
    """Write via a temporary file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def mesh_text(front: NullFront, raw_axes: bool = False) -> str:
    """OBJ text for the (t, s) lattice of a curve front.

    Vertices are (x, y, t) with the time coordinate as height, or the raw
    Minkowski ordering (t, x, y) when ``raw_axes`` is set.  Faces are quads
    over the lattice, wrapping in s for closed generators.
    """
    gen = front.generator
    if not gen.is_curve:
        raise ValueError("mesh export needs a curve front (a surface in R^3_1)")
    P = front.samples()  # (nt, m, 3) ordered (t, x, y)
    nt, m = P.shape[:2]
    coords = P.reshape(-1, 3)
    if not raw_axes:
        coords = coords[:, [1, 2, 0]]
    lines = [f"# null front mesh: {nt} x {m} lattice, axes {'t x y' if raw_axes else 'x y t'}"]
    lines += ["v " + " ".join(_fmt(c) for c in row) for row in coords]
    cols = m if gen.closed else m - 1
    for k in range(nt - 1):
        for j in range(cols):
            j2 = (j + 1) % m
            a, b = k * m + j + 1, k * m + j2 + 1
            c, d = (k + 1) * m + j2 + 1, (k + 1) * m + j + 1
            lines.append(f"f {a} {b} {c} {d}")
    return "\n".join(lines) + "\n"


def export_mesh(front: NullFront, path, raw_axes: bool = False):
    _atomic_write(path, mesh_text(front, raw_axes))


def export_locus(locus: SingularLocus, path):
    """CSV columns: parameter(s), branch, t, image coordinates, class, annotation."""
    params = locus.params if locus.params.ndim == 2 else locus.params[:, None]
    pnames = ["s"] if params.shape[1] == 1 else [f"u{i}" for i in range(params.shape[1])]
    dim = locus.image.shape[1]
    header = pnames + ["branch", "t"] + ["tau"] + [f"x{i}" for i in range(1, dim)] + ["class", "annotation"]
    rows = []
    for i in range(len(locus)):
        row = [_fmt(v) for v in params[i]]
        row += [str(int(locus.branch[i])), _fmt(locus.t[i])]
        row += [_fmt(v) for v in locus.image[i]]
        row += [str(locus.labels[i]), str(locus.annotations[i])]
        rows.append(row)

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    _atomic_write(path, buf.getvalue())


def jsonable(obj):
    """Convert numpy values and non-finite floats into strict JSON values."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isnan(x):
            return None
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return obj


def write_report(report: dict, path):
    report = dict(report)
    report.setdefault("schema_version", SCHEMA_VERSION)
    text = json.dumps(jsonable(report), sort_keys=True, indent=2, allow_nan=False) + "\n"
    _atomic_write(path, text)
