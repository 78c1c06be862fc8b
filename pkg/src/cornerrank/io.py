"""
Reading and writing the ``cmtx v1`` matrix text format and JSON reports.

A cmtx file looks like::

    cmtx 2 2
    1 0
    0.5 -0.25
    ...

The header gives rows and columns; then one ``<re> <im>`` line per entry in
row-major order, printed with 17 significant digits so that a write/read
round trip reproduces every double exactly.
"""

import json
import math
import os
import tempfile

import numpy as np

from .errors import FormatError

__all__ = ["format_cmtx", "parse_cmtx", "write_cmtx", "read_cmtx",
           "dumps_report", "write_text_atomic"]


def format_cmtx(A):
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim != 2:
        raise FormatError(f"cmtx holds 2-d matrices, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise FormatError("cannot serialize non-finite entries")
    lines = [f"cmtx {A.shape[0]} {A.shape[1]}"]
    lines.extend(f"{z.real:.17g} {z.imag:.17g}" for z in A.ravel())
    return "\n".join(lines) + "\n"


def parse_cmtx(text):
    lines = [ln.strip() for ln in text.splitlines()]
    while lines and not lines[-1]:
        lines.pop()
    if not lines:
        raise FormatError("empty cmtx input")
    header = lines[0].split()
    if len(header) != 3 or header[0] != "cmtx":
        raise FormatError(f"bad cmtx header: {lines[0]!r}")
    try:
        rows, cols = int(header[1]), int(header[2])
    except ValueError:
        raise FormatError(f"bad cmtx dimensions: {lines[0]!r}") from None
    if rows < 0 or cols < 0:
        raise FormatError("negative cmtx dimensions")
    body = lines[1:]
    if len(body) != rows * cols:
        raise FormatError(f"expected {rows * cols} entries, found {len(body)}")
    out = np.empty(rows * cols, dtype=np.complex128)
    for i, ln in enumerate(body):
        parts = ln.split()
        if len(parts) != 2:
            raise FormatError(f"entry line {i + 2} must hold two numbers: {ln!r}")
        try:
            re, im = float(parts[0]), float(parts[1])
        except ValueError:
            raise FormatError(f"unparseable entry on line {i + 2}: {ln!r}") from None
        if not (math.isfinite(re) and math.isfinite(im)):
            raise FormatError(f"non-finite entry on line {i + 2}")
        out[i] = complex(re, im)
    return out.reshape(rows, cols)


def write_text_atomic(path, text):
    """Write via a temporary file in the same directory, then rename."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_cmtx(path, A):
    write_text_atomic(path, format_cmtx(A))


def read_cmtx(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    return parse_cmtx(text)


def _default(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return _float(float(obj))
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def _float(x):
    if math.isnan(x):
        return None
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def _sanitize(obj):
    if isinstance(obj, float):
        return _float(obj)
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    return obj


def dumps_report(report):
    """Serialize a report dict deterministically (sorted keys, inf as a string)."""
    return json.dumps(_sanitize(json.loads(json.dumps(report, default=_default, allow_nan=True))),
                      sort_keys=True, indent=2) + "\n"
