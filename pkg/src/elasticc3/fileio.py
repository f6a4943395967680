"""
Reading and writing matrices, labels and plot-ready traces.

Two matrix formats are supported.

``coordinate``
    Matrix Market coordinate layout.  An optional ``%%MatrixMarket`` banner
    and ``%`` comment lines, then a size line ``n_rows n_cols n_entries``,
    then one ``row col [value]`` line per entry with 1-based indices.  Entries
    whose value is 0 are dropped, any other value becomes 1, and a missing
    value column (pattern matrices) means 1.

``dense``
    One row per line, cells separated by commas, tabs or runs of spaces.  A
    first line containing any non-numeric cell is taken as a header and
    skipped.  Every nonzero cell becomes 1.

Label files hold one id per line.  Integer ids are used as given; any other
tokens are numbered in order of first appearance.
"""
from __future__ import annotations

import math
import re
from pathlib import Path

import numpy as np

from .exceptions import CountTooLarge, DimensionHeaderMismatch, ParseError
from .prob_core import BinaryMatrix

__all__ = ["load_matrix", "save_matrix", "format_matrix", "detect_format", "load_labels",
           "save_labels", "format_labels", "save_trace", "format_trace", "load_trace",
           "select_top_variance", "FORMATS"]

FORMATS = ("coordinate", "dense")
_COORD_SUFFIXES = {".mtx", ".mm", ".coo"}
_SPLIT = re.compile(r"[,\t ]+")


def detect_format(path) -> str:
    path = Path(path)
    if path.suffix.lower() in _COORD_SUFFIXES:
        return "coordinate"
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                return "coordinate" if line.startswith("%%MatrixMarket") else "dense"
    return "dense"


def load_matrix(path, format: str | None = None) -> BinaryMatrix:
    """Read a binary matrix; see the module docstring for the formats.

    Raises
    ------
    ParseError
        On malformed content, naming the 1-based line number.
    DimensionHeaderMismatch
        When a coordinate file's entry count disagrees with its size line.
    """
    fmt = format or detect_format(path)
    if fmt == "coordinate":
        return _load_coordinate(path)
    if fmt == "dense":
        return _load_dense(path)
    raise ValueError(f"unknown matrix format {fmt!r}; expected one of {FORMATS}")


def _number(tok, path, lineno):
    try:
        return float(tok)
    except ValueError:
        raise ParseError(f"not a number: {tok!r}", path, lineno) from None


def _index(tok, bound, path, lineno, what):
    try:
        v = int(tok)
    except ValueError:
        raise ParseError(f"{what} index {tok!r} is not an integer", path, lineno) from None
    if not 1 <= v <= bound:
        raise ParseError(f"{what} index {v} outside 1..{bound}", path, lineno)
    return v - 1


def _load_coordinate(path):
    header = None
    rows, cols = [], []
    n_triples = 0
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            s = line.strip()
            if not s or s.startswith("%") or s.startswith("#"):
                if s.startswith("%%MatrixMarket") and "array" in s.lower():
                    raise ParseError("dense Matrix Market arrays are not supported", path, lineno)
                continue
            toks = s.split()
            if header is None:
                if len(toks) != 3:
                    raise ParseError("expected size line 'n_rows n_cols n_entries'", path, lineno)
                try:
                    header = tuple(int(t) for t in toks)
                except ValueError:
                    raise ParseError("size line must hold three integers", path, lineno) from None
                if min(header) < 0:
                    raise ParseError("negative size", path, lineno)
                continue
            if len(toks) not in (2, 3):
                raise ParseError("expected 'row col [value]'", path, lineno)
            r = _index(toks[0], header[0], path, lineno, "row")
            c = _index(toks[1], header[1], path, lineno, "column")
            value = _number(toks[2], path, lineno) if len(toks) == 3 else 1.0
            if math.isnan(value):
                raise ParseError("NaN value", path, lineno)
            n_triples += 1
            if value != 0:
                rows.append(r)
                cols.append(c)
    if header is None:
        raise ParseError("missing size line", path)
    if n_triples != header[2]:
        raise DimensionHeaderMismatch(
            f"size line declares {header[2]} entries but {n_triples} were found", path)
    return BinaryMatrix(rows, cols, header[:2])


def _load_dense(path):
    rows, cols = [], []
    width = None
    n_rows = 0
    first = True
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            s = line.strip()
            if not s:
                continue
            toks = [t for t in _SPLIT.split(s) if t != ""]
            if first:
                first = False
                try:
                    [float(t) for t in toks]
                except ValueError:
                    width = len(toks)
                    continue
            if width is None:
                width = len(toks)
            elif len(toks) != width:
                raise ParseError(f"expected {width} cells, found {len(toks)}", path, lineno)
            vals = np.array([_number(t, path, lineno) for t in toks])
            if np.isnan(vals).any():
                raise ParseError("NaN value", path, lineno)
            nz = np.flatnonzero(vals)
            rows.extend([n_rows] * nz.size)
            cols.extend(nz.tolist())
            n_rows += 1
    return BinaryMatrix(rows, cols, (n_rows, width or 0))


def format_matrix(m: BinaryMatrix, comments=()) -> str:
    """Coordinate-format text for ``m`` with an explicit value 1 on every entry."""
    lines = ["%%MatrixMarket matrix coordinate integer general"]
    lines += [f"% {c}" for c in comments]
    lines.append(f"{m.n_rows} {m.n_cols} {m.nnz}")
    lines += [f"{r + 1} {c + 1} 1" for r, c in m.entries]
    return "\n".join(lines) + "\n"


def save_matrix(m: BinaryMatrix, path, comments=()):
    Path(path).write_text(format_matrix(m, comments), encoding="utf-8")


def load_labels(path) -> np.ndarray:
    tokens = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            s = line.strip()
            if s:
                tokens.append(s)
    if not tokens:
        raise ParseError("label file is empty", path)
    try:
        ints = np.array([int(t) for t in tokens], dtype=np.int64)
        if ints.min() >= 0:
            return ints
    except ValueError:
        pass
    ids = {}
    return np.array([ids.setdefault(t, len(ids)) for t in tokens], dtype=np.int64)


def format_labels(labels) -> str:
    return "".join(f"{int(v)}\n" for v in labels)


def save_labels(labels, path):
    Path(path).write_text(format_labels(labels), encoding="utf-8")


def _fmt(x):
    x = float(x)
    return "inf" if math.isinf(x) else repr(x)


def format_trace(trace) -> str:
    """Two tab-separated columns, ``iteration`` and ``objective``, with a header."""
    return "iteration\tobjective\n" + "".join(f"{i}\t{_fmt(v)}\n" for i, v in enumerate(trace))


def save_trace(trace, path):
    Path(path).write_text(format_trace(trace), encoding="utf-8")


def load_trace(path) -> np.ndarray:
    lines = Path(path).read_text(encoding="utf-8").splitlines()[1:]
    return np.array([float(line.split("\t")[1]) for line in lines if line])


def select_top_variance(m: BinaryMatrix, count: int):
    """Keep the ``count`` columns with the largest Bernoulli variance ``p(1 - p)``.

    ``p`` is the column's fraction of ones.  Ties go to the lower column index.

    Returns
    -------
    reduced : BinaryMatrix
    kept : ndarray
        Original indices of the kept columns, ascending.
    """
    if count > m.n_cols:
        raise CountTooLarge(f"cannot keep {count} of {m.n_cols} columns")
    if count < 0:
        raise ValueError("count must be nonnegative")
    ones = m.col_counts().astype(np.int64)
    # n^2 * p(1-p), exact in integers
    score = ones * (m.n_rows - ones)
    order = np.lexsort((np.arange(m.n_cols), -score))
    kept = np.sort(order[:count])
    return m.select_columns(kept), kept
