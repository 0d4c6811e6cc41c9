"""File formats: Matrix Market, CSV regression data, edge lists and JSON reports.

All readers reject NaN and infinite values with a line-numbered ParseError.
"""
import csv
import json
import math

import numpy as np

from .errors import DimensionMismatch, ParseError
from .graph import WeightedDigraph


def _number(token, lineno, what="value"):
    try:
        value = float(token)
    except ValueError:
        raise ParseError(lineno, f"{what} {token!r} is not a number") from None
    if not math.isfinite(value):
        raise ParseError(lineno, f"{what} {token!r} is not finite")
    return value


def _count(token, lineno, what):
    try:
        value = int(token)
    except ValueError:
        raise ParseError(lineno, f"{what} {token!r} is not an integer") from None
    if value < 0:
        raise ParseError(lineno, f"{what} must be nonnegative")
    return value


def read_matrix(path):
    """Read a real general Matrix Market file (coordinate or array layout)."""
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].lower().startswith("%%matrixmarket"):
        raise ParseError(1, "missing %%MatrixMarket header")
    header = lines[0].split()
    if len(header) != 5 or header[1].lower() != "matrix":
        raise ParseError(1, "malformed header")
    layout, field, symmetry = (h.lower() for h in header[2:])
    if layout not in ("coordinate", "array"):
        raise ParseError(1, f"unsupported layout {layout!r}")
    if field not in ("real", "integer", "double"):
        raise ParseError(1, f"unsupported field {field!r}")
    if symmetry != "general":
        raise ParseError(1, f"unsupported symmetry {symmetry!r}")

    body = [(i + 1, ln.split()) for i, ln in enumerate(lines[1:], start=1)
            if ln.strip() and not ln.lstrip().startswith("%")]
    if not body:
        raise ParseError(len(lines), "missing size line")
    lineno, size = body[0]
    entries = body[1:]
    if layout == "coordinate":
        if len(size) != 3:
            raise ParseError(lineno, "size line must be 'rows cols nnz'")
        n, d, nnz = (_count(t, lineno, "size") for t in size)
        if len(entries) != nnz:
            raise DimensionMismatch(f"expected {nnz} entries, found {len(entries)}")
        A = np.zeros((n, d))
        for lineno, tok in entries:
            if len(tok) != 3:
                raise ParseError(lineno, "entry must be 'row col value'")
            i, j = _count(tok[0], lineno, "row"), _count(tok[1], lineno, "col")
            if not (1 <= i <= n and 1 <= j <= d):
                raise ParseError(lineno, f"index ({i}, {j}) outside {n} x {d}")
            A[i - 1, j - 1] += _number(tok[2], lineno)
        return A
    if len(size) != 2:
        raise ParseError(lineno, "size line must be 'rows cols'")
    n, d = (_count(t, lineno, "size") for t in size)
    if len(entries) != n * d:
        raise DimensionMismatch(f"expected {n * d} entries, found {len(entries)}")
    vals = []
    for lineno, tok in entries:
        if len(tok) != 1:
            raise ParseError(lineno, "array entries hold one value per line")
        vals.append(_number(tok[0], lineno))
    return np.array(vals, dtype=np.float64).reshape((n, d), order="F")


def write_matrix(path, A):
    """Write `A` in Matrix Market array layout with round-trip exact values."""
    A = np.asarray(A, dtype=np.float64)
    if A.ndim == 1:
        A = A[:, None]
    with open(path, "w") as fh:
        fh.write("%%MatrixMarket matrix array real general\n")
        fh.write(f"{A.shape[0]} {A.shape[1]}\n")
        for v in A.ravel(order="F"):
            fh.write(f"{float(v)!r}\n")


def read_csv(path):
    """Read a CSV with a header row; the last column is the response.

    Returns ``(A, b, header)``.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(1, "empty file") from None
        if len(header) < 2:
            raise ParseError(1, "need at least one feature column and a response column")
        rows = []
        for row in reader:
            lineno = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise ParseError(lineno, f"expected {len(header)} fields, found {len(row)}")
            rows.append([_number(c.strip(), lineno, "cell") for c in row])
    if not rows:
        raise ParseError(2, "no data rows")
    data = np.array(rows, dtype=np.float64)
    return data[:, :-1], data[:, -1], header


def write_csv(path, A, b, header=None):
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if header is None:
        header = [f"x{j + 1}" for j in range(A.shape[1])] + ["b"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row, bi in zip(A, b):
            w.writerow([repr(float(v)) for v in row] + [repr(float(bi))])


def read_edgelist(path):
    """Edge list: '#' comments, then 'n m', then m lines 'u v w' with 1-based ids."""
    with open(path) as fh:
        lines = fh.read().splitlines()
    body = [(i + 1, ln.split()) for i, ln in enumerate(lines)
            if ln.strip() and not ln.lstrip().startswith("#")]
    if not body:
        raise ParseError(None, "no header line 'n m'")
    lineno, head = body[0]
    if len(head) != 2:
        raise ParseError(lineno, "first line must be 'n m'")
    n, m = _count(head[0], lineno, "n"), _count(head[1], lineno, "m")
    if len(body) - 1 != m:
        raise DimensionMismatch(f"header declares {m} edges, found {len(body) - 1}")
    edges = []
    for lineno, tok in body[1:]:
        if len(tok) != 3:
            raise ParseError(lineno, "edge line must be 'u v w'")
        u, v = _count(tok[0], lineno, "u"), _count(tok[1], lineno, "v")
        w = _number(tok[2], lineno, "weight")
        if not (1 <= u <= n and 1 <= v <= n):
            raise ParseError(lineno, f"vertex outside 1..{n}")
        if u == v:
            raise ParseError(lineno, "self-loop")
        if w <= 0:
            raise ParseError(lineno, "weight must be positive")
        edges.append((u - 1, v - 1, w))
    return WeightedDigraph(n, edges)


def format_edgelist(G, comment=None):
    """Edge-list text for `G` (1-based ids, round-trip exact weights)."""
    lines = [f"# {line}" for line in comment.splitlines()] if comment else []
    lines.append(f"{G.n} {G.edge_count}")
    lines += [f"{u + 1} {v + 1} {float(w)!r}" for u, v, w in G.edges()]
    return "\n".join(lines) + "\n"


def write_edgelist(path, G, comment=None):
    with open(path, "w") as fh:
        fh.write(format_edgelist(G, comment))


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_report(obj):
    return json.dumps(obj, indent=2, sort_keys=True, default=_jsonable) + "\n"


def write_report(path, obj):
    with open(path, "w") as fh:
        fh.write(dumps_report(obj))
