"""Plain-text edge lists: a header `n m`, then m lines `u v` (1-based, `#` comments)."""

from __future__ import annotations

import io

import numpy as np

from .graph import MultiGraph


class EdgeListError(ValueError):
    def __init__(self, lineno, message):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def _tokens(text):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def parse_edge_list(text):
    rows = _tokens(text)
    try:
        lineno, head = next(rows)
    except StopIteration:
        raise EdgeListError(1, "missing header 'n m'") from None
    if len(head) != 2:
        raise EdgeListError(lineno, "header must be 'n m'")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError:
        raise EdgeListError(lineno, "header must hold two integers") from None
    if n < 0 or m < 0:
        raise EdgeListError(lineno, "negative size in header")
    u = np.empty(m, dtype=np.int64)
    v = np.empty(m, dtype=np.int64)
    k = 0
    last = lineno
    for lineno, tok in rows:
        last = lineno
        if k == m:
            raise EdgeListError(lineno, f"more than {m} edges")
        if len(tok) != 2:
            raise EdgeListError(lineno, "an edge line needs exactly two ids")
        try:
            a, b = int(tok[0]), int(tok[1])
        except ValueError:
            raise EdgeListError(lineno, "vertex ids must be integers") from None
        if not (1 <= a <= n and 1 <= b <= n):
            raise EdgeListError(lineno, f"vertex id outside [1, {n}]")
        u[k], v[k] = a, b
        k += 1
    if k != m:
        raise EdgeListError(last, f"expected {m} edges, found {k}")
    return MultiGraph(n, u, v)


def read_edge_list(path):
    if path == "-":
        import sys
        return parse_edge_list(sys.stdin.read())
    with open(path, encoding="utf-8") as fh:
        return parse_edge_list(fh.read())


def format_edge_list(G):
    buf = io.StringIO()
    buf.write(f"{G.n} {G.m}\n")
    if G.m:
        np.savetxt(buf, np.column_stack((G.edges.u, G.edges.v)), fmt="%d")
    return buf.getvalue()


def write_edge_list(G, path):
    text = format_edge_list(G)
    if path == "-":
        import sys
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
