"""Sequential ground truth for component labels."""

from __future__ import annotations

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components


def oracle_components(G):
    """Label of each vertex 1..n: the minimum vertex id of its component.

    Returned as an array indexed by vertex id (index 0 unused, set to 0).
    """
    n = G.n
    e = G.edges
    adj = coo_matrix((np.ones(len(e), dtype=np.int8), (e.u - 1, e.v - 1)), shape=(n, n))
    _, comp = connected_components(adj, directed=False)
    first = np.full(comp.max() + 1 if n else 0, n + 1, dtype=np.int64)
    np.minimum.at(first, comp, np.arange(1, n + 1))
    out = np.zeros(n + 1, dtype=np.int64)
    out[1:] = first[comp]
    return out


def bfs_components(G):
    """Independent BFS labelling with adjacency lists (min id per component)."""
    n = G.n
    adj = [[] for _ in range(n + 1)]
    for a, b in zip(G.edges.u.tolist(), G.edges.v.tolist()):
        adj[a].append(b)
        adj[b].append(a)
    label = [0] * (n + 1)
    for s in range(1, n + 1):
        if label[s]:
            continue
        label[s] = s
        stack = [s]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if not label[y]:
                    label[y] = s
                    stack.append(y)
    return np.array(label, dtype=np.int64)


def canonical_labels(roots):
    """Relabel root ids (index 0 unused) to minimum member ids."""
    roots = np.asarray(roots, dtype=np.int64)
    n = len(roots) - 1
    best = np.full(n + 1, n + 1, dtype=np.int64)
    np.minimum.at(best, roots[1:], np.arange(1, n + 1))
    out = np.zeros(n + 1, dtype=np.int64)
    out[1:] = best[roots[1:]]
    return out


def first_mismatch(labels, truth):
    """First vertex whose canonical label differs, or None."""
    a = canonical_labels(labels)
    bad = np.flatnonzero(a[1:] != np.asarray(truth)[1:])
    return None if len(bad) == 0 else int(bad[0]) + 1
