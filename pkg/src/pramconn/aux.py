"""Edge array of G' sorted by first end, and the doubling wake-up extraction."""

from __future__ import annotations

import numpy as np

from .graph import EdgeSet
from .pram import log_star, padded_sort


class AuxiliaryArray:
    """Every edge of G' in both orientations, padded-sorted by first end.

    `first`, `second`, `oid` hold the cells (first == 0 marks an empty cell);
    `l[v]`/`r[v]` bracket v's segment (-1 when v has no edges).
    """

    def __init__(self, n, first, second, oid, l, r, compacted):
        self.n = n
        self.first = first
        self.second = second
        self.oid = oid
        self.l = l
        self.r = r
        self.compacted = compacted

    def __len__(self):
        return len(self.first)

    def owners(self):
        return np.flatnonzero(self.l >= 0)

    def segment(self, v):
        if self.l[v] < 0:
            return np.zeros(0, dtype=np.int64)
        return np.arange(self.l[v], self.r[v] + 1)


def build_auxiliary(edges, n, run):
    """Padded sort of G' edges by first end, with segment boundaries."""
    label = "orchestrator/aux"
    nl = edges.u != edges.v
    first = np.concatenate((edges.u, edges.v[nl]))
    second = np.concatenate((edges.v, edges.u[nl]))
    oid = np.concatenate((edges.oid, edges.oid[nl]))
    keys, items = padded_sort(first, max(n, 1), ledger=run.ledger, label=run.prefix + label)
    full = items >= 0
    sec = np.zeros(len(keys), dtype=np.int64)
    ids = np.full(len(keys), -1, dtype=np.int64)
    sec[full] = second[items[full]]
    ids[full] = oid[items[full]]
    # boundaries: compare each cell with its predecessor and successor
    run.charge(label, 1, len(keys))
    l = np.full(n + 1, -1, dtype=np.int64)
    r = np.full(n + 1, -1, dtype=np.int64)
    pos = np.flatnonzero(full)
    k = keys[pos]
    if len(pos):
        start = np.ones(len(pos), dtype=bool)
        start[1:] = k[1:] != k[:-1]
        end = np.ones(len(pos), dtype=bool)
        end[:-1] = k[1:] != k[:-1]
        l[k[start]] = pos[start]
        r[k[end]] = pos[end]
    compacted = np.zeros(n + 1, dtype=bool)
    thr = run.profile.aux_threshold(run.n)
    big = (l >= 0) & (r - l >= thr)
    if big.any():
        compacted[big] = True
        run.charge(label, log_star(run.n), int((r[big] - l[big] + 1).sum()))
    return AuxiliaryArray(n, keys, sec, ids, l, r, compacted)


def low_edge_extract(aux, forest, predicate, depth_budget, run):
    """Edges whose first end u satisfies predicate(u), found by binary wake-up.

    Starting from u.l, every awake cell wakes two more each round, for
    depth_budget rounds or until the segment of u ends, so at most
    2**(depth_budget + 1) cells of u are collected.
    """
    label = "orchestrator/extract_edges"
    owners = aux.owners()
    run.charge(label, 1, len(owners))
    if len(owners) == 0:
        run.charge(label, depth_budget, 0)
        return EdgeSet.empty()
    sel = owners[np.asarray(predicate(owners), dtype=bool)]
    seg = aux.r[sel] - aux.l[sel] + 1
    cnt = np.minimum(seg, 1 << min(depth_budget + 1, 62))
    total = int(cnt.sum())
    idx = np.repeat(aux.l[sel], cnt) + (np.arange(total) - np.repeat(np.cumsum(cnt) - cnt, cnt))
    run.charge(label, depth_budget, len(owners) + 2 * total)
    u = aux.first[idx]
    v = aux.second[idx]
    oid = aux.oid[idx]
    # an edge found from both of its ends is kept once
    _, keep = np.unique(oid, return_index=True)
    keep.sort()
    run.charge(label, log_star(run.n), total)
    return EdgeSet(u[keep], v[keep], oid[keep])
