"""Multigraphs, edge arrays and the parent forest (labeled digraph)."""

from __future__ import annotations

import hashlib
import math

import numpy as np

from .pram import ContractError, StructuralViolation, approximate_compaction, log_star

SYNTHETIC = -1  # origin id of edges that were never input edges


class EdgeSet:
    """Flat arrays of edges (u, v, origin-id).

    Deleted edges are tombstones: `slots` keeps the capacity a sweep has to
    touch until the array is compacted, which happens once fewer than half of
    the slots are live.
    """

    __slots__ = ("u", "v", "oid", "slots")

    def __init__(self, u, v, oid=None, slots=None):
        self.u = np.asarray(u, dtype=np.int64)
        self.v = np.asarray(v, dtype=np.int64)
        if oid is None:
            oid = np.arange(len(self.u), dtype=np.int64)
        self.oid = np.asarray(oid, dtype=np.int64)
        self.slots = len(self.u) if slots is None else int(slots)

    @classmethod
    def empty(cls):
        z = np.zeros(0, dtype=np.int64)
        return cls(z, z, z)

    def __len__(self):
        return len(self.u)

    def copy(self):
        return EdgeSet(self.u.copy(), self.v.copy(), self.oid.copy(), self.slots)

    def fresh_copy(self):
        """Copy into a new tightly packed array."""
        return EdgeSet(self.u.copy(), self.v.copy(), self.oid.copy())

    def loops(self):
        return self.u == self.v

    def all_loops(self):
        return bool(np.all(self.u == self.v))

    def vertices(self):
        return vertices_of(self)

    def keep(self, mask, run=None, label="compaction"):
        """Delete the edges where mask is false, compacting when sparse."""
        self.u = self.u[mask]
        self.v = self.v[mask]
        self.oid = self.oid[mask]
        if 2 * len(self.u) < self.slots:
            if run is not None:
                run.charge(label, log_star(run.n), self.slots)
            self.slots = len(self.u)
        return self

    def extend(self, u, v, oid=None):
        u = np.asarray(u, dtype=np.int64)
        if oid is None:
            oid = np.full(len(u), SYNTHETIC, dtype=np.int64)
        self.u = np.concatenate((self.u, u))
        self.v = np.concatenate((self.v, np.asarray(v, dtype=np.int64)))
        self.oid = np.concatenate((self.oid, np.asarray(oid, dtype=np.int64)))
        self.slots += len(u)
        return self

    def pairs(self):
        return list(zip(self.u.tolist(), self.v.tolist()))

    def canonical(self):
        """Sorted multiset of unordered pairs, for comparisons in tests."""
        a = np.minimum(self.u, self.v)
        b = np.maximum(self.u, self.v)
        order = np.lexsort((b, a))
        return list(zip(a[order].tolist(), b[order].tolist()))


class MultiGraph:
    """n vertices with ids 1..n and a multiset of edges (loops allowed)."""

    def __init__(self, n, u=(), v=(), oid=None):
        self.n = int(n)
        self.edges = EdgeSet(u, v, oid)
        if len(self.edges) and (
            min(self.edges.u.min(), self.edges.v.min()) < 1
            or max(self.edges.u.max(), self.edges.v.max()) > self.n
        ):
            raise ContractError(f"edge endpoint outside [1, {self.n}]")

    @classmethod
    def from_pairs(cls, n, pairs):
        pairs = list(pairs)
        if not pairs:
            return cls(n)
        a = np.array(pairs, dtype=np.int64)
        return cls(n, a[:, 0], a[:, 1])

    @property
    def m(self):
        return len(self.edges)

    def degrees(self):
        """Degree with each loop counted once."""
        e = self.edges
        deg = np.bincount(e.u, minlength=self.n + 1)
        nl = e.u != e.v
        deg += np.bincount(e.v[nl], minlength=self.n + 1)
        return deg

    def copy(self):
        g = MultiGraph(self.n)
        g.edges = self.edges.fresh_copy()
        return g

    def __repr__(self):
        return f"MultiGraph(n={self.n}, m={self.m})"


class ParentForest:
    """Per-vertex parent pointers plus the Expand-Maxlink bookkeeping.

    Index 0 is an unused dummy so that vertex ids stay 1-based.
    """

    def __init__(self, n, beta1=1.0):
        self.n = int(n)
        self.parent = np.arange(self.n + 1, dtype=np.int64)
        self.level = np.ones(self.n + 1, dtype=np.int64)
        self.budget = np.full(self.n + 1, float(beta1))
        self.dormant = np.zeros(self.n + 1, dtype=bool)
        self.high = np.zeros(self.n + 1, dtype=bool)
        self.head = np.zeros(self.n + 1, dtype=bool)
        self.leader = np.zeros(self.n + 1, dtype=bool)
        self.active = np.zeros(self.n + 1, dtype=bool)
        self.snapshots = {}

    _ARRAYS = ("parent", "level", "budget", "dormant", "high", "head", "leader", "active")

    def roots_mask(self):
        return self.parent == np.arange(self.n + 1)

    def save(self):
        return {k: getattr(self, k).copy() for k in self._ARRAYS}

    def restore(self, state):
        for k in self._ARRAYS:
            getattr(self, k)[:] = state[k]
        self.snapshots = {}

    def changed_since(self, state):
        """Number of entries that differ from a saved state (undo-log size)."""
        return int(sum(np.count_nonzero(getattr(self, k) != state[k]) for k in self._ARRAYS))

    def digest(self):
        h = hashlib.sha256()
        for k in self._ARRAYS:
            h.update(np.ascontiguousarray(getattr(self, k)).tobytes())
        return h.hexdigest()

    def find(self):
        """Root of every vertex; raises StructuralViolation on a cycle."""
        anc = self.parent.copy()
        for _ in range(int(math.log2(self.n + 2)) + 3):
            nxt = anc[anc]
            if np.array_equal(nxt, anc):
                # doubling squares an even cycle into fixed points; those are not roots
                if np.any(self.parent[anc] != anc):
                    break
                return anc
            anc = nxt
        raise StructuralViolation("parent pointers contain a cycle")

    def depths(self):
        """Distance from each vertex to its root."""
        idx = np.arange(self.n + 1)
        anc = self.parent.copy()
        dist = (anc != idx).astype(np.int64)
        for _ in range(int(math.log2(self.n + 2)) + 3):
            nxt = anc[anc]
            if np.array_equal(nxt, anc):
                if np.any(self.parent[anc] != anc):
                    break
                return dist
            dist = dist + dist[anc]
            anc = nxt
        raise StructuralViolation("parent pointers contain a cycle")

    def is_flat(self, vertices=None):
        p = self.parent
        if vertices is None:
            return bool(np.all(p[p] == p))
        vertices = np.asarray(vertices, dtype=np.int64)
        return bool(np.all(p[p[vertices]] == p[vertices]))

    def labels(self):
        """Root label of vertices 1..n as a list (index i-1 is vertex i)."""
        return self.find()[1:]


def tree_heights(forest):
    """Height of every tree, keyed by root."""
    dist = forest.depths()
    root = forest.find()
    h = np.zeros(forest.n + 1, dtype=np.int64)
    np.maximum.at(h, root, dist)
    roots = np.flatnonzero(forest.roots_mask()[1:]) + 1
    return {int(r): int(h[r]) for r in roots}


def alter(E, forest, keep_loops=False, run=None, label="alter", snapshot=None):
    """Move every edge to the parents of its endpoints (in place)."""
    if run is not None:
        run.charge(label, 1, E.slots)
    p = forest.parent
    E.u = p[E.u]
    E.v = p[E.v]
    if snapshot is not None:
        forest.snapshots[snapshot] = p.copy()
    if not keep_loops and len(E):
        loops = E.u == E.v
        if loops.any():
            E.keep(~loops, run, label)
    return E


def shortcut(V, forest, run=None, label="shortcut"):
    """One synchronous pointer-doubling step on the vertices V (None = all)."""
    p = forest.parent
    if V is None:
        if run is not None:
            run.charge(label, 1, forest.n)
        p[:] = p[p]
        return
    V = np.asarray(V, dtype=np.int64)
    if run is not None:
        run.charge(label, 1, len(V))
    if len(V):
        p[V] = p[p[V]]


def flatten(V, forest, run=None, label="shortcut"):
    """Shortcut V until every vertex of V points at a root."""
    p = forest.parent
    if V is None:
        V = np.arange(1, forest.n + 1)
    V = np.asarray(V, dtype=np.int64)
    steps = 0
    while len(V) and not np.all(p[p[V]] == p[V]):
        shortcut(V, forest, run, label)
        steps += 1
        if steps > 2 * forest.n + 2:
            raise StructuralViolation("parent pointers contain a cycle")
    return steps


def vertices_of(*edge_sets):
    """Sorted distinct endpoints of the given edge sets."""
    sets = [e for e in edge_sets if len(e)]
    if not sets:
        return np.zeros(0, dtype=np.int64)
    top = max(max(int(e.u.max()), int(e.v.max())) for e in sets)
    mark = np.zeros(top + 1, dtype=bool)
    for e in sets:
        mark[e.u] = True
        mark[e.v] = True
    return np.flatnonzero(mark)


def upper_degree(Gp_edges, forest):
    """For each vertex v, the number of edges (u, w) of G' with u.p = v.

    Read-only: the edge arrays are not altered. Both orientations count.
    """
    p = forest.parent
    n = forest.n
    return np.bincount(p[Gp_edges.u], minlength=n + 1) + np.bincount(p[Gp_edges.v], minlength=n + 1)


def compaction_map(mask, run=None):
    """Dense renaming of the marked positions: returns (new_ids, back_map)."""
    idx = np.flatnonzero(mask)
    back = approximate_compaction(idx, ledger=None)
    if run is not None:
        run.charge("compaction", log_star(run.n), len(mask))
    new = np.zeros(len(mask), dtype=np.int64)
    new[back] = np.arange(1, len(back) + 1)
    return new, back
