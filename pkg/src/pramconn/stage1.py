"""Contraction by random matchings: Matching, Filter, Reverse, Extract, Reduce."""

from __future__ import annotations

import numpy as np

from .graph import EdgeSet, alter, shortcut
from .pram import StructuralViolation

_EMPTY = np.zeros(0, dtype=np.int64)


def _member(n, vertices):
    m = np.zeros(n + 1, dtype=bool)
    m[vertices] = True
    return m


def _replay_shortcuts(logs, k, forest, run, label):
    """Shortcut the update logs of rounds k..0 in reverse order.

    Rounds past the end of `logs` and rounds with empty logs cost one round
    each and touch nothing, so they are charged in bulk.
    """
    idle = k + 1 - len(logs)
    for j in range(len(logs) - 1, -1, -1):
        if len(logs[j]) == 0:
            idle += 1
            continue
        if idle:
            run.charge(label, idle, 0)
            idle = 0
        shortcut(logs[j], forest, run, label)
    if idle:
        run.charge(label, idle, 0)


def matching(E, forest, run):
    """Constant-shrink contraction over the root-root edges of E.

    E is read only. Returns the vertices whose parent changed.
    """
    label = "stage1/matching"
    p = forest.parent
    n = forest.n
    u, v = E.u, E.v

    # 1: keep edges between two distinct roots
    run.charge(label, 1, E.slots)
    ok = (p[u] == u) & (p[v] == v) & (u != v)
    if not ok.any():
        run.charge(label, 8, 0)
        return _EMPTY
    a = np.maximum(u[ok], v[ok])
    b = np.minimum(u[ok], v[ok])
    mark = np.zeros(n + 1, dtype=bool)
    mark[a] = True
    mark[b] = True
    VE = np.flatnonzero(mark)
    before = p[VE].copy()
    arcs = len(a)

    # 2: orient from the large end to the small end
    run.charge(label, 1, arcs)

    # 3: every tail keeps one arbitrary out-arc
    run.charge(label, 1, arcs)
    _, win = run.write(a, np.arange(arcs))
    kept = np.zeros(arcs, dtype=bool)
    kept[win] = True

    # 4: singletons hook to an arbitrary in-neighbour of the pre-step-3 digraph
    run.charge(label, 1, arcs + len(VE))
    present = np.zeros(n + 1, dtype=bool)
    present[a] = True
    present[b[kept]] = True
    lone = ~present[b]
    if lone.any():
        cells, vals = run.write(b[lone], a[lone])
        p[cells] = vals

    # 5: roots with more than one in-arc drop their out-arcs
    run.charge(label, 1, arcs)
    indeg = np.bincount(b[kept], minlength=n + 1)
    live = kept & ~(indeg[a] > 1)

    # 6: roots with more than one in-arc absorb their in-neighbours
    run.charge(label, 1, arcs)
    indeg = np.bincount(b[live], minlength=n + 1)
    into = live & (indeg[b] > 1)
    if into.any():
        p[a[into]] = b[into]
        gone = np.zeros(n + 1, dtype=bool)
        gone[a[into]] = True
        live &= ~(gone[a] | gone[b])

    # 7: delete each arc with the matching deletion probability
    run.charge(label, 1, int(live.sum()))
    idx = np.flatnonzero(live)
    if len(idx):
        rng = run.rng("matching")
        drop = rng.random(len(idx)) < run.profile.matching_delete_prob
        live[idx[drop]] = False

    # 8: isolated arcs link head under tail
    run.charge(label, 1, int(live.sum()))
    idx = np.flatnonzero(live)
    if len(idx):
        ends = np.bincount(np.concatenate((a[idx], b[idx])), minlength=n + 1)
        iso = idx[(ends[a[idx]] == 1) & (ends[b[idx]] == 1)]
        p[b[iso]] = a[iso]

    # 9
    shortcut(VE, forest, run, label)
    return VE[p[VE] != before]


def filter_edges(E, k, forest, run):
    """k+1 rounds of matching, alter and random deletion on a private copy of E.

    Returns the vertices still incident to surviving edges.
    """
    label = "stage1/filter"
    Ec = E.copy()
    logs = []
    prob = run.profile.filter_delete_prob
    for j in range(k + 1):
        if len(Ec) == 0:
            # nothing left to touch: the remaining rounds are empty
            run.charge(label, 11 * (k + 1 - j), 0)
            break
        logs.append(matching(Ec, forest, run))
        alter(Ec, forest, run=run, label=label)
        run.charge(label, 1, Ec.slots)
        if len(Ec):
            drop = run.rng("filter").random(len(Ec)) < prob
            if drop.any():
                Ec.keep(~drop, run, label)
    _replay_shortcuts(logs, k, forest, run, label)
    run.checkpoint("stage1/filter", forest)
    return Ec.vertices()


def reverse(Vp, E, forest, run, scope=None):
    """Make one vertex of Vp the root of each flat tree that contains one.

    Only children of roots take part, so every tree keeps its vertex set.
    `scope` limits the global shortcut (None = every vertex).
    """
    label = "stage1/reverse"
    p = forest.parent
    Vp = np.asarray(Vp, dtype=np.int64)
    run.charge(label, 1, len(Vp))
    if len(Vp):
        q = p[Vp]
        cand = Vp[(q != Vp) & (p[q] == q)]
        if len(cand):
            old = p[cand]
            cells, vals = run.write(old, cand)
            p[cells] = vals
            p[cand] = p[old]
    shortcut(scope, forest, run, label)
    alter(E, forest, run=run, label=label)


def extract(E, k, forest, run):
    """Pull high-degree vertices to the roots of their trees."""
    label = "stage1/extract"
    p = forest.parent
    n = forest.n
    run.charge(label, 1, E.slots)
    if len(E) and not (np.all(p[E.u] == E.u) and np.all(p[E.v] == E.v)):
        raise StructuralViolation("extract needs every edge on roots")
    if not np.array_equal(p, np.arange(n + 1)):
        raise StructuralViolation("extract needs trees of height 0")

    inV = np.zeros(n + 1, dtype=bool)
    Ep = E.fresh_copy()
    Ep.keep(Ep.u != Ep.v)
    logs = []
    for i in range(k + 1):
        cand = Ep.vertices()
        before = p[cand].copy()
        if len(Ep):
            inV[filter_edges(Ep, k, forest, run)] = True
            alter(Ep, forest, run=run, label=label)
            run.charge(label, 1, Ep.slots)
            if len(Ep):
                both = inV[Ep.u] & inV[Ep.v]
                if both.any():
                    Ep.keep(~both, run, label)
        else:
            run.charge(label, 2, 0)
        logs.append(cand[p[cand] != before])
    _replay_shortcuts(logs, k, forest, run, label)
    reverse(np.flatnonzero(inV), E, forest, run)
    run.checkpoint("stage1/extract", forest, flat=True, edges_on_roots=E)


def reduce_graph(V, E, k, forest, run, inner_k=None):
    """Contract the graph (V, E) in place; E ends up on roots of flat trees."""
    label = "stage1/reduce"
    if inner_k is None:
        inner_k = run.profile.reduce_inner_k(run.n)
    run.charge(label, 1, 1)
    if len(E) == 0:
        return
    extract(E, inner_k, forest, run)
    Vp = filter_edges(E, k, forest, run)
    shortcut(V, forest, run, label)
    alter(E, forest, run=run, label=label)
    inV = np.zeros(forest.n + 1, dtype=bool)
    inV[Vp] = True
    run.charge(label, 1, E.slots)
    out = ~(inV[E.u] & inV[E.v])
    Ep = EdgeSet(E.u[out], E.v[out], E.oid[out])
    for j in range(k + 1):
        if len(Ep) == 0:
            run.charge(label, 3 * (k + 1 - j), 0)
            break
        matching(Ep, forest, run)
        shortcut(V, forest, run, label)
        alter(Ep, forest, run=run, label=label)
    reverse(Vp, E, forest, run)
    run.checkpoint("stage1/reduce", forest, flat=True, edges_on_roots=E)
