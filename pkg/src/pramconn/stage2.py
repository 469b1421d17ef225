"""Degree densification: Build, SparseBuild, Maxlink, Expand-Maxlink, Densify, Increase."""

from __future__ import annotations

import math

import numpy as np

from .graph import SYNTHETIC, EdgeSet, alter, shortcut, vertices_of
from .pram import InstanceFailed, collided_cells, log_star, perfect_hash_dedup

CAP = 1 << 40  # hash tables larger than this behave as collision free


class Skeleton:
    """A graph H = (V, E) whose edge array is owned by the caller."""

    def __init__(self, V, E):
        self.V = np.asarray(V, dtype=np.int64)
        self.E = E

    def __repr__(self):
        return f"Skeleton(|V|={len(self.V)}, |E|={len(self.E)})"


def table_cells(size):
    """Integer table size, clipped to [1, CAP]."""
    size = np.minimum(np.asarray(size, dtype=float), float(CAP))
    return np.maximum(1, np.floor(size)).astype(np.int64)


def _occupancy(owner, slot, n):
    """Distinct occupied cells per owner."""
    if len(owner) == 0:
        return np.zeros(n + 1, dtype=np.int64)
    cells = np.unique(owner * CAP + slot)
    return np.bincount(cells // CAP, minlength=n + 1)


def build(V, E, b, forest, run):
    """Skeleton: all edges at low vertices plus a 1/b sample of high-high edges."""
    label = "stage2/build"
    prof = run.profile
    n = forest.n
    V = np.asarray(V, dtype=np.int64)
    rng = run.rng("build")
    run.charge(label, log_star(run.n), len(V))
    T = int(table_cells(prof.table_size(b)))
    h = np.zeros(n + 1, dtype=np.int64)
    h[V] = rng.integers(0, T, size=len(V))
    run.charge(label, 1, 2 * len(E) + len(V))
    owner = np.concatenate((E.v, E.u))
    item = np.concatenate((E.u, E.v))
    occ = _occupancy(owner, h[item], n)
    # counting occupied cells with a binary tree over the touched cells
    run.charge(label, max(1, math.ceil(math.log2(T + 1))), 2 * len(E) + len(V))
    high = np.zeros(n + 1, dtype=bool)
    high[V] = occ[V] > prof.high_threshold(b)
    forest.high[V] = high[V]
    run.charge(label, 1, len(E))
    keep = ~(high[E.u] & high[E.v])
    both = ~keep
    if both.any():
        keep[both] = rng.random(int(both.sum())) < prof.skeleton_sample_prob(b)
    a, c, idx = perfect_hash_dedup(E.u[keep], E.v[keep], run.ledger, run.n, run.prefix + label)
    oid = E.oid[keep][idx]
    return Skeleton(V, EdgeSet(a, c, oid))


def sparse_build(Gp, H2, b, forest, run, aux=None, active=None):
    """Skeleton edges from the sampled graph H2 plus all edges at low roots.

    Gp: MultiGraph whose edge array is never altered.
    """
    from .aux import low_edge_extract

    label = "stage2/build"
    if aux is None:
        raise ValueError("sparse_build needs the auxiliary edge array")
    prof = run.profile
    n = forest.n
    p = forest.parent
    if active is None:
        active = forest.active
    act = np.flatnonzero(active)
    rng = run.rng("sparse_build")
    T = int(table_cells(prof.table_size(b)))
    run.charge(label, log_star(run.n), len(act))
    # 2: every H2 edge is written into a random cell of each end's table
    owner = np.concatenate((H2.u, H2.v))
    run.charge(label, 1, len(owner))
    ok = active[owner]
    owner = owner[ok]
    occ = _occupancy(owner, rng.integers(0, T, size=len(owner)), n)
    run.charge(label, max(1, math.ceil(math.log2(T + 1))), len(act) + len(owner))
    high = np.zeros(n + 1, dtype=bool)
    low = np.zeros(n + 1, dtype=bool)
    high[act] = occ[act] > prof.high_threshold(b)
    low[act] = ~high[act]
    forest.high[:] = False
    forest.high[act] = high[act]
    # 4: edges of G' whose first end hangs below a low root
    size = prof.table_size(b)
    lg = math.log2(size + 1) if math.isfinite(size) else prof.table_log2(b)
    depth = max(1, math.ceil(lg) + 1)
    Ep = low_edge_extract(aux, forest, lambda u: low[p[u]], depth, run)
    alter(Ep, forest, run=run, label=label)
    # 5
    run.charge(label, 1, len(Ep) + len(H2))
    Ep.extend(H2.u, H2.v, H2.oid)
    return Ep


def maxlink(V, E, forest, run, label="stage2/maxlink"):
    """Two synchronous iterations of linking roots to the highest-level neighbour.

    Only roots link, and only to candidates that are roots (a non-root
    candidate is replaced by its parent when that is a root). Ties in level go
    to the smallest id. Links always go to strictly higher levels, so no
    cycle can form.
    """
    p = forest.parent
    lvl = forest.level
    n = forest.n
    x = np.concatenate((E.u, E.v))
    y = np.concatenate((E.v, E.u))
    for _ in range(2):
        run.charge(label, 1, len(V) + len(x))
        if len(x) == 0:
            continue
        c = p[y]
        c = np.where(p[c] == c, c, p[c])
        # a link needs a strictly higher level, so other arcs never win
        ok = (lvl[c] > lvl[x]) & (p[x] == x) & (p[c] == c)
        if not ok.any():
            continue
        xs = x[ok]
        cs = c[ok]
        key = lvl[cs] * (n + 1) + (n - cs)
        best = np.full(n + 1, -1, dtype=np.int64)
        np.maximum.at(best, xs, key)
        cand = np.unique(xs)
        bk = best[cand]
        blvl = bk // (n + 1)
        go = blvl > lvl[cand]
        p[cand[go]] = n - bk[go] % (n + 1)


def _hash_into(owner, item, size, rng):
    """Random slots for (owner, item) writes; returns cell ids."""
    slot = rng.integers(0, size[owner]) if len(owner) else np.zeros(0, dtype=np.int64)
    return owner * CAP + slot


def expand_maxlink(H, forest, run, i=None, clamp=False, keep_loops=False,
                   label="stage2/expand"):
    """One round of hashing-based neighbourhood expansion plus Maxlink.

    Adds every hash-table item (v, u), u != v, to H.E as an edge. When
    `i` is given the parent snapshots 2i and 2i+1 are recorded.
    """
    prof = run.profile
    p = forest.parent
    lvl = forest.level
    beta = forest.budget
    n = forest.n
    V = H.V
    E = H.E
    rng = run.rng("expand")

    # 1
    maxlink(V, E, forest, run, label)
    alter(E, forest, keep_loops, run, label, snapshot=None if i is None else 2 * i)

    # 2: random level-ups
    R = V[p[V] == V]
    run.charge(label, 1, len(R))
    forest.dormant[R] = False
    lucky = rng.random(len(R)) < np.minimum(1.0, beta[R] ** prof.level_up_exp)
    lvl[R[lucky]] += 1
    lucky_mask = np.zeros(n + 1, dtype=bool)
    lucky_mask[R[lucky]] = True

    size = np.ones(n + 1, dtype=np.int64)
    size[R] = table_cells(np.sqrt(beta[R]))

    # 3: hash equal-budget root neighbours, and the root itself
    x = np.concatenate((E.u, E.v, R))
    y = np.concatenate((E.v, E.u, R))
    ok = (p[x] == x) & (p[y] == y) & (beta[x] == beta[y])
    x = x[ok]
    y = y[ok]
    run.charge(label, 1, len(x))
    cells = _hash_into(x, y, size, rng)
    tc, tv = run.write(cells, y)
    dormant = forest.dormant
    dormant[collided_cells(cells, y) // CAP] = True

    # 4: a table holding a dormant item makes its owner dormant
    run.charge(label, 1, len(tc))
    owners = tc // CAP
    hit = dormant[tv]
    if hit.any():
        dormant[np.unique(owners[hit])] = True

    # 5: two-hop hashing
    order = np.argsort(owners, kind="stable")
    so = owners[order]
    sv = tv[order]
    lo = np.searchsorted(so, tv, "left")
    reps = np.searchsorted(so, tv, "right") - lo
    total = int(reps.sum())
    run.charge(label, 1, len(tc) + total)
    if total:
        own2 = np.repeat(owners, reps)
        offs = np.arange(total) - np.repeat(np.cumsum(reps) - reps, reps)
        item2 = sv[np.repeat(lo, reps) + offs]
        cells2 = _hash_into(own2, item2, size, rng)
        c2, v2 = run.write(cells2, item2)
        dormant[collided_cells(cells2, item2) // CAP] = True
        # cells written in this step take the new value
        allc = np.concatenate((c2, tc))
        allv = np.concatenate((v2, tv))
        _, first = np.unique(allc, return_index=True)
        tc = allc[first]
        tv = allv[first]
        owners = tc // CAP

    # items become edges of H
    new = owners != tv
    run.charge(label, 1, len(tc))
    E.extend(owners[new], tv[new])

    # 6
    maxlink(V, E, forest, run, label)
    shortcut(V, forest, run, label)
    alter(E, forest, keep_loops, run, label, snapshot=None if i is None else 2 * i + 1)

    _prune_synthetic(E, run, label)

    # 7
    R = V[p[V] == V]
    run.charge(label, 1, len(R))
    up = R[dormant[R] & ~lucky_mask[R]]
    lvl[up] += 1

    # 8: fresh block at the current level
    run.charge(label, log_star(run.n), len(R))
    top = prof.max_level
    if len(R) and lvl[R].max() > top:
        if not clamp:
            raise InstanceFailed(f"level {int(lvl[R].max())} exceeds the block pool ({top})")
        np.minimum(lvl, top, out=lvl)
    beta[R] = prof.beta(run.n, lvl[R])
    return H


def _prune_synthetic(E, run, label):
    """Drop synthetic loops and repeated synthetic pairs; input edges are untouched."""
    syn = E.oid == SYNTHETIC
    if not syn.any():
        return
    a = np.minimum(E.u, E.v)
    c = np.maximum(E.u, E.v)
    keep = ~syn
    idx = np.flatnonzero(syn & (a != c))
    if len(idx):
        key = a[idx] * (run.n + 1) + c[idx]
        _, first = np.unique(key, return_index=True)
        keep[idx[first]] = True
    run.charge(label, log_star(run.n), int(syn.sum()))
    if not keep.all():
        E.keep(keep, run, label)


def _has_live_edge(E):
    return len(E) > 0 and bool(np.any(E.u != E.v))


def densify(H, b, forest, run, keep_loops=False):
    """Expand-Maxlink rounds, shortcuts and a full solve of the closed graph.

    Returns (roots of H, E_close).
    """
    from .stage3 import ltz_connectivity

    label = "stage2/densify"
    prof = run.profile
    p = forest.parent
    V = H.V
    R = prof.densify_rounds(b)
    roots = V[p[V] == V]
    run.charge(label, log_star(run.n), len(V))
    forest.budget[roots] = prof.beta(run.n, forest.level[roots])
    forest.snapshots = {0: p.copy()}
    for i in range(R):
        if not _has_live_edge(H.E):
            # the graph is settled; later rounds would not move any parent
            run.charge(label, 12 * (R - i), 0)
            frozen = p.copy()
            for j in range(2 * i, 2 * R):
                forest.snapshots[j] = frozen
            break
        expand_maxlink(H, forest, run, i, keep_loops=keep_loops)
    Vr = V[p[V] == V]
    for _ in range(prof.densify_shortcuts(run.n)):
        shortcut(V, forest, run, label)
        alter(H.E, forest, keep_loops, run, label, snapshot=2 * R)
    if 2 * R not in forest.snapshots:
        forest.snapshots[2 * R] = p.copy()
    Eclose = H.E
    ltz_connectivity(Eclose, forest, None, run, vertices=vertices_of(Eclose), keep_loops=keep_loops)
    alter(Eclose, forest, keep_loops, run, label, snapshot=2 * R + 1)
    run.checkpoint("stage2/densify", forest)
    return Vr, Eclose


def iterated_parent(V, forest, last):
    """v.p^(last) by replaying the recorded snapshots p_1 .. p_last."""
    x = np.asarray(V, dtype=np.int64).copy()
    for j in range(1, last + 1):
        snap = forest.snapshots.get(j)
        if snap is not None:
            x = snap[x]
    return x


def _increase_core(H, V, b, forest, run):
    """Steps shared by both Increase variants (densify through the last shortcut)."""
    label = "stage2/increase"
    prof = run.profile
    p = forest.parent
    n = forest.n
    V = np.asarray(V, dtype=np.int64)
    R = prof.densify_rounds(b)
    _, Eclose = densify(H, b, forest, run)

    # 3-4: hash every v into the table of its replayed parent and move it there
    run.charge(label, log_star(run.n), len(V))
    run.charge(label, 2 * R + 2, len(V) * (2 * R + 2))
    u = iterated_parent(V, forest, 2 * R + 1)
    rng = run.rng("increase")
    T = int(table_cells(prof.table_size(b)))
    slot = rng.integers(0, T, size=len(V))
    occ = _occupancy(u, slot, n)
    move = p[u] == u
    p[V[move]] = u[move]

    # 5
    run.charge(label, max(1, math.ceil(math.log2(T + 1))), len(V))
    head = np.zeros(n + 1, dtype=bool)
    head[V] = occ[V] >= prof.head_threshold(b)
    forest.head[V] = head[V]

    # 6: non-head roots join an adjacent head
    x = np.concatenate((Eclose.u, Eclose.v))
    y = np.concatenate((Eclose.v, Eclose.u))
    run.charge(label, 1, len(x))
    ok = head[x] & ~head[y] & (p[x] == x) & (p[y] == y) & (x != y)
    if ok.any():
        cells, vals = run.write(y[ok], x[ok])
        p[cells] = vals

    # 7
    shortcut(V, forest, run, label)

    # 8: non-leader trees hook under adjacent leader trees (coins read at roots)
    coin = np.zeros(n + 1, dtype=bool)
    coin[V] = rng.random(len(V)) < prof.leader_prob
    forest.leader[V] = coin[V]
    run.charge(label, 1, len(V) + len(x))
    rx = p[x]
    ry = p[y]
    ok = coin[rx] & ~coin[ry] & (p[rx] == rx) & (p[ry] == ry) & (rx != ry)
    if ok.any():
        cells, vals = run.write(ry[ok], rx[ok])
        p[cells] = vals

    # 9
    shortcut(V, forest, run, label)
    run.checkpoint("stage2/increase", forest, flat_vertices=V)
    return Eclose


def increase(V, E, b, forest, run):
    """Raise every surviving root's degree to at least b (dense-input variant)."""
    H = build(V, E, b, forest, run)
    _increase_core(H, V, b, forest, run)
    alter(E, forest, run=run, label="stage2/increase")


def increase_sparse(Gp, H1, H2, b, forest, run, aux, active=None):
    """Increase driven by the sampled graph H2; only H1 is altered afterwards."""
    EH = sparse_build(Gp, H2, b, forest, run, aux, active)
    H = Skeleton(vertices_of(EH), EH)
    Vg = Gp.vertices if hasattr(Gp, "vertices") else vertices_of(Gp.edges)
    _increase_core(H, Vg, b, forest, run)
    alter(H1, forest, keep_loops=True, run=run, label="stage2/increase")
