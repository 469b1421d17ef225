"""Round-synchronous connectivity solver and SampleSolve."""

from __future__ import annotations

import numpy as np

from .graph import EdgeSet, MultiGraph, alter, flatten, shortcut, vertices_of
from .pram import perfect_hash_dedup
from .stage2 import Skeleton, expand_maxlink


def _tie_hook(V, E, forest, run, label):
    """Roots hook to their smallest-id adjacent root of equal level, if smaller."""
    p = forest.parent
    lvl = forest.level
    n = forest.n
    x = np.concatenate((E.u, E.v))
    y = np.concatenate((E.v, E.u))
    run.charge(label, 1, len(x))
    if len(x) == 0:
        return
    ok = (p[x] == x) & (p[y] == y) & (y < x) & (lvl[x] == lvl[y])
    if not ok.any():
        return
    best = np.full(n + 1, n + 1, dtype=np.int64)
    np.minimum.at(best, x[ok], y[ok])
    src = np.unique(x[ok])
    p[src] = best[src]


def ltz_connectivity(G, forest, round_budget=None, run=None, vertices=None, keep_loops=True):
    """Connected components by repeated expansion, hooking and shortcutting.

    G is a MultiGraph or an EdgeSet; its edges are altered in place. Each
    round is Expand-Maxlink (levels capped at the profile maximum), a hook of
    equal-level adjacent roots towards smaller ids, a shortcut and an alter.
    The run stops when every edge is a loop (complete: trees are flattened
    before returning True) or after `round_budget` rounds (returns False).
    """
    from .pram import Run

    label = "stage3/ltz"
    run = run or Run(n=forest.n)
    E = G.edges if isinstance(G, MultiGraph) else G
    if vertices is None:
        vertices = vertices_of(E)
    V = np.asarray(vertices, dtype=np.int64)
    H = Skeleton(V, E)
    p = forest.parent
    roots = V[p[V] == V]
    forest.budget[roots] = run.profile.beta(run.n, forest.level[roots])
    rounds = 0
    while True:
        run.charge(label, 1, E.slots)
        if not np.any(E.u != E.v):
            flatten(V, forest, run, label)
            run.checkpoint(label, forest, flat_vertices=V)
            return True
        if round_budget is not None and rounds >= round_budget:
            run.checkpoint(label, forest)
            return False
        expand_maxlink(H, forest, run, clamp=True, keep_loops=keep_loops, label=label)
        _tie_hook(V, E, forest, run, label)
        shortcut(V, forest, run, label)
        alter(E, forest, keep_loops, run, label)
        rounds += 1


def sample_solve(G, forest, run, vertices=None):
    """Solve a graph with a large spectral gap by solving a random subgraph.

    Small graphs are deduplicated and solved directly. Otherwise every edge
    (loops included) is kept with the stage-3 sampling probability, the
    sample is solved, and every vertex takes three parent steps.
    """
    label = "stage3/sample_solve"
    prof = run.profile
    E = G.edges if isinstance(G, MultiGraph) else G
    if vertices is None:
        vertices = np.arange(1, forest.n + 1) if isinstance(G, MultiGraph) else vertices_of(E)
    V = np.asarray(vertices, dtype=np.int64)
    p = forest.parent
    run.charge(label, 1, len(V))
    if len(V) <= prof.small_cutoff(run.n):
        a, b, idx = perfect_hash_dedup(E.u, E.v, run.ledger, run.n, run.prefix + label)
        Es = EdgeSet(a, b, E.oid[idx])
        ltz_connectivity(Es, forest, None, run, vertices=V)
        flatten(V, forest, run, label)
        return
    run.charge(label, 1, len(E))
    keep = run.rng("sample").random(len(E)) < prof.stage3_p(run.n)
    Es = EdgeSet(E.u[keep], E.v[keep], E.oid[keep])
    ltz_connectivity(Es, forest, None, run, vertices=vertices_of(Es))
    run.charge(label, 1, len(V))
    p[V] = p[p[p[V]]]
    flatten(V, forest, run, label)
