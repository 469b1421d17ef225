"""Deterministic instance generators (1-based multigraphs)."""

from __future__ import annotations

import math

import numpy as np

from .graph import MultiGraph
from .pram import ContractError


def path(n):
    a = np.arange(1, n, dtype=np.int64)
    return MultiGraph(n, a, a + 1)


def cycle(n):
    """C_n. C_2 is a doubled edge and C_1 a single loop."""
    if n < 1:
        raise ContractError("cycle needs n >= 1")
    a = np.arange(1, n + 1, dtype=np.int64)
    return MultiGraph(n, a, np.roll(a, -1))


def random_regular(n, d, seed=0):
    """Configuration-model d-regular multigraph without loops.

    Parallel edges are kept. Loops would count once toward the degree, so
    each loop is removed by a degree-preserving switch with a random edge.
    """
    if (n * d) % 2:
        raise ContractError("n*d must be even")
    if d and n < 2:
        raise ContractError("a loopless regular graph needs n >= 2")
    rng = np.random.default_rng(seed)
    stubs = np.repeat(np.arange(1, n + 1, dtype=np.int64), d)
    rng.shuffle(stubs)
    u = stubs[0::2].copy()
    v = stubs[1::2].copy()
    m = len(u)
    for _ in range(1000):
        bad = np.flatnonzero(u == v)
        if len(bad) == 0:
            break
        for e in bad:
            f = int(rng.integers(m))
            a, c, w = u[e], u[f], v[f]
            # (a, a) + (c, w) -> (a, c) + (a, w)
            if f == e or c == a or w == a:
                continue
            u[e], v[e], u[f], v[f] = a, c, a, w
    else:
        raise RuntimeError("could not remove loops")
    return MultiGraph(n, u, v)


def gnp(n, p, seed=0):
    """Erdos-Renyi G(n, p) without loops or parallel edges."""
    rng = np.random.default_rng(seed)
    total = n * (n - 1) // 2
    m = int(rng.binomial(total, p)) if total else 0
    chosen = np.zeros(0, dtype=np.int64)
    while len(chosen) < m:
        extra = rng.integers(0, total, size=m - len(chosen))
        chosen = np.unique(np.concatenate((chosen, extra)))
    chosen = rng.permutation(chosen)
    # pair index t -> (i, j) with 0 <= i < j < n, row-major over i
    i = (n - 2 - np.floor(np.sqrt(-8.0 * chosen + 4.0 * n * (n - 1) - 7) / 2.0 - 0.5)).astype(np.int64)
    j = chosen + i + 1 - (total - (n - i) * (n - i - 1) // 2)
    return MultiGraph(n, i + 1, j + 1)


def random_edges(n, m, seed=0):
    """m uniform random pairs; loops and parallel edges are kept."""
    rng = np.random.default_rng(seed)
    return MultiGraph(n, rng.integers(1, n + 1, m), rng.integers(1, n + 1, m))


def union(graphs):
    """Disjoint union; the vertices of graph k follow those of graph k-1."""
    us, vs = [], []
    off = 0
    for g in graphs:
        us.append(g.edges.u + off)
        vs.append(g.edges.v + off)
        off += g.n
    if not us:
        return MultiGraph(0)
    return MultiGraph(off, np.concatenate(us), np.concatenate(vs))


def shuffle_ids(G, seed):
    """Relabel the vertices by a seeded random permutation."""
    rng = np.random.default_rng(seed)
    perm = np.concatenate(([0], rng.permutation(G.n) + 1))
    return MultiGraph(G.n, perm[G.edges.u], perm[G.edges.v])


def two_cycle_instance(n, variant, shuffle_seed=0):
    """One C_n, or two disjoint C_{n/2}, with shuffled vertex ids."""
    if variant == "one":
        g = cycle(n)
    elif variant == "two":
        if n % 2:
            raise ContractError("the two-cycle variant needs even n")
        g = union([cycle(n // 2), cycle(n // 2)])
    else:
        raise ContractError(f"unknown variant {variant!r}")
    return shuffle_ids(g, shuffle_seed)


def blowup_shape(n_target):
    L = max(1, math.ceil(math.log2(max(2, n_target))))
    return L, (n_target - 1) // L


def diameter_blowup_graph(n_target, width_exp=1.5):
    """Hub x joined to k far vertices z_i by disjoint paths of L edges, plus a band on Z.

    L = ceil(log2 n_target), k = floor((n_target - 1) / L) and z_i, z_j are
    adjacent when 0 < |i - j| <= ceil(L ** width_exp). Returns (G, info),
    where info holds hub, z (ids in order), L, k, width and the diameter bound 2L.
    """
    L, k = blowup_shape(n_target)
    if k < 1:
        raise ContractError(f"n_target={n_target} cannot fit one path of length {L}")
    n = 1 + k * L
    width = math.ceil(L ** width_exp)
    # path i uses vertices 2 + i*L .. 1 + (i+1)*L, ending at z_i
    start = 2 + np.arange(k, dtype=np.int64) * L
    steps = np.arange(L, dtype=np.int64)
    prev = np.where(steps == 0, 1, 0)[None, :] + (start[:, None] + steps[None, :] - 1) * (steps[None, :] > 0)
    cur = start[:, None] + steps[None, :]
    z = start + L - 1
    bi, bj = [], []
    for d in range(1, min(width, k - 1) + 1):
        bi.append(z[:-d])
        bj.append(z[d:])
    u = np.concatenate([prev.ravel()] + bi)
    v = np.concatenate([cur.ravel()] + bj)
    info = {"hub": 1, "z": z, "L": L, "k": k, "width": width, "n": n, "diameter_bound": 2 * L}
    return MultiGraph(n, u, v), info


KINDS = ("path", "cycle", "random-d-regular", "gnp", "random-edges", "union-of-components",
         "two-cycle", "diameter-blowup")


def generate(kind, params, seed=0):
    """Build an instance by name; `params` is a dict of keyword arguments."""
    params = dict(params or {})
    if kind == "path":
        return path(int(params["n"]))
    if kind == "cycle":
        return cycle(int(params["n"]))
    if kind in ("random-d-regular", "expander"):
        return random_regular(int(params["n"]), int(params.get("d", 8)), seed)
    if kind == "gnp":
        return gnp(int(params["n"]), float(params["p"]), seed)
    if kind == "random-edges":
        return random_edges(int(params["n"]), int(params["m"]), seed)
    if kind == "union-of-components":
        parts = [generate(p["kind"], p.get("params", {}), seed + j)
                 for j, p in enumerate(params["parts"])]
        singles = int(params.get("singletons", 0))
        if singles:
            parts.append(MultiGraph(singles))
        g = union(parts)
        return shuffle_ids(g, seed) if params.get("shuffle", True) else g
    if kind == "two-cycle":
        return two_cycle_instance(int(params["n"]), params.get("variant", "one"), seed)
    if kind == "diameter-blowup":
        return diameter_blowup_graph(int(params["n"]), float(params.get("width_exp", 1.5)))[0]
    raise ContractError(f"unknown generator kind {kind!r}")
