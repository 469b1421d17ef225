"""Normalized Laplacians, spectral gaps, conductance and the sampling experiments.

Degrees count a loop once. Each edge contributes weight 1 to its pair, so a
parallel edge doubles the weight.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse import csgraph
from scipy.sparse.linalg import LinearOperator, eigsh

from .graph import MultiGraph
from .pram import ContractError

DENSE_LIMIT = 2000


def adjacency(G):
    """Symmetric sparse weight matrix on ids 1..n (row/col 0 dropped)."""
    e = G.edges
    n = G.n
    u = e.u - 1
    v = e.v - 1
    loop = u == v
    rows = np.concatenate((u[~loop], v[~loop], u[loop]))
    cols = np.concatenate((v[~loop], u[~loop], u[loop]))
    W = sp.coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n)).tocsr()
    W.sum_duplicates()
    return W


def normalized_laplacian(G, dense=None):
    """L = I - D^-1/2 W D^-1/2, with zero rows and columns for isolated vertices."""
    W = adjacency(G)
    deg = np.asarray(W.sum(axis=1)).ravel()
    inv = np.zeros_like(deg)
    nz = deg > 0
    inv[nz] = 1.0 / np.sqrt(deg[nz])
    Dm = sp.diags(inv)
    L = sp.diags(nz.astype(float)) - Dm @ W @ Dm
    if dense is None:
        dense = G.n <= DENSE_LIMIT
    return L.toarray() if dense else L.tocsr()


def components(G):
    """Vertex lists (1-based) of the connected components."""
    if G.n == 0:
        return []
    k, lab = csgraph.connected_components(adjacency(G), directed=False)
    order = np.argsort(lab, kind="stable")
    cuts = np.flatnonzero(np.diff(lab[order])) + 1
    return [part + 1 for part in np.split(order, cuts)]


def induced(G, vertices):
    """Subgraph on `vertices`, relabelled 1..len(vertices) in the given order."""
    vertices = np.asarray(vertices, dtype=np.int64)
    new = np.zeros(G.n + 1, dtype=np.int64)
    new[vertices] = np.arange(1, len(vertices) + 1)
    e = G.edges
    keep = (new[e.u] > 0) & (new[e.v] > 0)
    return MultiGraph(len(vertices), new[e.u[keep]], new[e.v[keep]])


def _gap_dense(L):
    vals = scipy.linalg.eigh(L, eigvals_only=True, subset_by_index=[0, 1])
    return float(vals[1]), 0.0


def _gap_iterative(G, tol=1e-10):
    """Second eigenvalue of a connected component via the largest of 2I - L off sqrt(deg)."""
    L = normalized_laplacian(G, dense=False)
    W = adjacency(G)
    q = np.sqrt(np.asarray(W.sum(axis=1)).ravel())
    q /= np.linalg.norm(q)
    n = L.shape[0]

    def mv(x):
        x = np.ravel(x)
        x = x - q * (q @ x)
        y = 2.0 * x - L @ x
        return y - q * (q @ y)

    op = LinearOperator((n, n), matvec=mv, dtype=float)
    x0 = np.random.default_rng(0).standard_normal(n)
    mu, vec = eigsh(op, k=1, which="LA", tol=tol, v0=x0, maxiter=20 * n)
    lam = 2.0 - float(mu[0])
    x = vec[:, 0]
    resid = float(np.linalg.norm(L @ x - lam * x))
    return lam, resid


def component_gap(G):
    """λ1 of a connected graph with at least two vertices. Returns (gap, residual)."""
    if G.n <= DENSE_LIMIT:
        return _gap_dense(normalized_laplacian(G, dense=True))
    return _gap_iterative(G)


def spectral_gap(G):
    """Per-component λ1 for components of two or more vertices, and their minimum.

    Returns {"components": [{vertices, edges, gap, residual}], "min_gap": float or None}.
    """
    rows = []
    for comp in components(G):
        if len(comp) < 2:
            continue
        H = induced(G, comp)
        gap, resid = component_gap(H)
        rows.append({"vertices": int(len(comp)), "edges": int(H.m), "gap": gap, "residual": resid,
                     "min_vertex": int(comp.min())})
    gaps = [r["gap"] for r in rows]
    return {"components": rows, "min_gap": min(gaps) if gaps else None}


def laplacian_eigenvalues(G):
    return np.linalg.eigvalsh(normalized_laplacian(G, dense=True))


def conductance_bruteforce(G, limit=20):
    """min over S with vol(S) <= vol(V)/2 of cut(S)/vol(S), by enumerating subsets."""
    n = G.n
    if n > limit:
        raise ContractError(f"brute-force conductance is limited to {limit} vertices")
    W = adjacency(G).toarray()
    deg = W.sum(axis=1)
    offdiag = W - np.diag(np.diag(W))
    total = deg.sum()
    best = math.inf
    masks = np.array(list(itertools.product((False, True), repeat=n)), dtype=bool)[1:]
    for S in masks:
        vol = deg[S].sum()
        if vol == 0 or vol > total / 2:
            continue
        cut = offdiag[np.ix_(S, ~S)].sum()
        best = min(best, cut / vol)
    return best


def sample_edges(G, p, rng):
    keep = rng.random(G.m) < p
    e = G.edges
    return MultiGraph(G.n, e.u[keep], e.v[keep])


def concentration_bound(n, delta, p, deg):
    return 13.0 * math.sqrt(math.log(4 * n / delta) / (p * deg))


def sampling_concentration_experiment(G, p, trials, delta, seed=0, C=1.0):
    """Sample every edge at p, `trials` times, and compare per-component gaps.

    A trial is within the bound when, for every component of G (two or more
    vertices), the gap of the sampled graph restricted to that component's
    vertices differs from the original gap by at most the concentration bound.
    A restriction that falls apart has gap 0.
    """
    comps = [c for c in components(G) if len(c) >= 2]
    deg = G.degrees()[1:]
    dmin = int(deg[deg > 0].min()) if (deg > 0).any() else 0
    bound = concentration_bound(G.n, delta, p, dmin) if dmin else math.inf
    precondition = p * dmin >= C * math.log(max(2, G.n))
    base = [component_gap(induced(G, c))[0] for c in comps]
    rng = np.random.default_rng(seed)
    within = 0
    max_dev = 0.0
    for _ in range(trials):
        S = sample_edges(G, p, rng)
        worst = 0.0
        for c, lam in zip(comps, base):
            H = induced(S, c)
            if csgraph.connected_components(adjacency(H), directed=False)[0] > 1:
                mu = 0.0
            else:
                mu = component_gap(H)[0]
            worst = max(worst, abs(lam - mu))
        max_dev = max(max_dev, worst)
        within += worst <= bound
    return {"n": int(G.n), "p": p, "delta": delta, "bound": bound, "max_dev": max_dev,
            "frac_within": within / trials if trials else 1.0, "trials": trials,
            "seeds": [seed], "precondition_ok": bool(precondition), "gaps": base}


def _bfs(sub, sources):
    return csgraph.shortest_path(sub, method="D", unweighted=True, indices=sources)


def _ecc(sub, sources, chunk=256):
    out = np.zeros(len(sources), dtype=np.int64)
    for s in range(0, len(sources), chunk):
        out[s:s + chunk] = _bfs(sub, sources[s:s + chunk]).max(axis=1)
    return out


def _diameter_ifub(sub):
    """Exact diameter of a connected graph (iFUB from a 4-sweep centre)."""
    # 4-sweep: two double sweeps pick a vertex near the middle of a long path
    d = _bfs(sub, [0])[0]
    a = int(np.argmax(d))
    da = _bfs(sub, [a])[0]
    b = int(np.argmax(da))
    db = _bfs(sub, [b])[0]
    ecc_a = int(da.max())
    mid = int(np.flatnonzero((da == ecc_a // 2) & (da + db == ecc_a))[0])
    levels = _bfs(sub, [mid])[0].astype(np.int64)
    lb = max(ecc_a, int(levels.max()))
    for i in range(int(levels.max()), 0, -1):
        if lb >= 2 * i:
            break
        fringe = np.flatnonzero(levels == i)
        lb = max(lb, int(_ecc(sub, fringe).max()))
        if lb > 2 * (i - 1):
            break
    return lb


def component_diameters(G):
    """Exact hop diameter of every component, as (min vertex, size, diameter)."""
    A = adjacency(G)
    out = []
    for comp in components(G):
        if len(comp) == 1:
            out.append((int(comp[0]), 1, 0))
            continue
        sub = A[comp - 1][:, comp - 1]
        out.append((int(comp.min()), int(len(comp)), _diameter_ifub(sub)))
    return out


def diameter(G):
    return max((d for _, _, d in component_diameters(G)), default=0)


def contract_pair(G, a, b):
    """Merge vertex b into a (edges between them become loops); ids above b shift down."""
    e = G.edges
    u = np.where(e.u == b, a, e.u)
    v = np.where(e.v == b, a, e.v)
    u = u - (u > b)
    v = v - (v > b)
    return MultiGraph(G.n - 1, u, v)
