"""Instance corpus and the measurement sweeps behind the acceptance checks.

Every function returns plain dicts (JSON rows) and takes explicit seeds, so
any row can be replayed.
"""

from __future__ import annotations

import math

import numpy as np

from .generators import (
    cycle, diameter_blowup_graph, generate, path, random_regular, union,
)
from .graph import MultiGraph, ParentForest
from .oracle import canonical_labels, first_mismatch, oracle_components
from .orchestrator import connectivity
from .pram import ConstantProfile, Run, WritePolicy
from .spectral import component_diameters, sample_edges, sampling_concentration_experiment
from .stage3 import ltz_connectivity

POLICIES = ("first-writer", "last-writer", "seeded-random")


def _u(*parts, singletons=0):
    return ("union-of-components", {"parts": [{"kind": k, "params": p} for k, p in parts],
                                    "singletons": singletons})


# (name, kind, params, generator seed)
CORPUS_SPEC = [
    ("single-vertex", "path", {"n": 1}, 0),
    ("edgeless-50", "union-of-components", {"parts": [], "singletons": 50}, 0),
    ("path-2", "path", {"n": 2}, 0),
    ("path-64", "path", {"n": 64}, 0),
    ("path-1000", "path", {"n": 1000}, 0),
    ("path-8000", "path", {"n": 8000}, 0),
    ("loop-1", "cycle", {"n": 1}, 0),
    ("cycle-2", "cycle", {"n": 2}, 0),
    ("cycle-3", "cycle", {"n": 3}, 0),
    ("cycle-100", "cycle", {"n": 100}, 0),
    ("cycle-2048", "cycle", {"n": 2048}, 0),
    ("cycle-10000", "cycle", {"n": 10000}, 0),
    ("expander-64-3", "random-d-regular", {"n": 64, "d": 4}, 1),
    ("expander-512-8", "random-d-regular", {"n": 512, "d": 8}, 2),
    ("expander-2048-4", "random-d-regular", {"n": 2048, "d": 4}, 3),
    ("expander-4096-16", "random-d-regular", {"n": 4096, "d": 16}, 4),
    ("gnp-100-dense", "gnp", {"n": 100, "p": 0.2}, 5),
    ("gnp-1000-sub", "gnp", {"n": 1000, "p": 0.0008}, 6),
    ("gnp-2000-near", "gnp", {"n": 2000, "p": 0.001}, 7),
    ("gnp-3000-super", "gnp", {"n": 3000, "p": 0.002}, 8),
    ("two-cycle-2048-one", "two-cycle", {"n": 2048, "variant": "one"}, 9),
    ("two-cycle-2048-two", "two-cycle", {"n": 2048, "variant": "two"}, 10),
    ("two-cycle-512-one", "two-cycle", {"n": 512, "variant": "one"}, 11),
    ("two-cycle-512-two", "two-cycle", {"n": 512, "variant": "two"}, 12),
    ("blowup-1000", "diameter-blowup", {"n": 1000}, 0),
    ("blowup-4000", "diameter-blowup", {"n": 4000}, 0),
    ("blowup-10000", "diameter-blowup", {"n": 10000}, 0),
    ("mixed-10k", *_u(*[("random-d-regular", {"n": 2000, "d": 8})] * 4,
                      *[("cycle", {"n": 900})] * 2, singletons=100), 13),
    ("paths-50x40", *_u(*[("path", {"n": 40})] * 50), 14),
    ("cycles-mixed", *_u(("cycle", {"n": 5}), ("cycle", {"n": 50}), ("cycle", {"n": 500}),
                         ("cycle", {"n": 2000}), ("cycle", {"n": 1})), 15),
    ("random-multi-200", "random-edges", {"n": 200, "m": 3000}, 16),
    ("random-multi-5000-sparse", "random-edges", {"n": 5000, "m": 2500}, 17),
    ("random-multi-8000", "random-edges", {"n": 8000, "m": 16000}, 18),
    ("path-shuffled-5000", *_u(("path", {"n": 5000})), 19),
    ("expander-8000-6", "random-d-regular", {"n": 8000, "d": 6}, 20),
    ("gnp-5000", "gnp", {"n": 5000, "p": 0.001}, 21),
    ("expanders-and-paths", *_u(("random-d-regular", {"n": 1000, "d": 6}),
                                ("path", {"n": 3000}), ("random-d-regular", {"n": 500, "d": 3 * 2})), 22),
    ("blowup-mixed", *_u(("diameter-blowup", {"n": 2000}), ("two-cycle", {"n": 1000, "variant": "two"})), 23),
    ("cycle-stars", *_u(*[("cycle", {"n": 3})] * 300, ("random-d-regular", {"n": 100, "d": 50})), 24),
    ("large-100k", *_u(*[("random-d-regular", {"n": 20000, "d": 12})] * 4,
                       *[("cycle", {"n": 10000})] * 2), 25),
]


def corpus(names=None):
    """[(name, MultiGraph)] for the fixed instance corpus."""
    out = []
    for name, kind, params, seed in CORPUS_SPEC:
        if names is None or name in names:
            out.append((name, generate(kind, params, seed)))
    return out


def run_and_check(G, seed, profile="desk", policy="first-writer", truth=None, monitor=None):
    """One pipeline run compared with the oracle. Returns a JSON row."""
    prof = ConstantProfile.named(profile) if isinstance(profile, str) else profile
    pol = WritePolicy(policy, seed)
    forest, rep = connectivity(G, prof, seed, pol, monitor=monitor)
    if truth is None:
        truth = oracle_components(G)
    bad = first_mismatch(forest.find(), truth)
    return {"seed": seed, "profile": prof.name, "policy": pol.mode, "ok": bad is None,
            "first_mismatch": bad, "phases_run": rep["phases_run"], "rounds": rep["rounds"],
            "work": rep["work"], "components": rep["components"],
            "remain_edges": rep["remain_edges"], "g_prime_vertices": rep["g_prime_vertices"],
            "digest": forest.digest()}


def family(kind, n, seed=0):
    if kind == "cycle":
        return cycle(n)
    if kind == "path":
        return path(n)
    if kind == "expander":
        return random_regular(n, 8, seed)
    raise ValueError(f"unknown family {kind!r}")


def fit_linear(x, y):
    """Fit y = a*x + c minimizing relative residuals, plus a quadratic-term t statistic.

    Rows are weighted by 1/y so that small and large instances count alike.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    w = 1.0 / y
    A = np.column_stack((x, np.ones_like(x)))
    (a, c), *_ = np.linalg.lstsq(A * w[:, None], y * w, rcond=None)
    rel = np.abs(y - (a * x + c)) / y
    # quadratic model on scaled x keeps the normal equations well conditioned
    s = x / x.max()
    Q = np.column_stack((s * s, s, np.ones_like(s))) * w[:, None]
    coef, *_ = np.linalg.lstsq(Q, y * w, rcond=None)
    r = y * w - Q @ coef
    dof = max(1, len(x) - 3)
    cov = (float(r @ r) / dof) * np.linalg.pinv(Q.T @ Q)
    se = math.sqrt(max(cov[0, 0], 0.0))
    t = float(coef[0] / se) if se > 0 else (0.0 if coef[0] == 0 else math.inf)
    return {"a": float(a), "c": float(c), "max_rel_residual": float(rel.max()),
            "rms_rel_residual": float(np.sqrt(np.mean(rel ** 2))), "quad_t": t, "dof": dof}


def work_sweep(kinds=("cycle", "expander"), exps=range(10, 18), seeds=(0,), profile="desk"):
    """Charged work for n = 2^e across families; one row per (kind, n, seed)."""
    rows = []
    for kind in kinds:
        for e in exps:
            n = 1 << e
            G = family(kind, n, seed=e)
            for s in seeds:
                _, rep = connectivity(G, ConstantProfile.named(profile), s, WritePolicy("seeded-random", s))
                rows.append({"family": kind, "n": n, "m": G.m, "seed": s,
                             "work": rep["work"], "rounds": rep["rounds"], "phases_run": rep["phases_run"]})
    return rows


def summarize_work(rows):
    out = {}
    for kind in sorted({r["family"] for r in rows}):
        sel = [r for r in rows if r["family"] == kind]
        size = [r["n"] + r["m"] for r in sel]
        out[kind] = fit_linear(size, [r["work"] for r in sel])
    return out


def ltz_path_rounds(k, seed=0, profile="desk"):
    """Rounds charged by the round-synchronous solver alone on P_{2^k}."""
    G = path(1 << k)
    prof = ConstantProfile.named(profile)
    run = Run(seed, prof, WritePolicy("seeded-random", seed), n=G.n)
    forest = ParentForest(G.n, prof.beta1(G.n))
    ltz_connectivity(G.edges.fresh_copy(), forest, None, run, vertices=np.arange(1, G.n + 1))
    ok = bool(np.array_equal(canonical_labels(forest.find()), oracle_components(G)))
    return {"family": "ltz-path", "k": k, "n": G.n, "seed": seed, "rounds": run.ledger.rounds,
            "work": run.ledger.work, "ok": ok}


def round_sweep(kinds=("ltz-path", "expander", "cycle"), exps=range(10, 18), seeds=(0,),
                profile="desk"):
    rows = []
    for kind in kinds:
        for e in exps:
            for s in seeds:
                if kind == "ltz-path":
                    rows.append(ltz_path_rounds(e, s, profile))
                    continue
                G = family(kind, 1 << e, seed=e)
                _, rep = connectivity(G, ConstantProfile.named(profile), s, WritePolicy("seeded-random", s))
                rows.append({"family": kind, "k": e, "n": G.n, "seed": s, "rounds": rep["rounds"],
                             "work": rep["work"], "phases_run": rep["phases_run"]})
    return rows


def mean_by(rows, key, value):
    groups = {}
    for r in rows:
        groups.setdefault(r[key], []).append(r[value])
    ks = sorted(groups)
    return np.array(ks, dtype=float), np.array([np.mean(groups[k]) for k in ks])


def sampling_gap_rows(ns=(512, 1024, 2048), d=64, p=0.5, delta=0.1, trials=100, seed=0,
                      copies=1):
    """Concentration of the per-component gap under edge sampling."""
    rows = []
    for n in ns:
        parts = [random_regular(n, d, seed + n + j) for j in range(copies)]
        G = parts[0] if copies == 1 else union(parts)
        row = sampling_concentration_experiment(G, p, trials, delta, seed=seed + n)
        row.update({"d": d, "copies": copies})
        row.pop("gaps", None)
        rows.append(row)
    return rows


def diameter_blowup_rows(n_target=10000, seeds=range(20), width_exp=1.5, factor=50):
    """Largest component diameter after keeping each edge w.p. 1/ceil(log2 n)."""
    G, info = diameter_blowup_graph(n_target, width_exp)
    base = max(d for _, _, d in component_diameters(G))
    L = info["L"]
    p = 1.0 / L
    rows = []
    for s in seeds:
        S = sample_edges(G, p, np.random.default_rng(s))
        comps = component_diameters(S)
        dmax = max(d for _, _, d in comps)
        rows.append({"n": G.n, "L": L, "k": info["k"], "width": info["width"], "p": p, "seed": s,
                     "original_diameter": base, "sampled_max_diameter": dmax,
                     "largest_component": max(c for _, c, _ in comps),
                     "ratio": dmax / base if base else math.inf,
                     "exceeds": dmax > factor * base,
                     "asymptotic_floor": G.n / L ** 5, "meets_floor": dmax >= G.n / L ** 5})
    return rows


def remain_rows(instances, seeds=range(50), profile="desk"):
    """|E_remain| against 3 |V(G')| / p on every run that reached Remain."""
    prof = ConstantProfile.named(profile) if isinstance(profile, str) else profile
    rows = []
    for name, G in instances:
        for s in seeds:
            _, rep = connectivity(G, prof, s, WritePolicy("seeded-random", s))
            if rep["remain_edges"] is None:
                continue
            p = prof.stage3_p(max(2, G.n))
            rows.append({"instance": name, "seed": s, "remain_edges": rep["remain_edges"],
                         "g_prime_vertices": rep["g_prime_vertices"],
                         "bound": 3 * rep["g_prime_vertices"] / p,
                         "remain_phase": rep["remain_phase"]})
    return rows


def multigraph_from_rows(n, pairs):
    return MultiGraph.from_pairs(n, pairs)
