"""Phase-doubling driver: Connectivity, Interweave and Remain."""

from __future__ import annotations

import math

import numpy as np

from .aux import AuxiliaryArray, build_auxiliary, low_edge_extract
from .graph import EdgeSet, ParentForest, alter, flatten, shortcut, vertices_of
from .pram import (
    RetryExhausted,
    Run,
    budgeted_instances,
    loglog,
    perfect_hash_dedup,
)
from .stage1 import matching, reduce_graph, reverse
from .stage2 import Skeleton, expand_maxlink, increase_sparse
from .stage3 import ltz_connectivity

__all__ = [
    "AuxiliaryArray", "ContractedGraph", "PipelineState", "build_auxiliary",
    "connectivity", "interweave", "low_edge_extract", "remain",
]


class ContractedGraph:
    """G': the graph left after Stage 1. Its edge array is only altered by Remain."""

    def __init__(self, n, edges):
        self.n = n
        self.edges = edges
        self.vertices = vertices_of(edges)

    @property
    def m(self):
        return len(self.edges)


class PipelineState:
    """Everything a phase reads besides the forest."""

    def __init__(self, Gp, H1, H2, aux, m_input):
        self.Gp = Gp
        self.H1 = H1
        self.H2 = H2
        self.aux = aux
        self.m_input = m_input
        self.remain_edges = None
        self.remain_phase = None
        self.failed_phases = []
        self.active_history = []


def _sample_by_origin(edges, m_input, prob, rng):
    """Keep each edge iff its origin id is marked in a mask drawn over all input ids."""
    mask = rng.random(max(m_input, 1)) < prob
    keep = mask[edges.oid]
    return EdgeSet(edges.u[keep], edges.v[keep], edges.oid[keep]), mask


def _edges_between_roots(E, forest):
    p = forest.parent
    return (p[E.u] == E.u) & (p[E.v] == E.v) & (E.u != E.v)


def _refresh_active(state, forest, E_filter, Ep):
    """Roots still joined to another root by a filter edge or an extracted edge."""
    act = forest.active
    act[:] = False
    for E in (E_filter, Ep):
        if len(E):
            ok = _edges_between_roots(E, forest)
            act[E.u[ok]] = True
            act[E.v[ok]] = True
    state.active_history.append(int(act.sum()))


def _contract_h1(state, b, forest, run):
    """Interweave steps 2-3 on the current forest and H1 (mutated in place)."""
    prof = run.profile
    Gp = state.Gp
    H1 = state.H1
    increase_sparse(Gp, H1, state.H2, b, forest, run, state.aux)
    H = Skeleton(vertices_of(H1), H1)
    for _ in range(prof.densify_rounds(b)):
        if not np.any(H1.u != H1.v):
            run.charge("orchestrator/h1", 12, 0)
            continue
        expand_maxlink(H, forest, run, keep_loops=True, label="orchestrator/h1")
    ltz_connectivity(H1, forest, prof.truncated_ltz_rounds(run.n), run,
                     vertices=H.V, keep_loops=True)
    alter(H1, forest, keep_loops=True, run=run, label="orchestrator/h1")


def interweave(Gp, H1, H2, E_filter, i, forest, state, run):
    """One phase under the guess b_i. Returns (E_filter, done)."""
    prof = run.profile
    n = run.n
    label = "orchestrator/interweave"
    b = prof.phase_b(n, i)
    VG = Gp.vertices
    state.H1 = H1
    state.H2 = H2

    # 1: remember the forest and H1
    saved = forest.save()
    saved_h1 = H1.copy()
    run.charge(label, 1, len(VG) + len(H1))

    # 2-3 under budgeted parallel instances
    def task(sub):
        forest.restore(saved)
        state.H1 = saved_h1.copy()
        _contract_h1(state, b, forest, sub)
        return forest.save(), state.H1, bool(np.all(state.H1.u == state.H1.v))

    def valid(res):
        # a truncated solve may stop early; a claimed completion must be flat on V(G')
        fstate, _, all_loops = res
        par = fstate["parent"]
        return not all_loops or bool(np.all(par[par[VG]] == par[VG]))

    copies = prof.boost_copies(n)
    work_budget = int(prof.boost_work_factor * (state.m_input + n))
    round_budget = int(prof.boost_round_factor * max(1.0, math.log2(b)))
    try:
        (fstate, h1_after, all_loops), _ = budgeted_instances(
            task, copies, round_budget, work_budget, valid, run, label="boost")
    except RetryExhausted as exc:
        state.failed_phases.append((i, exc.diagnostics))
        all_loops = False
    else:
        forest.restore(fstate)
        state.H1 = h1_after

    # 4
    if all_loops:
        run.checkpoint("orchestrator/h1", forest, flat_vertices=VG)
        remain(Gp, state.H1, forest, run, state)
        state.remain_phase = i
        return EdgeSet.empty(), True

    # 5: revert (charged by the size of the undo log)
    run.charge(label, 1, forest.changed_since(saved) + len(saved_h1))
    forest.restore(saved)
    H1 = saved_h1
    state.H1 = H1

    # 6
    rounds = prof.interweave_rounds(n, i)
    for j in range(rounds):
        if len(E_filter) == 0:
            run.charge(label, 11 * (rounds - j), 0)
            break
        matching(E_filter, forest, run)
        alter(E_filter, forest, run=run, label=label)
        run.charge(label, 1, E_filter.slots)
        if len(E_filter):
            drop = run.rng("filter").random(len(E_filter)) < prof.filter_delete_prob
            if drop.any():
                E_filter.keep(~drop, run, label)

    # 7
    for _ in range(i + 2 * loglog(n)):
        shortcut(VG, forest, run, label)

    # 8: G' edges whose first end's parent has no filter edge left
    in_filter = np.zeros(forest.n + 1, dtype=bool)
    in_filter[vertices_of(E_filter)] = True
    p = forest.parent
    depth = max(1, math.ceil(max(1.0, prof.table_log2(b))) + 1)
    Ep = low_edge_extract(state.aux, forest, lambda u: ~in_filter[p[u]], depth, run)
    alter(Ep, forest, run=run, label=label)

    # 9
    for j in range(rounds):
        if len(Ep) == 0:
            run.charge(label, 11 * (rounds - j), 0)
            break
        matching(Ep, forest, run)
        shortcut(VG, forest, run, label)
        alter(Ep, forest, run=run, label=label)

    # 10
    reverse(vertices_of(E_filter), H2, forest, run, scope=VG)
    run.charge(label, 1, len(E_filter) + len(Ep))
    _refresh_active(state, forest, E_filter, Ep)
    run.checkpoint("orchestrator/phase", forest, flat_vertices=VG)
    return E_filter, False


def remain(Gp, H1, forest, run, state=None):
    """Solve the G' edges that were not sampled into H1."""
    label = "orchestrator/remain"
    E = Gp.edges
    alter(E, forest, keep_loops=True, run=run, label=label)
    run.charge(label, 1, len(E) + len(H1))
    sampled = np.zeros(max(int(E.oid.max(initial=-1)), int(H1.oid.max(initial=-1))) + 2, dtype=bool)
    sampled[H1.oid[H1.oid >= 0]] = True
    rest = ~sampled[E.oid]
    a, c, idx = perfect_hash_dedup(E.u[rest], E.v[rest], run.ledger, run.n, run.prefix + label)
    Er = EdgeSet(a, c, E.oid[rest][idx])
    if state is not None:
        state.remain_edges = len(Er)
    ltz_connectivity(Er, forest, None, run, vertices=vertices_of(Er), keep_loops=False)


def prepare_phases(E, forest, run, m_input):
    """Connectivity steps 2-4 on the contracted edge set E (kept as E(G')).

    Builds the auxiliary array, samples H1 and H2 by origin id, copies
    E_filter and marks every vertex of G' active.
    """
    prof = run.profile
    Gp = ContractedGraph(forest.n, E)
    aux = build_auxiliary(Gp.edges, forest.n, run)
    p3 = prof.stage3_p(run.n)
    H1, _ = _sample_by_origin(Gp.edges, m_input, p3, run.rng("H1"))
    H2, _ = _sample_by_origin(Gp.edges, m_input, p3, run.rng("H2"))
    run.charge("orchestrator/sample", 1, 2 * len(Gp.edges))
    state = PipelineState(Gp, H1, H2, aux, m_input)
    forest.active[:] = False
    forest.active[Gp.vertices] = True
    return Gp, state, Gp.edges.copy()


def connectivity(G, profile=None, seed=0, policy=None, run=None, monitor=None, salt=""):
    """Label every vertex of G with the root of its component.

    Returns (forest, report). After the call, find() is constant on each
    component and differs between components; all trees are flat.
    """
    n = G.n
    if run is None:
        run = Run(seed, profile, policy, n=n, monitor=monitor, salt=salt)
    prof = run.profile
    forest = ParentForest(n, prof.beta1(run.n))
    V = np.arange(1, n + 1)
    run.charge("orchestrator/init", 1, n)
    report = {"phases_run": 0, "final_b": None, "components": 0,
              "rounds": 0, "work": 0, "remain_phase": None, "remain_edges": None,
              "g_prime_vertices": 0, "failed_phases": 0}

    E = G.edges.fresh_copy()
    E.keep(E.u != E.v)
    reduce_graph(V, E, prof.reduce_outer_k(run.n), forest, run)
    state = None
    if len(E):
        Gp, state, E_filter = prepare_phases(E, forest, run, G.m)
        report["g_prime_vertices"] = int(len(Gp.vertices))
        done = False
        for i in range(prof.phase_count(run.n)):
            phase = run.child(f"phase{i}", prefix=f"phase/{i}/")
            report["phases_run"] = i + 1
            report["final_b"] = prof.phase_b(run.n, i)
            E_filter, done = interweave(Gp, state.H1, state.H2, E_filter, i, forest, state, phase)
            if done:
                break
        if not done:
            # every phase guessed too small a gap; finish with the plain solve
            fb = run.child("fallback", prefix="fallback/")
            remain(Gp, state.H1, forest, fb, state)
        report["remain_phase"] = state.remain_phase
        report["remain_edges"] = state.remain_edges
        report["failed_phases"] = len(state.failed_phases)
    shortcut(V, forest, run, "orchestrator/final")
    flatten(V, forest, run, "orchestrator/final")
    run.checkpoint("orchestrator/final", forest, flat=True)
    report["components"] = int(np.count_nonzero(forest.roots_mask()[1:]))
    report["rounds"] = run.ledger.rounds
    report["work"] = run.ledger.work
    report["ledger"] = run.ledger
    report["state"] = state
    return forest, report
