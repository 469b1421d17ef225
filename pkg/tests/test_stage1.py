import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pramconn.generators import cycle, path, shuffle_ids
from pramconn.graph import EdgeSet, ParentForest, alter, tree_heights
from pramconn.oracle import oracle_components
from pramconn.pram import ConstantProfile, StructuralViolation
from pramconn.stage1 import extract, filter_edges, matching, reduce_graph, reverse

from conftest import edges, forest_from, make_run


# reference re-simulation of matching/filter with plain python loops, first-writer
# arbitration and the same named random streams as the library

def ref_matching(E, p, run, q_del):
    ok = [(max(u, v), min(u, v)) for u, v in E if p[u] == u and p[v] == v and u != v]
    if not ok:
        return []
    VE = sorted({x for e in ok for x in e})
    before = {x: p[x] for x in VE}
    kept = [False] * len(ok)
    seen = set()
    for i, (a, _) in enumerate(ok):
        if a not in seen:
            seen.add(a)
            kept[i] = True
    present = {a for a, _ in ok} | {b for (_, b), k in zip(ok, kept) if k}
    hooked = set()
    for a, b in ok:
        if b not in present and b not in hooked:
            hooked.add(b)
            p[b] = a
    indeg = {}
    for (a, b), k in zip(ok, kept):
        if k:
            indeg[b] = indeg.get(b, 0) + 1
    live = [k and indeg.get(a, 0) <= 1 for (a, _), k in zip(ok, kept)]
    indeg = {}
    for (a, b), lv in zip(ok, live):
        if lv:
            indeg[b] = indeg.get(b, 0) + 1
    gone = set()
    for i, (a, b) in enumerate(ok):
        if live[i] and indeg.get(b, 0) > 1:
            p[a] = b
            gone.add(a)
    live = [lv and not (indeg.get(b, 0) > 1) and a not in gone and b not in gone
            for (a, b), lv in zip(ok, live)]
    idx = [i for i, lv in enumerate(live) if lv]
    if idx:
        drop = run.rng("matching").random(len(idx)) < q_del
        for i, d in zip(idx, drop):
            if d:
                live[i] = False
    idx = [i for i, lv in enumerate(live) if lv]
    ends = {}
    for i in idx:
        for x in ok[i]:
            ends[x] = ends.get(x, 0) + 1
    for i in idx:
        a, b = ok[i]
        if ends[a] == 1 and ends[b] == 1:
            p[b] = a
    old = list(p)
    for x in VE:
        p[x] = old[old[x]]
    return [x for x in VE if p[x] != before[x]]


def ref_filter(pairs, k, p, run, q_match, q_filter):
    E = list(pairs)
    logs = []
    for _ in range(k + 1):
        if not E:
            logs.append([])
            continue
        logs.append(ref_matching(E, p, run, q_match))
        E = [(p[u], p[v]) for u, v in E if p[u] != p[v]]
        if E:
            drop = run.rng("filter").random(len(E)) < q_filter
            E = [e for e, d in zip(E, drop) if not d]
    for j in range(k, -1, -1):
        old = list(p)
        for x in logs[j]:
            p[x] = old[old[x]]
    return sorted({x for e in E for x in e})


def test_matching_empty():
    f = ParentForest(3)
    matching(EdgeSet.empty(), f, make_run(3))
    assert f.parent.tolist() == [0, 1, 2, 3]


def test_matching_loop_ignored():
    f = ParentForest(1)
    matching(edges([(1, 1)]), f, make_run(1))
    assert f.parent.tolist() == [0, 1]


def test_matching_single_edge():
    drops = []
    for seed in range(20):
        f = ParentForest(2)
        matching(edges([(1, 2)]), f, make_run(2, seed))
        roots = int(f.roots_mask()[1:].sum())
        assert roots in (1, 2)
        if roots == 1:
            # the arc runs 2 -> 1, so the head 1 is linked under the tail
            assert f.parent[1:].tolist() == [2, 2]
        drops.append(2 - roots)
    assert 0 < sum(drops) < 20


def test_matching_leaves_e_untouched():
    E = edges([(1, 2), (2, 3), (3, 1)])
    before = E.pairs()
    matching(E, ParentForest(3), make_run(3))
    assert E.pairs() == before


@st.composite
def small_graphs(draw):
    n = draw(st.integers(2, 25))
    m = draw(st.integers(0, 50))
    pairs = [(draw(st.integers(1, n)), draw(st.integers(1, n))) for _ in range(m)]
    return n, pairs


@given(small_graphs(), st.integers(0, 10**6),
       st.sampled_from(["first-writer", "last-writer", "seeded-random"]))
def test_matching_roots_stay_roots_or_children_of_roots(g, seed, policy):
    n, pairs = g
    f = ParentForest(n)
    matching(edges(pairs), f, make_run(n, seed, policy))
    p = f.parent
    assert np.all(p[p[1:]] == p[p[p[1:]]])
    assert np.all(p[p[1:]] == p[1:][p[p[1:]] == p[1:]])


@given(small_graphs(), st.integers(0, 10**6))
def test_matching_is_component_safe(g, seed):
    n, pairs = g
    f = ParentForest(n)
    matching(edges(pairs), f, make_run(n, seed))
    from pramconn.graph import MultiGraph
    t = oracle_components(MultiGraph.from_pairs(n, pairs))
    assert np.all(t[f.find()[1:]] == t[1:])


def test_matching_matches_reference_on_path():
    G = shuffle_ids(path(300), 4)
    for seed in range(5):
        f = ParentForest(300)
        changed = matching(G.edges, f, make_run(300, seed))
        p = list(range(301))
        ref = ref_matching(G.edges.pairs(), p, make_run(300, seed), 0.5)
        assert f.parent.tolist() == p
        assert changed.tolist() == ref


def test_filter_empty_and_loop():
    assert len(filter_edges(EdgeSet.empty(), 2, ParentForest(2), make_run(2))) == 0
    assert len(filter_edges(edges([(1, 1)]), 2, ParentForest(2), make_run(2))) == 0


def test_filter_path_matches_resimulation():
    G = path(1000)
    for seed in (0, 1, 2):
        f = ParentForest(1000)
        got = filter_edges(G.edges, 3, f, make_run(1000, seed))
        p = list(range(1001))
        ref = ref_filter(G.edges.pairs(), 3, p, make_run(1000, seed), 0.5, 1e-4)
        assert got.tolist() == ref
        assert f.parent.tolist() == p
        assert len(got) < 1000


@given(small_graphs(), st.integers(0, 10**6), st.integers(0, 3))
def test_filter_height_grows_by_at_most_one(g, seed, k):
    n, pairs = g
    f = ParentForest(n)
    run = make_run(n, seed)
    E = edges(pairs)
    # start from a forest of height <= 1 produced by one matching
    matching(E, f, run)
    alter(E, f)
    h = max(tree_heights(f).values())
    filter_edges(E, k, f, run)
    assert max(tree_heights(f).values()) <= h + 1


def test_reverse_examples():
    f = forest_from([1, 1])
    reverse([], EdgeSet.empty(), f, make_run(2))
    assert f.parent[1:].tolist() == [1, 1]
    reverse([2], EdgeSet.empty(), f, make_run(2))
    assert f.parent[1:].tolist() == [2, 2]
    f = forest_from([1, 1, 1])
    E = edges([(1, 1)])
    reverse([2, 3], E, f, make_run(3))
    assert f.parent[1:].tolist() == [2, 2, 2]


def test_extract_precondition():
    f = forest_from([1, 1, 3])
    with pytest.raises(StructuralViolation):
        extract(edges([(1, 3)]), 1, f, make_run(3))
    with pytest.raises(StructuralViolation):
        extract(edges([(2, 3)]), 1, f, make_run(3))


def test_extract_single_edge():
    outcomes = set()
    for seed in range(20):
        f = ParentForest(2)
        E = edges([(1, 2)])
        extract(E, 0, f, make_run(2, seed))
        assert f.is_flat()
        if f.parent[1] == f.parent[2]:
            outcomes.add("merged")
            assert len(E) == 0
        else:
            outcomes.add("apart")
    assert "merged" in outcomes


def test_extract_disjoint_edges():
    pairs = [(2 * i + 1, 2 * i + 2) for i in range(100)]
    from pramconn.graph import MultiGraph
    G = MultiGraph.from_pairs(200, pairs)
    truth = oracle_components(G)
    for seed in range(5):
        f = ParentForest(200)
        E = edges(pairs)
        extract(E, 2, f, make_run(200, seed))
        assert f.is_flat()
        assert int(f.roots_mask()[1:].sum()) <= 200
        assert np.all(truth[f.parent[1:]] == truth[1:])
        assert np.all(f.parent[E.u] == E.u) and np.all(f.parent[E.v] == E.v)


def test_reduce_empty():
    f = ParentForest(4)
    reduce_graph(np.arange(1, 5), EdgeSet.empty(), 2, f, make_run(4))
    assert f.parent.tolist() == [0, 1, 2, 3, 4]


def test_reduce_two_k2_contract_for_every_seed():
    prof = ConstantProfile.paper()
    for seed in range(100):
        f = ParentForest(4)
        E = edges([(1, 2), (3, 4)])
        run = make_run(4, seed, profile=prof)
        reduce_graph(np.arange(1, 5), E, run.profile.reduce_outer_k(4), f, run)
        r = f.find()
        assert r[1] == r[2] and r[3] == r[4] and r[1] != r[3]
        assert len(E) == 0


def test_reduce_two_k2_desk_profile_rarely_leaves_an_edge():
    # desk constants give each K2 about 7 matching attempts, so ~2^-6 of runs keep an edge
    left = 0
    for seed in range(200):
        f = ParentForest(4)
        E = edges([(1, 2), (3, 4)])
        run = make_run(4, seed)
        reduce_graph(np.arange(1, 5), E, run.profile.reduce_outer_k(4), f, run)
        assert f.is_flat() and np.all(f.parent[E.u] == E.u)
        left += len(E) > 0
    assert left <= 10


def test_reduce_cycle_shrink_is_safe():
    G = shuffle_ids(cycle(10000), 11)
    truth = oracle_components(G)
    left = []
    for seed in range(20):
        f = ParentForest(G.n)
        E = G.edges.fresh_copy()
        run = make_run(G.n, seed)
        reduce_graph(np.arange(1, G.n + 1), E, run.profile.reduce_outer_k(G.n), f, run)
        assert f.is_flat()
        assert np.all(f.parent[E.u] == E.u) and np.all(f.parent[E.v] == E.v)
        assert np.all(truth[f.parent[1:]] == truth[1:])
        left.append(len(E.vertices()))
    assert np.mean(left) < 2000


def test_matching_shrink_rate_on_long_path():
    G = shuffle_ids(path(10**5), 0)
    rates = []
    for seed in range(50):
        f = ParentForest(G.n)
        matching(G.edges, f, make_run(G.n, seed))
        rates.append(1 - f.roots_mask()[1:].sum() / G.n)
    assert np.mean(rates) >= 1e-3


def test_stage1_work_is_linear():
    xs, ys = [], []
    for e in range(10, 16):
        G = shuffle_ids(cycle(2**e), e)
        f = ParentForest(G.n)
        run = make_run(G.n, 0)
        E = G.edges.fresh_copy()
        reduce_graph(np.arange(1, G.n + 1), E, run.profile.reduce_outer_k(G.n), f, run)
        xs.append(G.n + G.m)
        ys.append(run.ledger.breakdown("stage1/")[1])
    slope = np.polyfit(np.log(xs), np.log(ys), 1)[0]
    assert 0.9 <= slope <= 1.1
