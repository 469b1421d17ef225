import json
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pramconn import cli
from pramconn.edgelist import EdgeListError, format_edge_list, parse_edge_list
from pramconn.generators import (
    cycle, generate, gnp, path, random_edges, random_regular, two_cycle_instance, union,
)
from pramconn.graph import MultiGraph, ParentForest
from pramconn.oracle import bfs_components, first_mismatch, oracle_components
from pramconn.pram import ContractError, CostLedger
from pramconn.spectral import diameter


# oracle

def test_oracle_examples():
    assert oracle_components(MultiGraph(3)).tolist() == [0, 1, 2, 3]
    assert oracle_components(path(3)).tolist() == [0, 1, 1, 1]


def test_oracle_agrees_with_bfs():
    G = random_edges(60000, 10**5, 1)
    assert np.array_equal(oracle_components(G), bfs_components(G))


def test_first_mismatch_uses_canonical_labels():
    truth = oracle_components(path(3))
    assert first_mismatch(np.array([0, 3, 3, 3]), truth) is None
    assert first_mismatch(np.array([0, 1, 1, 3]), truth) == 3


# generators

def test_path_five():
    G = path(5)
    assert G.m == 4 and diameter(G) == 4


def test_small_cycles():
    assert cycle(1).edges.pairs() == [(1, 1)]
    assert cycle(2).edges.canonical() == [(1, 2), (1, 2)]


def test_regular_degrees_exact():
    for seed in range(3):
        G = random_regular(1024, 8, seed)
        assert np.all(G.degrees()[1:] == 8)
        assert not np.any(G.edges.u == G.edges.v)


def test_gnp_is_simple_and_near_expected():
    G = gnp(400, 0.05, 3)
    a = np.minimum(G.edges.u, G.edges.v)
    b = np.maximum(G.edges.u, G.edges.v)
    assert np.all(a < b) and len(set(zip(a.tolist(), b.tolist()))) == G.m
    assert abs(G.m - 0.05 * 400 * 399 / 2) < 5 * np.sqrt(0.05 * 400 * 399 / 2)


def test_union_components():
    G = union([random_regular(512, 8, 1), cycle(512)])
    assert len(set(oracle_components(G)[1:].tolist())) == 2


def test_two_cycle_variants():
    one = two_cycle_instance(4, "one")
    two = two_cycle_instance(4, "two")
    assert one.m == 4 and np.all(one.degrees()[1:] == 2)
    assert len(set(oracle_components(two)[1:].tolist())) == 2
    with pytest.raises(ContractError):
        two_cycle_instance(5, "two")
    for v, k in (("one", 1), ("two", 2)):
        G = two_cycle_instance(2048, v, 9)
        assert len(set(oracle_components(G)[1:].tolist())) == k


def test_generate_is_deterministic():
    for kind, params in (("random-d-regular", {"n": 100, "d": 4}), ("gnp", {"n": 100, "p": 0.1}),
                         ("two-cycle", {"n": 100, "variant": "two"}),
                         ("union-of-components", {"parts": [{"kind": "path", "params": {"n": 5}}],
                                                  "singletons": 3})):
        assert generate(kind, params, 4).edges.pairs() == generate(kind, params, 4).edges.pairs()
    with pytest.raises(ContractError):
        generate("hypercube", {}, 0)


# edge-list format

def test_parse_with_comments():
    G = parse_edge_list("# graph\n3 2\n1 2  # first\n\n3 3\n")
    assert G.n == 3 and G.edges.pairs() == [(1, 2), (3, 3)]


@pytest.mark.parametrize("text,line", [
    ("", 1), ("3\n", 1), ("2 1\n1 3\n", 2), ("2 2\n1 2\n", 2), ("2 1\n1 2\n2 1\n", 3),
    ("2 1\n1 x\n", 2), ("2 1\n1 2 2\n", 2),
])
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(EdgeListError) as exc:
        parse_edge_list(text)
    assert exc.value.lineno == line


@given(st.integers(1, 30).flatmap(
    lambda n: st.lists(st.tuples(st.integers(1, n), st.integers(1, n)), max_size=40)
    .map(lambda p: MultiGraph.from_pairs(n, p))))
def test_edge_list_round_trip(G):
    H = parse_edge_list(format_edge_list(G))
    assert H.n == G.n and H.edges.pairs() == G.edges.pairs()


# command line

def test_cli_gen_then_verify(tmp_path, capsys):
    f = tmp_path / "g.txt"
    assert cli.main(["gen", "two-cycle", "n=2048", "variant=\"two\"", "--seed", "3", "-o", str(f)]) == 0
    assert cli.main(["verify", str(f), "--policy", "random", "--seed", "5"]) == 0
    out = capsys.readouterr().out
    assert "ok: 2 components" in out and "seed=5" in out


def test_cli_run_edgeless_stats(tmp_path, capsys):
    f = tmp_path / "e.txt"
    f.write_text("5 0\n")
    stats = tmp_path / "s.json"
    labels = tmp_path / "l.txt"
    assert cli.main(["run", str(f), "--stats", str(stats), "--labels", str(labels)]) == 0
    d = json.loads(stats.read_text())
    assert d["components"] == 5 and d["work"] >= 5
    assert sum(p["work"] for p in d["ledger"]["phases"]) == d["ledger"]["work"]
    assert labels.read_text().split() == ["1", "2", "3", "4", "5"]


def test_cli_parse_error(tmp_path, capsys):
    f = tmp_path / "bad.txt"
    f.write_text("3 2\n1 2\n1 9\n")
    assert cli.main(["run", str(f)]) == 2
    assert "line 3" in capsys.readouterr().err


def test_cli_verify_reports_a_mismatch(tmp_path, monkeypatch, capsys):
    f = tmp_path / "p.txt"
    f.write_text("3 2\n1 2\n2 3\n")

    def broken(G, *a, **k):
        forest = ParentForest(G.n)
        forest.parent[2] = 1
        return forest, {"phases_run": 0, "final_b": None, "components": 2, "rounds": 0,
                        "work": 0, "ledger": CostLedger()}

    monkeypatch.setattr(cli, "connectivity", broken)
    assert cli.main(["verify", str(f)]) == 1
    assert "mismatch at vertex 3" in capsys.readouterr().err


def test_cli_work_sweep_json(tmp_path):
    out = tmp_path / "w.json"
    assert cli.main(["experiment", "work-sweep", "--family", "cycle", "--min-exp", "10",
                     "--max-exp", "12", "-o", str(out)]) == 0
    d = json.loads(out.read_text())
    assert d["master_seed"] == 0
    work = [r["work"] for r in d["rows"]]
    assert work == sorted(work) and len(work) == 3
    assert d["fit"]["cycle"]["a"] > 0


def test_cli_spectral(tmp_path, capsys):
    f = tmp_path / "c.txt"
    f.write_text(format_edge_list(cycle(8)))
    assert cli.main(["spectral", str(f)]) == 0
    assert json.loads(capsys.readouterr().out)["min_gap"] == pytest.approx(0.29289, abs=1e-5)


def test_console_script_entry_point():
    res = subprocess.run([sys.executable, "-m", "pramconn.cli", "gen", "path", "n=3"],
                         capture_output=True, text=True, check=True)
    assert res.stdout == "3 2\n1 2\n2 3\n"
