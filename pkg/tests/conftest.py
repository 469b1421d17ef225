import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from pramconn.graph import EdgeSet, MultiGraph, ParentForest
from pramconn.pram import ConstantProfile, Run, WritePolicy

settings.register_profile("repo", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")


def make_run(n, seed=0, policy="first-writer", profile=None, **kw):
    return Run(seed, profile or ConstantProfile.desk(), WritePolicy(policy, seed), n=n, **kw)


def forest_from(parents):
    """Forest on 1..n from a list whose entry i-1 is the parent of i."""
    f = ParentForest(len(parents))
    f.parent[1:] = parents
    return f


def edges(pairs):
    if not pairs:
        return EdgeSet.empty()
    a = np.array(pairs, dtype=np.int64)
    return EdgeSet(a[:, 0], a[:, 1])


@pytest.fixture
def run_factory():
    return make_run


ACCEPTANCE = []


def report(criterion, ok, detail):
    line = f"[C{criterion}] {'PASS' if ok else 'FAIL'} {detail}"
    ACCEPTANCE.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s[2:s.index("]")])):
            terminalreporter.write_line(line)
