# Walk one graph through the three stages and read the cost ledger.
import numpy as np

from pramconn.audit import ForestAuditor
from pramconn.generators import cycle, random_regular, shuffle_ids, union
from pramconn.graph import ParentForest, tree_heights
from pramconn.oracle import first_mismatch, oracle_components
from pramconn.orchestrator import connectivity
from pramconn.pram import ConstantProfile, Run, WritePolicy
from pramconn.stage1 import reduce_graph

# an expander next to a long cycle, with ids shuffled
G = shuffle_ids(union([random_regular(2000, 8, 1), cycle(6000)]), 2)
print(G)

# stage 1 alone: how much does the low-level contraction leave?
desk = ConstantProfile.named("desk")
run = Run(0, desk, WritePolicy("seeded-random", 0), n=G.n)
forest = ParentForest(G.n)
E = G.edges.fresh_copy()
reduce_graph(np.arange(1, G.n + 1), E, desk.reduce_outer_k(G.n), forest, run)
left = np.unique(np.concatenate((E.u, E.v)))
print("edges left after stage 1:", len(E), "on", len(left), "roots")
print("tallest tree:", max(tree_heights(forest).values()))

# the whole pipeline, audited at every subroutine boundary
aud = ForestAuditor(G)
forest, rep = connectivity(G, desk, 0, WritePolicy("seeded-random", 0), monitor=aud)
print("components:", rep["components"], " phases:", rep["phases_run"],
      " remain ran in phase", rep["remain_phase"])
print("checkpoints:", aud.checks, " violations:", len(aud.violations))
print("oracle mismatch:", first_mismatch(forest.find(), oracle_components(G)))

# where the work went
L = rep["ledger"]
for prefix in ("stage1/", "phase/", "fallback/", "orchestrator/"):
    r, w = L.breakdown(prefix)
    print(f"{prefix:14s} rounds {r:6d}  work {w:10d}  ({w / (G.n + G.m):.1f} per element)")

# same seed, another write policy: different forest, same components
f2, _ = connectivity(G, desk, 0, WritePolicy("last-writer", 0))
print("same partition:", first_mismatch(f2.find(), oracle_components(G)) is None,
      " same forest:", f2.digest() == forest.digest())
