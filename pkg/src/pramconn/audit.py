"""Forest auditing for instrumented runs."""

from __future__ import annotations

import numpy as np

from .oracle import oracle_components
from .pram import StructuralViolation


class ForestAuditor:
    """Checkpoint monitor: acyclicity, component safety and claimed flatness.

    Pass an instance as `monitor=` to `connectivity`. Every call records one
    check; failures land in `violations` as (label, kind, detail).
    """

    def __init__(self, G):
        self.truth = oracle_components(G)
        self.checks = 0
        self.violations = []
        self.labels = {}

    def __call__(self, label, forest, claims):
        self.checks += 1
        self.labels[label] = self.labels.get(label, 0) + 1
        p = forest.parent
        try:
            forest.find()
        except StructuralViolation:
            self.violations.append((label, "cycle", None))
            return
        t = self.truth
        bad = np.flatnonzero(t[p[1:]] != t[1:])
        if len(bad):
            self.violations.append((label, "unsafe", int(bad[0]) + 1))
        if claims.get("flat") and not forest.is_flat():
            self.violations.append((label, "not flat", None))
        V = claims.get("flat_vertices")
        if V is not None and not forest.is_flat(V):
            self.violations.append((label, "not flat on V", None))
        E = claims.get("edges_on_roots")
        if E is not None and len(E) and not (np.all(p[E.u] == E.u) and np.all(p[E.v] == E.v)):
            self.violations.append((label, "edge off roots", None))

    @property
    def ok(self):
        return not self.violations
