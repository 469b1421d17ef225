"""Simulated ARBITRARY CRCW PRAM.

Primitives run as exact sequential numpy code but are charged the parallel
cost model: one synchronous round per step, one unit of work per processor.
"""

from __future__ import annotations

import hashlib
import json
import math
import sys
from dataclasses import dataclass, replace

import numpy as np


class StructuralViolation(RuntimeError):
    """A forest or edge-set invariant does not hold."""


class ContractError(ValueError):
    """An operation was called outside its precondition."""


class BudgetExceeded(RuntimeError):
    def __init__(self, kind, used, budget):
        super().__init__(f"{kind} budget exceeded: {used} > {budget}")
        self.kind = kind
        self.used = used
        self.budget = budget


class InstanceFailed(RuntimeError):
    """A randomized instance hit a resource limit and must be discarded."""


class RetryExhausted(RuntimeError):
    def __init__(self, diagnostics):
        super().__init__(f"all {len(diagnostics)} instances failed: {diagnostics}")
        self.diagnostics = diagnostics


def _lg(x):
    return math.log2(x) if x > 1 else 0.0


def _pow(x, e):
    """x ** e, saturating at +inf instead of raising."""
    try:
        return float(x) ** e
    except OverflowError:
        return math.inf


def loglog(n):
    return max(1, int(math.floor(_lg(_lg(n)))))


def logloglog(n):
    return max(1, int(math.floor(_lg(_lg(_lg(n))))))


def log_star(n):
    k, x = 0, float(n)
    while x > 1:
        x = _lg(x)
        k += 1
    return max(1, k)


class CostLedger:
    """Rounds (parallel time) and work (processor steps), broken down by label."""

    def __init__(self, round_budget=None, work_budget=None):
        self.rounds = 0
        self.work = 0
        self.phases = {}
        self.round_budget = round_budget
        self.work_budget = work_budget

    def charge(self, label, rounds=1, work=0):
        rounds = int(rounds)
        work = int(work)
        if rounds < 0 or work < 0:
            raise ValueError("charges are non-negative")
        self.rounds += rounds
        self.work += work
        entry = self.phases.get(label)
        if entry is None:
            self.phases[label] = [rounds, work]
        else:
            entry[0] += rounds
            entry[1] += work
        if self.round_budget is not None and self.rounds > self.round_budget:
            raise BudgetExceeded("round", self.rounds, self.round_budget)
        if self.work_budget is not None and self.work > self.work_budget:
            raise BudgetExceeded("work", self.work, self.work_budget)

    def absorb(self, other, with_rounds=True):
        for label, (r, w) in other.phases.items():
            self.charge(label, r if with_rounds else 0, w)

    def breakdown(self, prefix=""):
        r = w = 0
        for label, (a, b) in self.phases.items():
            if label.startswith(prefix):
                r += a
                w += b
        return r, w

    def to_dict(self):
        return {
            "rounds": self.rounds,
            "work": self.work,
            "phases": [{"label": k, "rounds": v[0], "work": v[1]} for k, v in self.phases.items()],
        }

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)


_MODES = {
    "first": "first-writer", "first-writer": "first-writer",
    "last": "last-writer", "last-writer": "last-writer",
    "random": "seeded-random", "seeded-random": "seeded-random",
}


@dataclass(frozen=True)
class WritePolicy:
    mode: str = "first-writer"
    seed: int = 0

    def __post_init__(self):
        if self.mode not in _MODES:
            raise ValueError(f"unknown write policy {self.mode!r}")
        object.__setattr__(self, "mode", _MODES[self.mode])


def crcw_round(cells, values, policy=None, writers=None, rng=None, ledger=None, label="crcw"):
    """Resolve one round of concurrent writes.

    Returns (cells, winning values) with one entry per distinct written cell,
    sorted by cell. Writer ids order the writes for the first/last policies;
    by default the position in the input is the writer id.
    """
    cells = np.asarray(cells, dtype=np.int64)
    values = np.asarray(values)
    policy = policy or WritePolicy()
    if ledger is not None:
        ledger.charge(label, 1, len(cells))
    if len(cells) == 0:
        return cells, values[:0]
    k = len(cells)
    if policy.mode == "seeded-random":
        if rng is None:
            rng = np.random.default_rng(policy.seed)
        rank = rng.permutation(k)
    elif writers is None:
        rank = np.arange(k, dtype=np.int64)
    else:
        rank = np.empty(k, dtype=np.int64)
        rank[np.argsort(np.asarray(writers, dtype=np.int64), kind="stable")] = np.arange(k)
    if policy.mode == "last-writer":
        rank = k - 1 - rank
    lo = int(cells.min())
    if (int(cells.max()) - lo + 1) * k < (1 << 62):
        # one sort of packed (cell, rank) keys; the lowest rank per cell wins
        key = np.sort((cells - lo) * k + rank)
        first = np.ones(k, dtype=bool)
        first[1:] = key[1:] // k != key[:-1] // k
        win = np.empty(k, dtype=np.int64)
        win[rank] = np.arange(k)
        win = win[key[first] % k]
    else:
        order = np.lexsort((rank, cells))
        sc = cells[order]
        first = np.ones(k, dtype=bool)
        first[1:] = sc[1:] != sc[:-1]
        win = order[first]
    return cells[win], values[win]


def collided_cells(cells, values):
    """Cells written with at least two distinct values in one round."""
    cells = np.asarray(cells, dtype=np.int64)
    values = np.asarray(values, dtype=np.int64)
    if len(cells) == 0:
        return cells
    order = np.argsort(cells, kind="stable")
    c = cells[order]
    v = values[order]
    starts = np.flatnonzero(np.r_[True, c[1:] != c[:-1]])
    lo = np.minimum.reduceat(v, starts)
    hi = np.maximum.reduceat(v, starts)
    return c[starts[lo != hi]]


def approximate_compaction(array, mask=None, ledger=None, n=None, label="compaction"):
    """Map the distinguished items of `array` one-to-one into a short array.

    Items are distinguished by `mask` or, when no mask is given, by being
    non-negative. The output keeps input order and has length k <= 2k.
    """
    array = np.asarray(array)
    if mask is None:
        mask = array >= 0
    if ledger is not None:
        ledger.charge(label, log_star(n or max(2, len(array))), len(array))
    return array[mask]


def padded_sort(keys, m, items=None, ledger=None, label="padded_sort"):
    """Stable sort by integer keys in [1, m] into a padded array.

    Returns (keys, items) of length at most 2*len(keys); empty cells carry
    key 0 and item -1. One empty cell follows each run of equal keys.
    """
    keys = np.asarray(keys, dtype=np.int64)
    if items is None:
        items = np.arange(len(keys), dtype=np.int64)
    items = np.asarray(items)
    if len(keys) and (keys.min() < 1 or keys.max() > m):
        bad = keys[(keys < 1) | (keys > m)][0]
        raise ContractError(f"key {int(bad)} outside [1, {m}]")
    if ledger is not None:
        ledger.charge(label, loglog(max(m, 4)), max(m, len(keys)))
    if len(keys) == 0:
        return keys, items[:0]
    order = np.argsort(keys, kind="stable")
    sk = keys[order]
    run_end = np.ones(len(sk), dtype=bool)
    run_end[:-1] = sk[1:] != sk[:-1]
    shift = np.concatenate(([0], np.cumsum(run_end)[:-1]))
    pos = np.arange(len(sk)) + shift
    size = len(sk) + int(run_end.sum())
    out_k = np.zeros(size, dtype=np.int64)
    out_i = np.full(size, -1, dtype=items.dtype if items.dtype.kind in "iu" else np.int64)
    out_k[pos] = sk
    out_i[pos] = items[order]
    return out_k, out_i


def perfect_hash_dedup(u, v, ledger=None, n=None, label="dedup"):
    """Distinct non-loop unordered pairs.

    Returns (a, b, idx) with a < b and idx the position of one representative
    input edge for each pair.
    """
    u = np.asarray(u, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64)
    if ledger is not None:
        ledger.charge(label, log_star(n or max(2, len(u))), len(u))
    keep = np.flatnonzero(u != v)
    a = np.minimum(u[keep], v[keep])
    b = np.maximum(u[keep], v[keep])
    if len(a) == 0:
        return a, b, keep
    key = a * (int(b.max()) + 1) + b
    _, first = np.unique(key, return_index=True)
    return a[first], b[first], keep[first]


def derive_seed(master, path):
    h = hashlib.blake2b(f"{int(master)}|{path}".encode(), digest_size=8)
    return int.from_bytes(h.digest(), "little")


@dataclass(frozen=True)
class ConstantProfile:
    """Every tunable constant of the pipeline.

    The paper profile evaluates the asymptotic formulas literally; the desk
    profile replaces them with values that make desk-sized inputs non-trivial.
    """

    name: str
    filter_delete_prob: float = 1e-4
    matching_delete_prob: float = 0.5
    reduce_inner_factor: float = 1.0
    reduce_outer_factor: float = 4.0
    skeleton_high_exp: float = 2.0
    skeleton_table_exp: float = 3.0
    skeleton_sample_exp: float = 1.0
    beta1_value: float = 4.0
    beta1_logexp: float | None = None
    budget_growth: float = 1.5
    level_up_exp: float = -0.25
    densify_rounds_factor: float = 4.0
    densify_shortcut_factor: float = 2.0
    head_factor: float = 2.0
    leader_prob: float = 0.5
    stage3_p_value: float = 0.25
    stage3_p_logexp: float | None = None
    small_cutoff_value: int = 64
    small_cutoff_exp: float | None = None
    b0_value: float = 16.0
    b0_logexp: float | None = None
    phase_growth: float = 1.5
    aux_threshold_value: int = 32
    aux_threshold_logexp: float | None = None
    interweave_factor: float = 2.0
    phase_count_factor: float = 4.0
    truncated_ltz_factor: float = 4.0
    max_level: int = 10
    boost_copies_value: int = 2
    boost_copies_log: bool = False
    boost_work_factor: float = 64.0
    boost_round_factor: float = 400.0
    spectral_C: float = 1.0
    blowup_width_exp: float = 1.5

    @classmethod
    def desk(cls, **overrides):
        return replace(cls(name="desk"), **overrides)

    @classmethod
    def paper(cls, **overrides):
        base = cls(
            name="paper",
            reduce_inner_factor=1000.0,
            reduce_outer_factor=1e6,
            skeleton_high_exp=8.0,
            skeleton_table_exp=9.0,
            beta1_logexp=80.0,
            budget_growth=1.01,
            level_up_exp=-0.06,
            densify_rounds_factor=20.0,
            stage3_p_logexp=7.0,
            small_cutoff_exp=0.1,
            b0_logexp=100.0,
            phase_growth=1.1,
            aux_threshold_logexp=90.0,
            interweave_factor=1e6,
            phase_count_factor=10.0,
            truncated_ltz_factor=1e4,
            max_level=10**6,
            boost_copies_log=True,
            blowup_width_exp=3.0,
        )
        return replace(base, **overrides)

    @classmethod
    def named(cls, name):
        if name == "desk":
            return cls.desk()
        if name == "paper":
            return cls.paper()
        raise ValueError(f"unknown profile {name!r}")

    def _polylog(self, n, value, logexp):
        if logexp is None:
            return value
        return max(2.0, _lg(n)) ** logexp

    def reduce_inner_k(self, n):
        return max(1, int(math.ceil(self.reduce_inner_factor * logloglog(n))))

    def reduce_outer_k(self, n):
        return max(1, int(math.ceil(self.reduce_outer_factor * loglog(n))))

    def high_threshold(self, b):
        return _pow(b, self.skeleton_high_exp)

    def table_size(self, b):
        return _pow(b, self.skeleton_table_exp)

    def table_log2(self, b):
        """log2 of table_size(b), finite even when the size is not."""
        return self.skeleton_table_exp * _lg(b)

    def skeleton_sample_prob(self, b):
        return min(1.0, 1.0 / _pow(b, self.skeleton_sample_exp))

    def beta1(self, n):
        return self._polylog(n, self.beta1_value, self.beta1_logexp)

    def beta(self, n, level):
        return _pow(self.beta1(n), self.budget_growth ** (level - 1))

    def level_up_prob(self, beta):
        return min(1.0, _pow(beta, self.level_up_exp))

    def densify_rounds(self, b):
        return max(1, int(math.ceil(self.densify_rounds_factor * _lg(b))))

    def densify_shortcuts(self, n):
        return max(1, int(math.ceil(self.densify_shortcut_factor * loglog(n))))

    def head_threshold(self, b):
        return self.head_factor * b

    def stage3_p(self, n):
        if self.stage3_p_logexp is None:
            return self.stage3_p_value
        return min(1.0, max(2.0, _lg(n)) ** -self.stage3_p_logexp)

    def small_cutoff(self, n):
        if self.small_cutoff_exp is None:
            return self.small_cutoff_value
        return n ** self.small_cutoff_exp

    def b0(self, n):
        return self._polylog(n, self.b0_value, self.b0_logexp)

    def phase_b(self, n, i):
        # late guesses exceed any float; clamp so log b stays finite
        return min(_pow(self.b0(n), self.phase_growth ** i), sys.float_info.max)

    def aux_threshold(self, n):
        return self._polylog(n, self.aux_threshold_value, self.aux_threshold_logexp)

    def interweave_rounds(self, n, i):
        return max(1, int(math.ceil(self.interweave_factor * self.phase_growth ** i * loglog(n))))

    def phase_count(self, n):
        return max(1, int(math.ceil(self.phase_count_factor * max(1.0, math.ceil(_lg(_lg(n)))))))

    def truncated_ltz_rounds(self, n):
        return max(1, int(math.ceil(self.truncated_ltz_factor * loglog(n))))

    def boost_copies(self, n):
        if self.boost_copies_log:
            return max(1, int(math.ceil(_lg(n))))
        return self.boost_copies_value

    def to_dict(self):
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


class Run:
    """Execution context shared by every subroutine of one pipeline run.

    Carries the ledger, write policy, profile and the seed tree. Each child
    context gets its own call path, and every random stream is derived from
    (master seed, call path), so streams never overlap.
    """

    ISOLATED = ("H1",)

    def __init__(self, seed=0, profile=None, policy=None, ledger=None, n=2,
                 path="", prefix="", salt="", monitor=None):
        self.seed = int(seed)
        self.profile = profile or ConstantProfile.desk()
        self.policy = policy or WritePolicy()
        self.ledger = ledger if ledger is not None else CostLedger()
        self.n = max(2, int(n))
        self.path = path
        self.prefix = prefix
        self.salt = salt
        self.monitor = monitor
        self._counts = {}

    def _next_path(self, name):
        k = self._counts.get(name, 0)
        self._counts[name] = k + 1
        return f"{self.path}/{name}#{k}"

    def child(self, name, ledger=None, prefix=None):
        sub = Run(self.seed, self.profile, self.policy,
                  self.ledger if ledger is None else ledger, self.n,
                  self._next_path(name), self.prefix if prefix is None else prefix,
                  self.salt, self.monitor)
        return sub

    def _seed_for(self, path):
        top = path.split("/")[1].split("#")[0] if path.count("/") else ""
        if self.salt and top not in self.ISOLATED:
            path = self.salt + path
        return derive_seed(self.seed, path)

    def rng(self, name="rng"):
        return np.random.default_rng(self._seed_for(self._next_path(name)))

    def arbiter(self):
        if self.policy.mode != "seeded-random":
            return None
        path = self._next_path("arb")
        return np.random.default_rng(derive_seed(self.policy.seed, path))

    def charge(self, label, rounds=1, work=0):
        self.ledger.charge(self.prefix + label, rounds, work)

    def write(self, cells, values, writers=None):
        """One arbitrated write round; the caller charges the step."""
        return crcw_round(cells, values, self.policy, writers, rng=self.arbiter())

    def checkpoint(self, label, forest, **claims):
        if self.monitor is not None:
            self.monitor(label, forest, claims)


def budgeted_instances(task, copies, round_budget, work_budget, validator, run=None,
                       label="instances"):
    """Run `copies` seeded instances of `task` under resource budgets.

    `task(sub_run)` must be deterministic given the sub-run's seed path.
    Returns (result, index) of the first valid instance in seed order. The
    parent ledger is charged the maximum instance rounds and the summed work.
    """
    if copies < 1:
        raise ContractError("copies must be >= 1")
    run = run or Run()
    ledgers = []
    results = []
    diagnostics = []
    for j in range(copies):
        led = CostLedger(round_budget=round_budget, work_budget=work_budget)
        sub = run.child(f"instance{j}", ledger=led)
        try:
            res = task(sub)
        except BudgetExceeded as exc:
            diagnostics.append({"instance": j, "status": f"halted ({exc.kind})",
                                "rounds": led.rounds, "work": led.work})
            results.append(None)
        except InstanceFailed as exc:
            diagnostics.append({"instance": j, "status": f"failed ({exc})",
                                "rounds": led.rounds, "work": led.work})
            results.append(None)
        else:
            ok = bool(validator(res))
            diagnostics.append({"instance": j, "status": "valid" if ok else "invalid",
                                "rounds": led.rounds, "work": led.work})
            results.append(res if ok else None)
        ledgers.append(led)
    # parallel execution: time is the slowest instance, work is the total
    slowest = max(ledgers, key=lambda led: led.rounds)
    for led in ledgers:
        run.ledger.absorb(led, with_rounds=led is slowest)
    for j, res in enumerate(results):
        if res is not None:
            return res, j
    raise RetryExhausted(diagnostics)

