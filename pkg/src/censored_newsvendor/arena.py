"""Simulation loop, regret benchmarks and Monte Carlo aggregation."""

from __future__ import annotations

import os
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .core import ActionGrid, CostParams, cost_matrix
from .demand import DemandGenerator, generate
from .policies import INFORMATION_LEVELS, BatchFeedback, Policy

WORKERS_ENV = "NEWSVENDOR_WORKERS"


def derive_seed(seed, *tags: int) -> np.random.SeedSequence:
    """Child seed for ``(seed, tags...)``; independent of call order."""
    return np.random.SeedSequence([int(seed), *[int(t) for t in tags]])


def policy_tag(name: str) -> int:
    return zlib.crc32(name.encode())


@dataclass
class RunRecord:
    """One run of one policy: levels stocked and demands faced, period by period."""

    policy: str
    run: int
    levels: np.ndarray
    demands: np.ndarray
    params: CostParams
    expected_costs: Optional[np.ndarray] = None

    @property
    def T(self) -> int:
        return self.levels.size

    @property
    def costs(self) -> np.ndarray:
        p = self.params
        lv = self.levels.astype(float)
        d = self.demands.astype(float)
        return p.h * np.maximum(lv - d, 0.0) + p.b * np.maximum(d - lv, 0.0)

    @property
    def cum_costs(self) -> np.ndarray:
        return np.cumsum(self.costs)

    def total_cost(self) -> float:
        return float(self.costs.sum())


@dataclass
class RegretTrace:
    policy: str
    mean: np.ndarray
    std: np.ndarray
    runs: int
    metric: str = "regret"

    def at(self, t: int) -> float:
        """Mean value after ``t`` periods (1-indexed)."""
        return float(self.mean[t - 1])


def _resolve_mode(policy: Policy, information: Optional[str]) -> str:
    mode = information or policy.requires
    if mode not in INFORMATION_LEVELS:
        raise ValueError(f"unknown information mode {mode!r}")
    if INFORMATION_LEVELS.index(mode) < INFORMATION_LEVELS.index(policy.requires):
        raise ValueError(f"policy {policy.name} needs {policy.requires} feedback, experiment provides {mode}")
    return mode


def run_batch(policy: Policy, demands: np.ndarray, seeds: Sequence, runs: Sequence[int] | None = None,
              information: Optional[str] = None, record_expected: bool = False) -> list[RunRecord]:
    """Play ``policy`` against each row of ``demands`` (shape ``(R, T)``), one replica per row."""
    demands = np.atleast_2d(np.asarray(demands, dtype=np.int64))
    R, T = demands.shape
    if len(seeds) != R:
        raise ValueError("one seed per demand row required")
    mode = _resolve_mode(policy, information)
    policy.reset(list(seeds))
    levels = policy.levels
    out = np.empty((R, T), dtype=np.int16)
    expected = np.empty((R, T)) if record_expected and policy.randomized else None
    for t in range(T):
        idx = policy.select()
        lv = levels[idx]
        d = demands[:, t]
        if expected is not None:
            expected[:, t] = (policy.probs * cost_matrix(d, levels, policy.params)).sum(axis=1)
        policy.observe(BatchFeedback.from_demand(idx, lv, d, mode))
        out[:, t] = lv
    runs = range(R) if runs is None else runs
    return [RunRecord(policy.name, r, out[k], demands[k], policy.params,
                      None if expected is None else expected[k])
            for k, r in enumerate(runs)]


def run_once(policy: Policy, gen: DemandGenerator, grid: ActionGrid, p: CostParams, seed,
             information: Optional[str] = None) -> RunRecord:
    """Single run: demand from ``derive_seed(seed, 0)``, policy randomness from ``derive_seed(seed, 1)``."""
    if policy.grid != grid or policy.params != p:
        raise ValueError("policy was built for a different grid or cost model")
    demands = generate(gen, derive_seed(seed, 0))
    return run_batch(policy, demands[None, :], [derive_seed(seed, 1)], information=information)[0]


# ---------------------------------------------------------------------------
# benchmarks


def best_fixed_cost(demands, grid: ActionGrid, p: CostParams) -> tuple[int, float]:
    """Best single level in hindsight; ties go to the smallest level."""
    d = np.asarray(demands, dtype=np.int64)
    if d.size == 0:
        raise ValueError("demands must be nonempty")
    counts = np.bincount(d, minlength=p.D + 1).astype(float)
    totals = counts @ cost_matrix(np.arange(p.D + 1), grid.array, p)
    k = int(np.argmin(totals))
    return grid.levels[k], float(totals[k])


def fixed_benchmark_prefix(demands, grid: ActionGrid, p: CostParams) -> np.ndarray:
    """``min_i sum_{s<=t} c(i, d_s)`` for every prefix length ``t``."""
    C = cost_matrix(demands, grid.array, p)
    return np.cumsum(C, axis=0).min(axis=1)


def _switching_dp(cost_rows: Iterable[np.ndarray], S: int, R: int, N: int) -> list[np.ndarray]:
    # V[r, s, i]: cheapest prefix ending at level i using at most s switches
    V = None
    prefix = []
    for c in cost_rows:
        if V is None:
            V = np.repeat(c[:, None, :], S + 1, axis=1)
        else:
            new = V.copy()
            if S > 0 and N > 1:
                prev = V[:, :-1, :]
                order = np.argpartition(prev, 1, axis=-1)[..., :2]
                m = np.take_along_axis(prev, order, axis=-1)
                first = np.where(m[..., :1] <= m[..., 1:], order[..., :1], order[..., 1:])
                lo = m.min(axis=-1, keepdims=True)
                hi = m.max(axis=-1, keepdims=True)
                others = np.where(np.arange(N) == first, hi, lo)
                new[:, 1:, :] = np.minimum(V[:, 1:, :], others)
            V = new + c[:, None, :]
        prefix.append(V[:, S, :].min(axis=-1))
    return prefix


def switching_benchmark_prefix(demands, grid: ActionGrid, p: CostParams, S: int) -> np.ndarray:
    """Prefix optima over level sequences with at most ``S`` switches.

    ``demands`` may be ``(T,)`` or ``(R, T)``; the result has the same shape.
    Runs in ``O(T * N * S)`` using the best and second-best previous values.
    """
    d = np.asarray(demands, dtype=np.int64)
    single = d.ndim == 1
    d = np.atleast_2d(d)
    if S < 0:
        raise ValueError("S must be nonnegative")
    table = cost_matrix(np.arange(p.D + 1), grid.array, p)
    rows = (table[d[:, t]] for t in range(d.shape[1]))
    prefix = np.stack(_switching_dp(rows, S, d.shape[0], grid.N), axis=1)
    return prefix[0] if single else prefix


def best_switching_cost(demands, grid: ActionGrid, p: CostParams, S: int) -> float:
    """Cheapest total cost of a level sequence switching at most ``S`` times."""
    d = np.asarray(demands, dtype=np.int64)
    if d.size == 0:
        raise ValueError("demands must be nonempty")
    return float(switching_benchmark_prefix(d, grid, p, S)[-1])


# ---------------------------------------------------------------------------
# aggregation


def _benchmark_prefixes(records: Sequence[RunRecord], grid: ActionGrid, benchmark) -> dict[int, np.ndarray]:
    unique = {}
    for rec in records:
        unique.setdefault(id(rec.demands), rec)
    p = records[0].params
    if benchmark == "fixed":
        return {k: fixed_benchmark_prefix(r.demands, grid, p) for k, r in unique.items()}
    kind, S = benchmark
    if kind != "switching":
        raise ValueError(f"unknown benchmark {benchmark!r}")
    keys = list(unique)
    mat = np.stack([unique[k].demands for k in keys])
    pref = switching_benchmark_prefix(mat, grid, p, int(S))
    return dict(zip(keys, pref))


def aggregate(records: Sequence[RunRecord], grid: ActionGrid, benchmark="fixed",
              metric: str = "regret", _cache: Optional[dict] = None) -> RegretTrace:
    """Per-period mean and population std across runs.

    ``benchmark`` is ``"fixed"`` or ``("switching", S)``; ``metric`` is
    ``"regret"``, ``"cumulative-cost"`` or ``"expected-regret"`` (the last
    uses recorded per-period expected costs of randomized policies).
    """
    if not records:
        raise ValueError("no records to aggregate")
    T = records[0].T
    if any(r.T != T for r in records):
        raise ValueError("records have mismatched horizons")
    names = {r.policy for r in records}
    if metric == "cumulative-cost":
        curves = np.stack([r.cum_costs for r in records])
    elif metric in ("regret", "expected-regret"):
        bench = _cache if _cache is not None else {}
        missing = [r for r in records if id(r.demands) not in bench]
        if missing:
            bench.update(_benchmark_prefixes(missing, grid, benchmark))
        if metric == "regret":
            paid = [r.cum_costs for r in records]
        else:
            if any(r.expected_costs is None for r in records):
                raise ValueError("expected-regret needs records with expected costs")
            paid = [np.cumsum(r.expected_costs) for r in records]
        curves = np.stack([c - bench[id(r.demands)] for c, r in zip(paid, records)])
    else:
        raise ValueError(f"unknown metric {metric!r}")
    return RegretTrace(",".join(sorted(names)), curves.mean(axis=0), curves.std(axis=0), len(records), metric)


# ---------------------------------------------------------------------------
# Monte Carlo driver


def worker_count(default: int = 1) -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, default)))
    except ValueError:
        return default


def demand_matrix(gen: DemandGenerator, base_seed: int, runs: Sequence[int], tag: int = 0) -> np.ndarray:
    return np.stack([generate(gen, derive_seed(base_seed, r, 0, tag)) for r in runs])


def _simulate_chunk(policy: Policy, gen: DemandGenerator, base_seed: int, runs: list[int],
                    information: Optional[str], shared_demand: bool, record_expected: bool):
    tag = 0 if shared_demand else policy_tag(policy.name)
    demands = demand_matrix(gen, base_seed, runs, tag)
    seeds = [derive_seed(base_seed, r, 1, policy_tag(policy.name)) for r in runs]
    return run_batch(policy, demands, seeds, runs, information, record_expected)


def simulate(policies: Sequence[Policy], gen: DemandGenerator, runs: int, base_seed: int = 0,
             information: Optional[str] = None, shared_demand: bool = True,
             record_expected: bool = False, workers: Optional[int] = None) -> dict[str, list[RunRecord]]:
    """Run every policy ``runs`` times; run ``r`` of every policy sees the same demand when ``shared_demand``.

    Results depend only on ``(base_seed, run index, policy name)``, not on how
    runs are split across workers.
    """
    if runs < 1:
        raise ValueError("runs must be positive")
    workers = worker_count() if workers is None else max(1, workers)
    chunks = [list(c) for c in np.array_split(np.arange(runs), min(workers, runs)) if c.size]
    out: dict[str, list[RunRecord]] = {}
    jobs = [(pol, gen, base_seed, [int(r) for r in c], information, shared_demand, record_expected)
            for pol in policies for c in chunks]
    if workers == 1:
        results = [_simulate_chunk(*job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_simulate_chunk, *zip(*jobs)))
    for recs in results:
        for rec in recs:
            out.setdefault(rec.policy, []).append(rec)
    if shared_demand:
        # one demand array object per run index so benchmarks are computed once
        canon: dict[int, np.ndarray] = {}
        for recs in out.values():
            for rec in recs:
                rec.demands = canon.setdefault(rec.run, rec.demands)
    return out
