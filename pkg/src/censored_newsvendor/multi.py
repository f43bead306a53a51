"""Single warehouse, K retailers: allocations of a fixed replenishment.

Every period the warehouse receives ``r`` units and allocates a level from
the grid to each retailer, subject to the allocation summing to at most
``r``. Retailers pay fixed-order, overage and underage costs; the warehouse
pays its own fixed cost plus holding on what it keeps. Each retailer only
observes its own sales.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import ActionGrid
from .estimators import tail_probabilities
from .policies import ReplicaUniforms, sample_indices

DEFAULT_ENUMERATION_CAP = 200_000


@dataclass(frozen=True)
class ChainParams:
    grid: ActionGrid
    r: int
    f: tuple[float, ...]
    h: tuple[float, ...]
    b: tuple[float, ...]
    f0: float
    h0: float
    pull: bool = False
    fill_level: Optional[int] = None
    cap: int = DEFAULT_ENUMERATION_CAP

    def __post_init__(self):
        for name in ("f", "h", "b"):
            object.__setattr__(self, name, tuple(float(x) for x in getattr(self, name)))
        if not (len(self.f) == len(self.h) == len(self.b) >= 1):
            raise ValueError("f, h and b need one entry per retailer")
        if min(self.h + self.b) <= 0 or self.h0 <= 0:
            raise ValueError("holding and shortage rates must be positive")
        if min(self.f) < 0 or self.f0 < 0:
            raise ValueError("fixed costs must be nonnegative")
        fill = self.grid.levels[0] if self.fill_level is None else int(self.fill_level)
        if fill not in self.grid.levels:
            raise ValueError(f"fill level {fill} is not a grid level")
        object.__setattr__(self, "fill_level", fill)
        need = self.grid.levels[-1] + (self.K - 1) * fill
        if self.r < need:
            raise ValueError(f"replenishment r={self.r} cannot cover single-retailer exploration "
                             f"(needs r >= {need})")

    @property
    def K(self) -> int:
        return len(self.h)

    @property
    def D(self) -> int:
        return self.grid.D

    @property
    def beta(self) -> float:
        return self.D * max(max(self.h), self.h0, max(self.b))

    @property
    def f_max(self) -> float:
        return max(max(self.f), self.f0)


def enumerate_allocations(chain: ChainParams) -> np.ndarray:
    """Grid-index tuples of every feasible allocation, shape ``(A, K)``, lexicographic."""
    rows = []
    for combo in _feasible(chain):
        rows.append(combo)
        if len(rows) > chain.cap:
            raise ValueError(f"more than {chain.cap} feasible allocations; "
                             "use fewer retailers, fewer levels or a smaller replenishment")
    return np.array(rows, dtype=np.int64).reshape(-1, chain.K)


def _feasible(chain: ChainParams):
    lv = chain.grid.levels
    for combo in itertools.product(range(len(lv)), repeat=chain.K):
        if sum(lv[i] for i in combo) <= chain.r:
            yield combo


def retailer_cost(k: int, i, d, chain: ChainParams):
    """``f_k 1{i>0} + h_k (i-d)^+ + b_k (d-i)^+``; broadcasts."""
    i = np.asarray(i, dtype=float)
    d = np.asarray(d, dtype=float)
    out = chain.f[k] * (i > 0) + chain.h[k] * np.maximum(i - d, 0) + chain.b[k] * np.maximum(d - i, 0)
    return float(out) if out.ndim == 0 else out


def warehouse_cost(levels, chain: ChainParams):
    """Warehouse cost of allocation(s) given as level tuples along the last axis.

    Push mode: ``f0 + h0 (r - sum)^+``. Pull mode: ``f0 1{sum > 0}``.
    """
    total = np.asarray(levels, dtype=float).sum(axis=-1)
    if chain.pull:
        out = chain.f0 * (total > 0)
    else:
        out = chain.f0 + chain.h0 * np.maximum(chain.r - total, 0)
    return float(out) if np.ndim(out) == 0 else out


def allocation_cost(levels, demands, chain: ChainParams):
    """True total cost of allocation(s) ``levels`` (..., K) against demands (..., K)."""
    levels = np.asarray(levels)
    demands = np.asarray(demands)
    total = warehouse_cost(levels, chain)
    for k in range(chain.K):
        total = total + retailer_cost(k, levels[..., k], demands[..., k], chain)
    return total


class AllocationSpace:
    """Enumerated allocations with the lookup tables the estimator needs."""

    def __init__(self, chain: ChainParams):
        self.chain = chain
        self.index = enumerate_allocations(chain)
        self.levels = chain.grid.array[self.index]
        self.A = self.index.shape[0]
        N = chain.grid.N
        # onehot[k, a, n] = 1 iff allocation a gives retailer k the n-th level
        self.onehot = np.zeros((chain.K, self.A, N))
        for k in range(chain.K):
            self.onehot[k, np.arange(self.A), self.index[:, k]] = 1.0
        self.warehouse = np.asarray(warehouse_cost(self.levels, chain), dtype=float).reshape(self.A)
        self._pos = {tuple(map(int, row)): a for a, row in enumerate(self.levels)}

    def position(self, levels: Sequence[int]) -> int:
        return self._pos[tuple(int(x) for x in levels)]

    def exploration_pmf(self) -> np.ndarray:
        return exploration_pmf(self.chain, self)

    def costs(self, demands: np.ndarray) -> np.ndarray:
        """True cost of every allocation for each demand vector: ``(T, K) -> (T, A)``."""
        d = np.asarray(demands)
        out = np.broadcast_to(self.warehouse, d.shape[:-1] + (self.A,)).copy()
        for k in range(self.chain.K):
            out += retailer_cost(k, self.levels[:, k], d[..., k, None], self.chain)
        return out


def exploration_pmf(chain: ChainParams, space: Optional[AllocationSpace] = None) -> np.ndarray:
    """Pick a retailer uniformly, give it a uniform grid level, fill the rest; masses of equal allocations add."""
    space = space or AllocationSpace(chain)
    K, N = chain.K, chain.grid.N
    mu = np.zeros(space.A)
    for k in range(K):
        for level in chain.grid.levels:
            alloc = [chain.fill_level] * K
            alloc[k] = level
            mu[space.position(alloc)] += 1.0 / (K * N)
    return mu


def marginal_tails(probs: np.ndarray, space: AllocationSpace) -> np.ndarray:
    """``P(I^(k) >= level_n)`` for every retailer and level: ``(..., A) -> (..., K, N)``."""
    marg = np.einsum("...a,kan->...kn", probs, space.onehot)
    return tail_probabilities(marg)


def marginal_tail(probs: np.ndarray, space: AllocationSpace, k: int, i: int) -> float:
    n = space.chain.grid.index(i)
    return float(marginal_tails(np.asarray(probs, dtype=float), space)[k, n])


def estimate_allocation_costs(chosen: np.ndarray, sales: np.ndarray, probs: np.ndarray,
                              space: AllocationSpace) -> np.ndarray:
    """Estimated cost of every allocation from per-retailer censored sales.

    ``chosen`` and ``sales`` are ``(R, K)`` level arrays, ``probs`` is
    ``(R, A)``; returns ``(R, A)``. Each retailer's term is importance
    weighted by its own marginal tail probability.
    """
    chain = space.chain
    lv = chain.grid.array.astype(float)
    chosen = np.atleast_2d(chosen)
    sales = np.atleast_2d(sales)
    probs = np.atleast_2d(probs)
    tails = marginal_tails(probs, space)
    out = np.broadcast_to(space.warehouse, (probs.shape[0], space.A)).copy()
    for k in range(chain.K):
        s = np.minimum(lv[None, :], sales[:, k, None])
        val = (chain.h[k] * lv[None, :] - (chain.h[k] + chain.b[k]) * s
               + chain.f[k] * (lv[None, :] > 0) + chain.beta)
        seen = lv[None, :] <= chosen[:, k, None]
        per_level = np.where(seen, val / np.where(seen, tails[:, k, :], 1.0), 0.0)
        out += per_level[:, space.index[:, k]]
    return out


def conditional_allocation_mean(space: AllocationSpace, demands: Sequence[int]) -> np.ndarray:
    """Analytic mean estimate of each allocation: warehouse cost plus per-retailer ``v + f 1{i>0} + beta``."""
    chain = space.chain
    out = space.warehouse.copy()
    for k in range(chain.K):
        i = space.levels[:, k]
        s = np.minimum(i, demands[k])
        out += chain.h[k] * i - (chain.h[k] + chain.b[k]) * s + chain.f[k] * (i > 0) + chain.beta
    return out


def theorem3_parameters(T: int, N: int, K: int, beta: float) -> tuple[float, float]:
    gamma = 1.0 / T
    eta = math.sqrt(math.log(N) / (beta ** 2 * K * T * math.log(T * N * K + N + 2)))
    return gamma, eta


def second_moment_bound(K: int, N: int, beta: float, f: float, gamma: float) -> float:
    return (16 * K ** 2 * beta ** 2 * math.log(K * N ** 3 / gamma + N + 2)
            + 16 * K ** 2 * beta ** 2 + 2 * (f + K * beta) ** 2)


class CombinatorialEWF:
    """Exponential weights over the enumerated allocations mixed with the exploration pmf.

    Drives ``R`` replicas in lockstep like the single-retailer policies.
    """

    name = "combinatorial-ewf"

    def __init__(self, chain: ChainParams, horizon: int, gamma: Optional[float] = None,
                 eta: Optional[float] = None, space: Optional[AllocationSpace] = None):
        self.chain = chain
        self.space = space or AllocationSpace(chain)
        g, e = theorem3_parameters(horizon, chain.grid.N, chain.K, chain.beta)
        self.gamma = g if gamma is None else float(gamma)
        self.eta = e if eta is None else float(eta)
        self.mu = self.space.exploration_pmf()

    def reset(self, seeds) -> "CombinatorialEWF":
        seeds = list(seeds) if isinstance(seeds, (list, tuple)) else [seeds]
        self.R = len(seeds)
        self._uniforms = ReplicaUniforms(seeds)
        self.log_weights = np.zeros((self.R, self.space.A))
        self.probs = None
        return self

    def next_distribution(self) -> np.ndarray:
        lw = self.log_weights
        w = np.exp(lw - lw.max(axis=1, keepdims=True))
        self.probs = (1 - self.gamma) * w / w.sum(axis=1, keepdims=True) + self.gamma * self.mu
        return self.probs

    def select(self) -> np.ndarray:
        return sample_indices(self.next_distribution(), self._uniforms.next())

    def observe(self, chosen_levels: np.ndarray, sales: np.ndarray) -> None:
        est = estimate_allocation_costs(chosen_levels, sales, self.probs, self.space)
        lw = self.log_weights - self.eta * est
        self.log_weights = lw - lw.max(axis=1, keepdims=True)

    def parameters(self) -> dict:
        return {"gamma": self.gamma, "eta": self.eta, "allocations": self.space.A}


@dataclass
class ChainRecord:
    run: int
    allocations: np.ndarray
    demands: np.ndarray
    costs: np.ndarray
    policy: str = CombinatorialEWF.name

    @property
    def cum_costs(self) -> np.ndarray:
        return np.cumsum(self.costs)


def run_chain(policy: CombinatorialEWF, demands: np.ndarray, seeds: Sequence,
              runs: Optional[Sequence[int]] = None) -> list[ChainRecord]:
    """Play every replica against its ``(T, K)`` demand block; ``demands`` is ``(R, T, K)``."""
    demands = np.asarray(demands, dtype=np.int64)
    if demands.ndim == 2:
        demands = demands[None]
    R, T, K = demands.shape
    space = policy.space
    policy.reset(list(seeds))
    alloc = np.empty((R, T), dtype=np.int32)
    for t in range(T):
        a = policy.select()
        lv = space.levels[a]
        policy.observe(lv, np.minimum(lv, demands[:, t, :]))
        alloc[:, t] = a
    runs = range(R) if runs is None else runs
    out = []
    for n, r in enumerate(runs):
        lv = space.levels[alloc[n]]
        costs = np.asarray(allocation_cost(lv, demands[n], space.chain), dtype=float)
        out.append(ChainRecord(r, alloc[n], demands[n], costs))
    return out


def best_fixed_allocation(demands: np.ndarray, space: AllocationSpace) -> tuple[tuple[int, ...], np.ndarray]:
    """Best allocation on the whole sequence and the prefix-optimal cost curve."""
    cum = np.cumsum(space.costs(np.asarray(demands)), axis=0)
    best = int(np.argmin(cum[-1]))
    return tuple(int(x) for x in space.levels[best]), cum.min(axis=1)


def chain_regret(record: ChainRecord, space: AllocationSpace) -> np.ndarray:
    _, bench = best_fixed_allocation(record.demands, space)
    return record.cum_costs - bench
