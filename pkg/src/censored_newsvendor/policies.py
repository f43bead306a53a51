"""Single-retailer inventory policies.

Every policy object drives ``R`` independent replicas in lockstep: state
arrays carry a leading replica axis and each replica draws its randomness
from its own seeded stream, so a replica's trajectory depends only on its
seed and its demand sequence, never on which batch it ran in. A single run
is simply ``R = 1``.

Each period the arena calls :meth:`Policy.select` once and then
:meth:`Policy.observe` once with the resulting :class:`BatchFeedback`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .core import ActionGrid, CostParams, cost_matrix
from .estimators import censored_estimates

INFORMATION_LEVELS = ("censored", "partially-censored", "full")


# ---------------------------------------------------------------------------
# parameter schedules


def theorem1_parameters(T: int, N: int, beta: float) -> tuple[float, float]:
    """``(gamma, eta)`` tuned for the expected-regret guarantee of EWF."""
    gamma = 1.0 / (2.0 * beta * T)
    eta = math.sqrt(math.log(N) / (4.0 * beta ** 2 * T * math.log(2.0 * beta * T * N ** 3 + N + 2)))
    return gamma, eta


def experiment_parameters(T: int, N: int, beta: float, S: int = 1) -> tuple[float, float, float]:
    """``(gamma, eta, alpha)`` used for the numerical experiments.

    ``S = 1`` gives the EWF schedule; FSF uses its anticipated switch count.
    """
    if S < 1:
        raise ValueError("S must be at least 1")
    gamma = 1.0 / (2.0 * beta * T)
    eta = math.sqrt(S * math.log(N) / (4.0 * beta ** 2 * T))
    return gamma, eta, 1.0 / T


def theorem2_parameters(T: int, N: int, beta: float, S: Optional[int] = None) -> tuple[float, float, float]:
    """``(alpha, gamma, eta)`` for the tracking-regret guarantee of FSF.

    Without ``S`` the switch-agnostic learning rate is returned; with ``S``
    the rate is scaled by ``sqrt(S)``.
    """
    alpha = 1.0 / T
    gamma = 1.0 / (2.0 * beta * T)
    scale = 1.0 if S is None else float(S)
    eta = math.sqrt(scale * math.log(N * T) / (4.0 * beta ** 2 * T * math.log(2.0 * beta * T * N ** 3 + N + 2)))
    return alpha, gamma, eta


def theorem1_regret_bound(T: int, N: int, beta: float) -> float:
    return (4 * beta * math.sqrt(T * math.log(N) * math.log(2 * beta * T * N ** 3 + N + 2))
            + 2 * beta * math.sqrt(T * math.log(N)) + 1)


# ---------------------------------------------------------------------------
# exponential weights and fixed share


@dataclass(frozen=True)
class EwfState:
    log_weights: np.ndarray
    eta: float
    gamma: float

    @classmethod
    def initial(cls, N: int, eta: float, gamma: float, replicas: Optional[int] = None) -> "EwfState":
        shape = (N,) if replicas is None else (replicas, N)
        return cls(np.zeros(shape), eta, gamma)


def mix_with_uniform(weights: np.ndarray, gamma: float) -> np.ndarray:
    """``(1 - gamma) * w / sum(w) + gamma / N`` along the last axis."""
    N = weights.shape[-1]
    return (1.0 - gamma) * weights / weights.sum(axis=-1, keepdims=True) + gamma / N


def ewf_distribution(state: EwfState) -> np.ndarray:
    lw = state.log_weights
    w = np.exp(lw - lw.max(axis=-1, keepdims=True))
    return mix_with_uniform(w, state.gamma)


def ewf_update(state: EwfState, est_costs: np.ndarray) -> EwfState:
    """Multiply every weight by ``exp(-eta * cost)``; stored shifted so the max log-weight is 0."""
    lw = state.log_weights - state.eta * np.asarray(est_costs, dtype=float)
    return replace(state, log_weights=lw - lw.max(axis=-1, keepdims=True))


@dataclass(frozen=True)
class FsfState:
    weights: np.ndarray
    eta: float
    gamma: float
    alpha: float
    switches: Optional[int] = None

    @classmethod
    def initial(cls, N: int, eta: float, gamma: float, alpha: float,
                replicas: Optional[int] = None, switches: Optional[int] = None) -> "FsfState":
        shape = (N,) if replicas is None else (replicas, N)
        return cls(np.ones(shape), eta, gamma, alpha, switches)


def fsf_distribution(state: FsfState) -> np.ndarray:
    return mix_with_uniform(state.weights, state.gamma)


_RESCALE_LO, _RESCALE_HI = 1e-100, 1e100


def fsf_update(state: FsfState, est_costs: np.ndarray) -> FsfState:
    """``W_i <- W_i exp(-eta c_i) + (alpha/N) sum_j W_j``.

    Rows whose total leaves ``[1e-100, 1e100]`` are rescaled to sum 1; the
    update is homogeneous in ``W`` so the distribution is unaffected.
    """
    W = state.weights
    N = W.shape[-1]
    total = W.sum(axis=-1, keepdims=True)
    new = W * np.exp(-state.eta * np.asarray(est_costs, dtype=float)) + (state.alpha / N) * total
    s = new.sum(axis=-1, keepdims=True)
    off = (s < _RESCALE_LO) | (s > _RESCALE_HI)
    if np.any(off):
        new = np.where(off, new / s, new)
    return replace(state, weights=new)


# ---------------------------------------------------------------------------
# AIM (online gradient descent with randomized rounding)


@dataclass(frozen=True)
class AimState:
    x: float
    step_scale: float
    use_indicator: bool
    t: int = 0


def default_aim_step_scale(p: CostParams) -> float:
    """``1 / (h + b)``: the auxiliary point moves at most one unit per period."""
    return 1.0 / (p.h + p.b)


def aim_round(x: float, rng: np.random.Generator | float) -> int:
    """``floor(x) + Bernoulli(x - floor(x))``; ``rng`` may be a uniform draw."""
    u = rng.random() if isinstance(rng, np.random.Generator) else float(rng)
    f = math.floor(x)
    return int(f + (u < x - f))


def aim_gradient(x, level, sales, p: CostParams, indicator=None):
    """Derivative estimate used by AIM; broadcasts over replicas.

    With ``indicator`` (``d <= I``) the unbiased estimate is returned,
    otherwise the sales-only estimate ``-b + (h+b) 1{sales <= I - 1}``.
    """
    level = np.asarray(level)
    sales = np.asarray(sales)
    short = sales <= level - 1  # equals 1{d <= I-1} since sales = min(I, d)
    if indicator is None:
        return -p.b + (p.h + p.b) * short
    at_floor = level == np.floor(x)
    return -p.b + (p.h + p.b) * np.where(at_floor, np.asarray(indicator, dtype=bool), short)


def aim_step(state: AimState, fb, p: CostParams) -> AimState:
    """One projected gradient step ``x <- clamp(x - alpha_t g, 0, D)`` with ``alpha_t = scale/sqrt(t)``."""
    if state.use_indicator and fb.lost_sales_indicator is None:
        raise ValueError("unbiased AIM needs the lost-sales indicator")
    ind = fb.lost_sales_indicator if state.use_indicator else None
    g = float(aim_gradient(state.x, fb.chosen_level, fb.sales, p, ind))
    t = state.t + 1
    x = min(max(state.x - state.step_scale / math.sqrt(t) * g, 0.0), float(p.D))
    return replace(state, x=x, t=t)


# ---------------------------------------------------------------------------
# empirical critical quantile


@dataclass
class EmpiricalQuantileState:
    counts: np.ndarray
    fractile: float


def quantile_indices(counts: np.ndarray, levels: np.ndarray, h: float, b: float) -> np.ndarray:
    """Index of the smallest grid level whose empirical CDF reaches ``b/(b+h)``.

    Works row-wise on ``counts`` of shape ``(R, D+1)``. Empty histories map to
    index 0; if no level qualifies the largest level is used.
    """
    cum = np.cumsum(counts, axis=-1)[:, levels]
    n = counts.sum(axis=-1, keepdims=True)
    ok = cum * (h + b) >= b * n
    idx = np.where(ok.any(axis=-1), ok.argmax(axis=-1), levels.size - 1)
    return np.where(n[:, 0] == 0, 0, idx)


def greedy_full_level(state: EmpiricalQuantileState, grid: ActionGrid) -> int:
    q = state.fractile
    counts = np.asarray(state.counts, dtype=float)[None, :]
    # fractile b/(b+h) with h = 1 - q, b = q reproduces the comparison exactly
    return grid.levels[int(quantile_indices(counts, grid.array, 1.0 - q, q)[0])]


def exponential_schedule(T: int, base: float = math.e) -> np.ndarray:
    """Periods ``ceil(base**k)`` for ``k = 0, 1, ...`` up to ``T`` (1-indexed)."""
    out, k = set(), 0
    while True:
        t = math.ceil(base ** k)
        if t > T:
            break
        out.add(t)
        k += 1
    return np.array(sorted(out), dtype=np.int64)


# ---------------------------------------------------------------------------
# replica machinery


class ReplicaUniforms:
    """One seeded uniform stream per replica, drawn in blocks."""

    def __init__(self, seeds: Sequence, block: int = 4096):
        self._gens = [np.random.default_rng(s) for s in seeds]
        self._block = block
        self._buf = np.empty((0, len(self._gens)))
        self._pos = 0

    def next(self) -> np.ndarray:
        if self._pos >= self._buf.shape[0]:
            self._buf = np.stack([g.random(self._block) for g in self._gens], axis=1)
            self._pos = 0
        u = self._buf[self._pos]
        self._pos += 1
        return u


def sample_indices(probs: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Inverse-CDF sampling of one grid index per row."""
    cdf = np.cumsum(probs, axis=-1)
    idx = (cdf <= u[:, None] * cdf[:, -1:]).sum(axis=-1)
    return np.minimum(idx, probs.shape[-1] - 1)


@dataclass
class BatchFeedback:
    """Per-replica feedback for one period; optional fields depend on the information mode."""

    index: np.ndarray
    level: np.ndarray
    sales: np.ndarray
    lost_sales_indicator: Optional[np.ndarray] = None
    true_demand: Optional[np.ndarray] = None

    @classmethod
    def from_demand(cls, index, level, demand, mode: str) -> "BatchFeedback":
        sales = np.minimum(level, demand)
        if mode == "censored":
            return cls(index, level, sales)
        if mode == "partially-censored":
            return cls(index, level, sales, demand <= level)
        return cls(index, level, sales, demand <= level, demand)


def _as_seeds(seed) -> list:
    if isinstance(seed, (list, tuple)):
        return list(seed)
    return [seed]


class Policy:
    """Base class; subclasses fill in ``_reset_state``, ``next_distribution`` and ``observe``."""

    requires = "censored"
    randomized = True

    def __init__(self, grid: ActionGrid, params: CostParams, name: Optional[str] = None):
        self.grid = grid
        self.params = params
        self.levels = grid.array
        self.name = name or type(self).__name__.lower()
        self.R = 0

    def reset(self, seed) -> "Policy":
        seeds = _as_seeds(seed)
        self.R = len(seeds)
        self._uniforms = ReplicaUniforms(seeds)
        self._reset_state()
        return self

    def _reset_state(self):
        raise NotImplementedError

    def next_distribution(self) -> Optional[np.ndarray]:
        """Current ``(R, N)`` distribution, or ``None`` for deterministic rules."""
        return None

    def _choose(self, u: np.ndarray) -> np.ndarray:
        return sample_indices(self.next_distribution(), u)

    def select(self) -> np.ndarray:
        """Grid indices played this period; consumes one uniform per replica."""
        return self._choose(self._uniforms.next())

    def observe(self, fb: BatchFeedback) -> None:
        raise NotImplementedError

    def parameters(self) -> dict:
        return {}


class ExponentialWeights(Policy):
    """EWF with the censored estimator, or with true costs when ``full_information``."""

    def __init__(self, grid, params, gamma: float, eta: float, full_information: bool = False, name=None):
        super().__init__(grid, params, name or ("ewf-full" if full_information else "ewf"))
        self.gamma, self.eta = gamma, eta
        self.full_information = full_information
        self.requires = "full" if full_information else "censored"

    def _reset_state(self):
        self.state = EwfState.initial(self.grid.N, self.eta, self.gamma, self.R)
        self.probs = None

    def next_distribution(self):
        self.probs = ewf_distribution(self.state)
        return self.probs

    def _costs(self, fb: BatchFeedback) -> np.ndarray:
        if self.full_information:
            return cost_matrix(fb.true_demand, self.levels, self.params)
        return censored_estimates(self.levels, fb.level, fb.sales, self.probs, self.params)

    def observe(self, fb):
        self.state = ewf_update(self.state, self._costs(fb))

    def parameters(self):
        return {"gamma": self.gamma, "eta": self.eta}


class FixedShare(ExponentialWeights):
    """FSF: exponential weights plus an ``alpha/N`` share of the total weight each period."""

    def __init__(self, grid, params, gamma, eta, alpha: float, switches: Optional[int] = None,
                 full_information: bool = False, name=None):
        super().__init__(grid, params, gamma, eta, full_information,
                         name or ("fsf-full" if full_information else "fsf"))
        self.alpha, self.switches = alpha, switches

    def _reset_state(self):
        self.state = FsfState.initial(self.grid.N, self.eta, self.gamma, self.alpha, self.R, self.switches)
        self.probs = None

    def next_distribution(self):
        self.probs = fsf_distribution(self.state)
        return self.probs

    def observe(self, fb):
        self.state = fsf_update(self.state, self._costs(fb))

    def parameters(self):
        return {"gamma": self.gamma, "eta": self.eta, "alpha": self.alpha}


class AdaptiveInventory(Policy):
    """AIM: projected online gradient descent on ``[0, D]`` with randomized rounding.

    ``use_indicator`` selects the unbiased derivative estimate (needs the
    lost-sales indicator); otherwise the sales-only estimate is used. The
    auxiliary point is rounded to the nearest grid levels around it, so the
    grid should be the full integer range it spans.
    """

    def __init__(self, grid, params, step_scale: Optional[float] = None, use_indicator: bool = False,
                 x0: float = 0.0, name=None):
        super().__init__(grid, params, name or ("aim-unbiased" if use_indicator else "aim"))
        self.step_scale = default_aim_step_scale(params) if step_scale is None else float(step_scale)
        self.use_indicator = use_indicator
        self.requires = "partially-censored" if use_indicator else "censored"
        self.lo, self.hi = float(grid.levels[0]), float(grid.levels[-1])
        self.x0 = min(max(float(x0), self.lo), self.hi)

    def _reset_state(self):
        self.x = np.full(self.R, self.x0)
        self.t = 0
        self._index_of = np.full(self.params.D + 2, -1, dtype=np.int64)
        self._index_of[self.levels] = np.arange(self.grid.N)

    def next_distribution(self):
        return None

    def _choose(self, u):
        f = np.floor(self.x)
        level = (f + (u < self.x - f)).astype(np.int64)
        idx = self._index_of[level]
        if np.any(idx < 0):
            raise ValueError("AIM rounded to a level outside the grid; use a contiguous grid")
        return idx

    def observe(self, fb):
        if self.use_indicator and fb.lost_sales_indicator is None:
            raise ValueError("unbiased AIM needs the lost-sales indicator")
        ind = fb.lost_sales_indicator if self.use_indicator else None
        g = aim_gradient(self.x, fb.level, fb.sales, self.params, ind)
        self.t += 1
        self.x = np.clip(self.x - self.step_scale / math.sqrt(self.t) * g, self.lo, self.hi)

    def parameters(self):
        return {"step_scale": self.step_scale, "x0": self.x0}


class GreedyQuantile(Policy):
    """Full information: order the empirical critical quantile of all demand seen so far."""

    requires = "full"
    randomized = False

    def __init__(self, grid, params, name=None):
        super().__init__(grid, params, name or "greedy-full")

    def _reset_state(self):
        self.counts = np.zeros((self.R, self.params.D + 1))

    def _choose(self, u):
        return quantile_indices(self.counts, self.levels, self.params.h, self.params.b)

    def observe(self, fb):
        self.counts[np.arange(self.R), fb.true_demand] += 1


class AlternatingExploration(Policy):
    """Generic alternating exploration/exploitation baseline.

    Exploration periods stock the largest grid level and record the sales as
    a demand sample whenever they are uncensored; all other periods stock the
    empirical critical quantile of those samples.
    """

    randomized = False

    def __init__(self, grid, params, horizon: int, schedule: Optional[Sequence[int]] = None, name=None):
        super().__init__(grid, params, name or "aee")
        sched = exponential_schedule(horizon) if schedule is None else np.asarray(schedule, dtype=np.int64)
        self.explore = np.zeros(horizon + 2, dtype=bool)
        self.explore[sched[(sched >= 1) & (sched <= horizon)]] = True
        self.horizon = horizon

    def _reset_state(self):
        self.counts = np.zeros((self.R, self.params.D + 1))
        self.t = 0

    def _choose(self, u):
        t = self.t + 1
        if t < self.explore.size and self.explore[t]:
            return np.full(self.R, self.grid.N - 1)
        return quantile_indices(self.counts, self.levels, self.params.h, self.params.b)

    def observe(self, fb):
        self.t += 1
        if self.t < self.explore.size and self.explore[self.t]:
            top = self.levels[-1]
            uncensored = (fb.sales < top) | (top == self.params.D)
            rows = np.nonzero(uncensored)[0]
            self.counts[rows, fb.sales[rows]] += 1

    def parameters(self):
        return {"exploration_periods": int(self.explore.sum())}


class FixedLevel(Policy):
    """Always stocks the same level."""

    randomized = False

    def __init__(self, grid, params, level: int, name=None):
        super().__init__(grid, params, name or f"fixed-{level}")
        self.index = grid.index(level)

    def _reset_state(self):
        pass

    def _choose(self, u):
        return np.full(self.R, self.index)

    def observe(self, fb):
        pass


POLICY_KINDS = ("ewf", "fsf", "ewf-full", "fsf-full", "aee", "greedy-full",
                "aim", "aim-unbiased", "aim-full", "fixed")


def make_policy(kind: str, grid: ActionGrid, params: CostParams, horizon: int,
                name: Optional[str] = None, **opts) -> Policy:
    """Build a policy by kind, resolving unset learning parameters automatically.

    ``schedule="experiment"`` (default) uses :func:`experiment_parameters`;
    ``schedule="theorem"`` uses :func:`theorem1_parameters` for EWF and
    :func:`theorem2_parameters` for FSF.
    """
    if kind not in POLICY_KINDS:
        raise ValueError(f"unknown policy {kind!r}; known: {', '.join(POLICY_KINDS)}")
    T, N, beta = horizon, grid.N, params.beta
    schedule = opts.pop("schedule", "experiment")
    if kind in ("ewf", "ewf-full", "fsf", "fsf-full"):
        fsf = kind.startswith("fsf")
        S = int(opts.pop("switches", 3 if fsf else 1))
        if schedule == "experiment":
            gamma, eta, alpha = experiment_parameters(T, N, beta, S)
        elif schedule == "theorem":
            if fsf:
                alpha, gamma, eta = theorem2_parameters(T, N, beta, S)
            else:
                gamma, eta = theorem1_parameters(T, N, beta)
                alpha = 1.0 / T
        else:
            raise ValueError(f"unknown schedule {schedule!r}")
        gamma = float(opts.pop("gamma", gamma))
        eta = float(opts.pop("eta", eta))
        alpha = float(opts.pop("alpha", alpha))
        full = kind.endswith("-full")
        if opts:
            raise ValueError(f"unexpected options for {kind}: {sorted(opts)}")
        if fsf:
            return FixedShare(grid, params, gamma, eta, alpha, S, full, name)
        return ExponentialWeights(grid, params, gamma, eta, full, name)
    if kind == "aee":
        pol = AlternatingExploration(grid, params, horizon, opts.pop("exploration_periods", None), name)
    elif kind == "greedy-full":
        pol = GreedyQuantile(grid, params, name)
    elif kind.startswith("aim"):
        pol = AdaptiveInventory(grid, params, opts.pop("step_scale", None),
                                use_indicator=kind != "aim", x0=float(opts.pop("x0", 0.0)),
                                name=name or kind)
        if kind == "aim-full":
            pol.requires = "full"
    else:
        if "level" not in opts:
            raise ValueError("fixed policy needs a level")
        pol = FixedLevel(grid, params, int(opts.pop("level")), name)
    if opts:
        raise ValueError(f"unexpected options for {kind}: {sorted(opts)}")
    return pol
