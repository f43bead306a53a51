"""Importance-weighted cost estimates built from censored sales.

Stocking ``I_t`` reveals ``min(i, d_t)`` for every level ``i <= I_t``, so each
such level receives an estimate reweighted by the probability that the
policy would have stocked at least ``i``. Levels above ``I_t`` receive 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import ActionGrid, CostParams, newsvendor_cost, observed_value


@dataclass(frozen=True)
class ActionDistribution:
    """Probabilities aligned with the levels of an :class:`ActionGrid`."""

    probabilities: np.ndarray
    floor: float = 0.0

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float)
        if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12 * max(1, p.size):
            raise ValueError("probabilities must be nonnegative and sum to 1")
        object.__setattr__(self, "probabilities", p)


@dataclass(frozen=True)
class Feedback:
    """What the firm sees after one period.

    ``sales`` is always present. ``lost_sales_indicator`` (``d_t <= I_t``) is
    only filled in the partially censored mode and ``true_demand`` only under
    full information.
    """

    chosen_level: int
    sales: int
    lost_sales_indicator: Optional[bool] = None
    true_demand: Optional[int] = None

    def __post_init__(self):
        if not 0 <= self.sales <= self.chosen_level:
            raise ValueError("sales must lie in [0, chosen_level]")
        if self.true_demand is not None and self.sales != min(self.chosen_level, self.true_demand):
            raise ValueError("sales inconsistent with true demand")

    @classmethod
    def from_demand(cls, level: int, demand: int, mode: str = "censored") -> "Feedback":
        sales = min(level, demand)
        if mode == "censored":
            return cls(level, sales)
        if mode == "partially-censored":
            return cls(level, sales, lost_sales_indicator=demand <= level)
        if mode == "full":
            return cls(level, sales, lost_sales_indicator=demand <= level, true_demand=demand)
        raise ValueError(f"unknown information mode {mode!r}")


def tail_probabilities(probs: np.ndarray) -> np.ndarray:
    """Suffix sums ``P(I >= level_k)`` along the last axis."""
    return np.cumsum(probs[..., ::-1], axis=-1)[..., ::-1]


def tail_probability(dist: ActionDistribution, grid: ActionGrid, i: int) -> float:
    tail = float(dist.probabilities[grid.index(i):].sum())
    if tail <= 0:
        raise FloatingPointError(f"zero probability of stocking at least {i}")
    return tail


def censored_estimates(levels: np.ndarray, chosen: np.ndarray, sales: np.ndarray,
                       probs: np.ndarray, p: CostParams) -> np.ndarray:
    """Batched estimator: one row of grid-level estimates per replica.

    ``chosen`` and ``sales`` have shape ``(R,)``, ``probs`` has shape ``(R, N)``.
    """
    levels = np.asarray(levels)
    chosen = np.asarray(chosen)[:, None]
    sales = np.asarray(sales)[:, None]
    tails = tail_probabilities(probs)
    seen = levels[None, :] <= chosen
    values = p.h * levels[None, :] - (p.h + p.b) * np.minimum(levels[None, :], sales) + p.beta
    # the shifted value is nonnegative in exact arithmetic; drop rounding residue below zero
    values = np.maximum(values, 0.0)
    # unseen levels are exactly 0; guard the division so they never produce inf/nan
    return np.where(seen, values / np.where(seen, tails, 1.0), 0.0)


def estimate_costs(fb: Feedback, dist: ActionDistribution, grid: ActionGrid, p: CostParams) -> np.ndarray:
    """Estimated cost of every grid level given one round of censored feedback."""
    probs = np.asarray(dist.probabilities, dtype=float)
    if np.any(tail_probabilities(probs)[grid.array <= fb.chosen_level] <= 0):
        raise FloatingPointError("distribution lacks support above an observed level")
    return censored_estimates(grid.array, np.array([fb.chosen_level]), np.array([fb.sales]),
                              probs[None, :], p)[0]


def conditional_mean(i: int, d: int, p: CostParams) -> float:
    """Expected estimate of level ``i`` under demand ``d``: ``v_i^T S_i e_d + beta``."""
    return observed_value(i, min(i, d), p) + p.beta


def full_info_costs(d: int, grid: ActionGrid, p: CostParams) -> np.ndarray:
    return newsvendor_cost(grid.array, d, p)


def exploration_diagnostic(probs: np.ndarray) -> np.ndarray:
    """``sum_i p_i / P(I >= i)`` per row; bounded by ``2 log(N^3/gamma + N + 2) + 2``."""
    return (probs / tail_probabilities(probs)).sum(axis=-1)


def exploration_diagnostic_bound(N: int, gamma: float) -> float:
    return 2.0 * np.log(N ** 3 / gamma + N + 2) + 2.0
