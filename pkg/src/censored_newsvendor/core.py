"""Newsvendor cost model, action grids and the censored-feedback structure.

The repeated newsvendor stocks ``i`` units against demand ``d`` and pays
``h`` per unsold unit and ``b`` per unit of unmet demand. Only the sales
``min(i, d)`` are observed. The observation vectors below turn those sales
into numbers whose pairwise differences reproduce the cost differences
between any two inventory levels exactly (local observability).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


@dataclass(frozen=True)
class CostParams:
    """Overage rate ``h``, underage rate ``b`` and demand cap ``D``."""

    h: float
    b: float
    D: int

    def __post_init__(self):
        if not (self.h > 0 and self.b > 0):
            raise ValueError(f"cost rates must be positive, got h={self.h}, b={self.b}")
        if int(self.D) != self.D or self.D < 1:
            raise ValueError(f"D must be a positive integer, got {self.D}")
        object.__setattr__(self, "D", int(self.D))

    @property
    def beta(self) -> float:
        """Uniform bound ``D * max(h, b)`` on single-period cost magnitudes."""
        return self.D * max(self.h, self.b)

    @property
    def critical_fractile(self) -> float:
        return self.b / (self.b + self.h)


@dataclass(frozen=True)
class ActionGrid:
    """Strictly increasing set of admissible inventory levels within ``[0, D]``."""

    levels: tuple[int, ...]
    D: int

    def __init__(self, levels: Iterable[int], D: int):
        levels = tuple(int(x) for x in levels)
        if not levels:
            raise ValueError("grid must contain at least one level")
        if any(b <= a for a, b in zip(levels, levels[1:])):
            raise ValueError(f"grid levels must be strictly increasing: {levels}")
        if levels[0] < 0 or levels[-1] > D:
            raise ValueError(f"grid levels must lie in [0, {D}]: {levels}")
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "D", int(D))

    @classmethod
    def span(cls, lo: int, hi: int, D: int | None = None) -> "ActionGrid":
        """All integers ``lo..hi`` inclusive."""
        return cls(range(lo, hi + 1), hi if D is None else D)

    @property
    def N(self) -> int:
        return len(self.levels)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.levels, dtype=np.int64)

    def index(self, level: int) -> int:
        try:
            return self.levels.index(int(level))
        except ValueError:
            raise ValueError(f"{level} is not a grid level of {self.levels}") from None

    def __len__(self):
        return len(self.levels)

    def __iter__(self):
        return iter(self.levels)


def newsvendor_cost(i, d, p: CostParams):
    """``h (i - d)^+ + b (d - i)^+``; broadcasts over arrays."""
    i = np.asarray(i, dtype=float)
    d = np.asarray(d, dtype=float)
    out = p.h * np.maximum(i - d, 0.0) + p.b * np.maximum(d - i, 0.0)
    return float(out) if out.ndim == 0 else out


def cost_difference(i: int, j: int, d: int, p: CostParams) -> float:
    """``c(i, d) - c(j, d)`` evaluated through the three-case formula."""
    if i == j:
        return 0.0
    if i < j:
        return -cost_difference(j, i, d, p)
    if d <= j:
        return p.h * (i - j)
    if d < i:
        return p.h * i + p.b * j - (p.h + p.b) * d
    return p.b * (j - i)


def observed_value(i, sales_at_i, p: CostParams):
    """Value of ``v_i^T S_i e_d`` computed from the sales ``min(i, d)``.

    Equals ``h*i - (h+b)*min(i, d)``. Broadcasts over arrays.
    """
    i = np.asarray(i)
    s = np.asarray(sales_at_i)
    if np.any(s > i) or np.any(s < 0):
        raise ValueError("sales at level i must lie in [0, i]")
    out = p.h * i - (p.h + p.b) * s
    return float(out) if np.ndim(out) == 0 else out.astype(float)


def observation_vector(i: int, p: CostParams) -> np.ndarray:
    """Dense ``v_i`` of length ``i+1``; entry ``k`` (0-based) is ``h*i - (h+b)*k``."""
    return p.h * i - (p.h + p.b) * np.arange(i + 1, dtype=float)


def signal_matrix(i: int, D: int) -> np.ndarray:
    """Binary ``(i+1) x (D+1)`` matrix mapping demand ``d`` to sales ``min(i, d)``."""
    if not 0 <= i <= D:
        raise ValueError(f"level {i} outside [0, {D}]")
    S = np.zeros((i + 1, D + 1), dtype=np.int8)
    S[np.minimum(i, np.arange(D + 1)), np.arange(D + 1)] = 1
    return S


def check_local_observability(i: int, j: int, p: CostParams, tol: float = 1e-9) -> bool:
    """Exhaustively confirm the observation vectors reproduce ``c(i,d) - c(j,d)``."""
    for d in range(p.D + 1):
        lhs = observed_value(i, min(i, d), p) - observed_value(j, min(j, d), p)
        if abs(lhs - cost_difference(i, j, d, p)) > tol:
            return False
    return True


def cost_matrix(demands: Sequence[int] | np.ndarray, levels: np.ndarray, p: CostParams) -> np.ndarray:
    """``(T, N)`` matrix of per-period costs for every grid level."""
    d = np.asarray(demands, dtype=float)[:, None]
    lv = np.asarray(levels, dtype=float)[None, :]
    return p.h * np.maximum(lv - d, 0.0) + p.b * np.maximum(d - lv, 0.0)
