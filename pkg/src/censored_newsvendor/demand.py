"""Demand sequences: i.i.d. binomial, binomial with a low-demand window, constant, scripted."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

KINDS = ("iid-binomial", "shifted-binomial", "constant", "scripted")


@dataclass(frozen=True)
class DemandGenerator:
    kind: str
    horizon: int
    D: int
    trials: int = 30
    prob: float = 0.5
    prob_low: float = 0.1
    window: Optional[tuple[int, int]] = None
    value: int = 0
    path: Optional[str] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown demand kind {self.kind!r}; known: {', '.join(KINDS)}")
        if self.horizon < 1:
            raise ValueError("horizon must be positive")
        if self.kind in ("iid-binomial", "shifted-binomial"):
            if not 0 < self.trials <= self.D:
                raise ValueError(f"binomial trials must lie in [1, D={self.D}]")
            for q in (self.prob, self.prob_low):
                if not 0 <= q <= 1:
                    raise ValueError("success probabilities must lie in [0, 1]")
        if self.kind == "constant" and not 0 <= self.value <= self.D:
            raise ValueError(f"constant demand must lie in [0, {self.D}]")
        if self.kind == "scripted" and self.path is None:
            raise ValueError("scripted demand needs a path")

    def low_window(self) -> tuple[int, int]:
        """Closed 1-indexed window ``[ceil(T/5), floor(T/2)]`` unless overridden."""
        if self.window is not None:
            return self.window
        return math.ceil(self.horizon / 5), self.horizon // 2

    def success_probabilities(self) -> np.ndarray:
        q = np.full(self.horizon, self.prob)
        if self.kind == "shifted-binomial":
            lo, hi = self.low_window()
            q[lo - 1:hi] = self.prob_low
        return q


def load_scripted(path, D: int, horizon: Optional[int] = None) -> np.ndarray:
    """Read one integer per line; blank lines are ignored."""
    text = Path(path).read_text().split()
    try:
        d = np.array([int(x) for x in text], dtype=np.int64)
    except ValueError as err:
        raise ValueError(f"{path}: non-integer demand ({err})") from None
    if d.size == 0:
        raise ValueError(f"{path}: empty demand file")
    if np.any(d < 0) or np.any(d > D):
        raise ValueError(f"{path}: demand outside [0, {D}]")
    if horizon is not None:
        if d.size < horizon:
            raise ValueError(f"{path}: {d.size} demands but horizon {horizon}")
        d = d[:horizon]
    return d


def save_scripted(path, demands) -> None:
    Path(path).write_text("".join(f"{int(x)}\n" for x in demands))


def _binomial_by_bernoulli(rng: np.random.Generator, trials: int, q: np.ndarray, chunk: int = 1 << 15) -> np.ndarray:
    out = np.empty(q.size, dtype=np.int64)
    for s in range(0, q.size, chunk):
        qs = q[s:s + chunk]
        out[s:s + chunk] = (rng.random((qs.size, trials)) < qs[:, None]).sum(axis=1)
    return out


def generate(gen: DemandGenerator, seed) -> np.ndarray:
    """Demand sequence ``d_1..d_T`` as an int64 array; deterministic in ``seed``."""
    if gen.kind == "constant":
        return np.full(gen.horizon, gen.value, dtype=np.int64)
    if gen.kind == "scripted":
        return load_scripted(gen.path, gen.D, gen.horizon)
    rng = np.random.default_rng(seed)
    return _binomial_by_bernoulli(rng, gen.trials, gen.success_probabilities())
