"""Uniform subset sampling and exact hypergeometric variates.

Hypergeometric variates come from inverse-transform sampling over the exact
pmf. The pmf is built in log space from the ratio recurrence

    P(r + 1) / P(r) = (K - r)(d - r) / ((r + 1)(N - K - d + r + 1))

which stays accurate when the population is astronomically large (MSG with
tiny delta pads the ground set to ~1e11 virtual elements).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .core import PreconditionError


def sample_without_replacement(pool: Sequence[int], m: int, rng: np.random.Generator) -> list[int]:
    """Draw ``m`` distinct items of ``pool`` uniformly (partial Fisher-Yates)."""
    size = len(pool)
    if m < 0 or m > size:
        raise PreconditionError(f"cannot draw {m} items from a pool of {size}")
    if m == 0:
        return []
    # Sparse swaps: only the first m slots are ever read, so the pool is never copied.
    swapped: dict[int, int] = {}
    out = []
    for i, j in enumerate(rng.integers(np.arange(m), size).tolist()):
        out.append(pool[swapped.get(j, j)])
        swapped[j] = swapped.get(i, i)
    return out


@dataclass(frozen=True)
class HypergeomParams:
    """Number of target items among ``draws`` taken from ``population``."""

    draws: int
    targets: int
    population: int

    def __post_init__(self):
        if not (0 <= self.targets <= self.population and 0 <= self.draws <= self.population):
            raise PreconditionError(
                f"invalid hypergeometric parameters draws={self.draws} "
                f"targets={self.targets} population={self.population}")

    @property
    def support(self) -> tuple[int, int]:
        lo = max(0, self.draws + self.targets - self.population)
        hi = min(self.draws, self.targets)
        return lo, hi

    @property
    def mean(self) -> float:
        return self.draws * self.targets / self.population if self.population else 0.0

    @property
    def variance(self) -> float:
        N, K, d = self.population, self.targets, self.draws
        if N <= 1:
            return 0.0
        return d * (K / N) * (1 - K / N) * (N - d) / (N - 1)


@lru_cache(maxsize=4096)
def _pmf_cdf(draws: int, targets: int, population: int) -> tuple[int, np.ndarray, np.ndarray]:
    lo = max(0, draws + targets - population)
    hi = min(draws, targets)
    logw = np.empty(hi - lo + 1)
    logw[0] = 0.0
    rest = population - targets
    for t, r in enumerate(range(lo, hi)):
        logw[t + 1] = logw[t] + (math.log(targets - r) + math.log(draws - r)
                                 - math.log(r + 1) - math.log(rest - draws + r + 1))
    w = np.exp(logw - logw.max())
    pmf = w / w.sum()
    cdf = np.cumsum(pmf)
    cdf[-1] = 1.0
    pmf.setflags(write=False)
    cdf.setflags(write=False)
    return lo, pmf, cdf


def hypergeometric_pmf(p: HypergeomParams) -> tuple[int, np.ndarray]:
    """Return ``(lo, pmf)`` where ``pmf[j]`` is P(r = lo + j)."""
    lo, pmf, _ = _pmf_cdf(p.draws, p.targets, p.population)
    return lo, pmf


def hypergeometric_draw(p: HypergeomParams, rng: np.random.Generator, size: int | None = None):
    """Inverse-transform hypergeometric variate(s).

    Consumes exactly one uniform per variate, including degenerate cases.
    """
    lo, _, cdf = _pmf_cdf(p.draws, p.targets, p.population)
    u = rng.random(size)
    r = lo + np.searchsorted(cdf, u, side="right")
    if size is None:
        return int(min(r, lo + len(cdf) - 1))
    return np.minimum(r, lo + len(cdf) - 1).astype(np.int64)
