"""Numeric checks of the deterministic inequalities behind the SG guarantee."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

SLACK = 1e-12


def lemma_eps_sides(n: int, k: int, epsilon: float) -> tuple[float, float]:
    """(1 - ln(1/eps)/k - 2/(n-k))^(k-1) and eps - 2(k-1)/(n-k)."""
    base = 1 - math.log(1 / epsilon) / k - 2 / (n - k)
    return base ** (k - 1), epsilon - 2 * (k - 1) / (n - k)


def lemma_eps_applies(n: int, k: int, epsilon: float) -> bool:
    return k >= 2 and n >= 3 * k and 1 / math.e <= epsilon < 1


def check_lemma_eps(n: int, k: int, epsilon: float) -> bool | None:
    """Lower bound on the survival factor; ``None`` when k >= 2, n >= 3k,
    1/e <= eps < 1 do not all hold."""
    if not lemma_eps_applies(n, k, epsilon):
        return None
    lhs, rhs = lemma_eps_sides(n, k, epsilon)
    return lhs >= rhs - SLACK


def check_lemma_lin(x: float, y: float, m: int) -> bool:
    """(x - y)^m >= x^m - m y for 0 <= y <= x <= 1."""
    if not (0 <= y <= x <= 1 and m >= 1 and int(m) == m):
        raise ValueError(f"need 0 <= y <= x <= 1 and integer m >= 1, got x={x}, y={y}, m={m}")
    return (x - y) ** m >= x ** m - m * y - SLACK


def gamma_lhs(gamma: float, x: float) -> float:
    if x == 1:
        return 1.0
    return math.exp((x - 1) * math.log1p(-gamma / x))


def check_lemma_gamma(gamma: float, x: float) -> bool:
    """(1 - gamma/x)^(x-1) >= exp(-gamma) for 0 <= gamma <= 1, x >= 1."""
    if not (0 <= gamma <= 1 and x >= 1):
        raise ValueError(f"need 0 <= gamma <= 1 and x >= 1, got gamma={gamma}, x={x}")
    return gamma_lhs(gamma, x) >= math.exp(-gamma) - SLACK


def _dense_unit(count: int, toward: float) -> np.ndarray:
    """``count`` points in [0, 1] clustered near ``toward`` (0 or 1)."""
    t = np.linspace(0, 1, count)
    u = np.concatenate([t, t ** 3])
    if toward == 1:
        u = 1 - u
    return np.unique(u)


@dataclass
class InequalityGrid:
    """Grid specification; every point is filtered through the lemma's hypotheses."""

    k_values: list[int] = field(default_factory=lambda: list(range(2, 31)) + [40, 60, 100, 250, 1000])
    n_offsets: list[int] = field(default_factory=lambda: [0, 1, 2, 3, 5, 10, 30, 100, 1000, 10**5])
    eps_steps: int = 40
    m_values: list[int] = field(default_factory=lambda: list(range(1, 21)) + [30, 50, 100, 1000])
    unit_steps: int = 30
    x_values: list[float] = field(default_factory=lambda: sorted(
        {1.0, 1.001, 1.01, 1.1, 1.5, 2.0, 3.0, 5.0, 10.0, 100.0, 1e3, 1e4, 1e6}
        | set(np.linspace(1, 20, 96).tolist()) | set(np.logspace(0, 6, 100).tolist())))

    def eps_points(self) -> np.ndarray:
        # Crowd eps = 1/e, where the slack is smallest, and the open end at 1.
        lo = 1 / math.e
        u = np.unique(np.concatenate([_dense_unit(self.eps_steps, 0), _dense_unit(self.eps_steps, 1)]))
        eps = lo + u * (1 - lo)
        return eps[eps < 1]

    def gamma_points(self) -> np.ndarray:
        return np.unique(np.concatenate([_dense_unit(self.unit_steps, 1), _dense_unit(self.unit_steps, 0)]))


@dataclass
class GridReport:
    name: str
    evaluated: int
    failures: list[tuple]

    @property
    def ok(self) -> bool:
        return not self.failures


def grid_lemma_eps(grid: InequalityGrid | None = None) -> GridReport:
    """Also requires the base of the power to be non-negative at every point."""
    grid = grid or InequalityGrid()
    evaluated, failures = 0, []
    for k in grid.k_values:
        for off in grid.n_offsets:
            n = 3 * k + off
            for eps in grid.eps_points():
                eps = float(eps)
                ok = check_lemma_eps(n, k, eps)
                if ok is None:
                    continue
                evaluated += 1
                lhs, _ = lemma_eps_sides(n, k, eps)
                if not ok or lhs < 0:
                    failures.append((n, k, eps))
    return GridReport("lemma_eps", evaluated, failures)


def grid_lemma_lin(grid: InequalityGrid | None = None) -> GridReport:
    grid = grid or InequalityGrid()
    pts = np.unique(np.concatenate([_dense_unit(grid.unit_steps, 0), _dense_unit(grid.unit_steps, 1)]))
    evaluated, failures = 0, []
    for x in pts:
        for y in pts[pts <= x]:
            for m in grid.m_values:
                evaluated += 1
                if not check_lemma_lin(float(x), float(y), m):
                    failures.append((float(x), float(y), m))
    return GridReport("lemma_lin", evaluated, failures)


def grid_lemma_gamma(grid: InequalityGrid | None = None) -> GridReport:
    grid = grid or InequalityGrid()
    evaluated, failures = 0, []
    for g in grid.gamma_points():
        for x in grid.x_values:
            evaluated += 1
            if not check_lemma_gamma(float(g), float(x)):
                failures.append((float(g), float(x)))
    return GridReport("lemma_gamma", evaluated, failures)
