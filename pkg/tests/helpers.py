"""Independent oracles shared by the test modules."""

import itertools
import math

import numpy as np


def enumerate_optimum(f, n, k):
    """max f(S) over |S| <= k by plain enumeration, without any package solver."""
    best_set, best = (), f(())
    for size in range(1, k + 1):
        for combo in itertools.combinations(range(n), size):
            v = f(combo)
            if v > best:
                best_set, best = combo, v
    return best, best_set


def mean_sem(xs):
    xs = np.asarray(xs, dtype=float)
    if len(xs) < 2:
        return float(xs.mean()), 0.0
    return float(xs.mean()), float(xs.std(ddof=1) / math.sqrt(len(xs)))


def hypergeom_pmf_comb(draws, targets, population):
    """Closed-form pmf via exact binomial coefficients: {r: P(r)}."""
    total = math.comb(population, draws)
    return {r: math.comb(targets, r) * math.comb(population - targets, draws - r) / total
            for r in range(0, min(draws, targets) + 1)
            if draws - r <= population - targets}


def total_variation(p: dict, q: dict) -> float:
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(x, 0.0) - q.get(x, 0.0)) for x in keys)


def empirical(outcomes) -> dict:
    counts = {}
    for o in outcomes:
        counts[o] = counts.get(o, 0) + 1
    n = len(outcomes)
    return {o: c / n for o, c in counts.items()}


class TableObjective:
    """Exhaustively tabulated set function for small ground sets (bitmask keys)."""

    def __init__(self, f, n):
        self.n = n
        self.table = np.empty(1 << n)
        for mask in range(1 << n):
            self.table[mask] = f([i for i in range(n) if mask >> i & 1])
        self.integer_valued = bool(np.all(self.table == np.round(self.table)))

    @staticmethod
    def mask(members):
        m = 0
        for v in members:
            m |= 1 << v
        return m

    def __call__(self, members):
        return float(self.table[self.mask(members)])

    def marginal_gains(self, members, candidates):
        m = self.mask(members)
        base = self.table[m]
        return np.array([self.table[m | (1 << v)] - base for v in candidates])


def check_submodular(f, n, rng, triples=200, max_y=12):
    """Diminishing returns on random X <= Y, v not in Y. Returns violations."""
    bad = []
    for _ in range(triples):
        ysize = int(rng.integers(0, min(max_y, n - 1) + 1))
        perm = rng.permutation(n)
        y = sorted(perm[:ysize].tolist())
        v = int(perm[ysize])
        x = [e for e in y if rng.random() < 0.5]
        gx = f(x + [v]) - f(x)
        gy = f(y + [v]) - f(y)
        if gx < gy - 1e-8:
            bad.append((x, y, v, gx, gy))
    return bad


def check_nonnegative(f, n, rng, sets=1000):
    bad = []
    for _ in range(sets):
        members = np.flatnonzero(rng.random(n) < rng.random()).tolist()
        val = f(members)
        if val < -1e-9:
            bad.append((members, val))
    return bad
