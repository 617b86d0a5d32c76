"""Stochastic greedy (SG), modified SG (MSG) and baseline solvers.

All solvers evaluate f(A + {v}) once per candidate and keep f(A) cached, so a
round that inspects ``m`` candidates costs exactly ``m`` queries. The value
f(empty set) is read once through :meth:`ValueOracle.empty_value` and is not
charged.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import (
    GroundSet, IterationRecord, ParameterError, RunResult, SolutionSet,
    SolverParams, ValueOracle, counted_oracle, seeded_rng, values_close,
)
from .sampling import HypergeomParams, hypergeometric_draw, sample_without_replacement

VARIANTS = ("sg", "msg", "greedy", "random_greedy", "brute_force")
DEFAULT_ENUMERATION_CAP = 5_000_000


class EnumerationCapError(ParameterError):
    pass


def auto_epsilon(n: int, k: int) -> float:
    """1/2 + (k-1)/(n-k), the balancing choice for a ground set of size n."""
    if n <= k:
        raise ParameterError(f"automatic epsilon needs n > k (n={n}, k={k})")
    return 0.5 + (k - 1) / (n - k)


def padded_size(n: int, k: int, delta: float) -> int:
    """Virtual ground-set size max{n, k + ceil((2k-1)/delta)} used by MSG."""
    return max(n, k + math.ceil((2 * k - 1) / delta))


def sample_size(n: int, k: int, epsilon: float) -> int:
    """ceil((n/k) ln(1/epsilon))."""
    return math.ceil(n / k * math.log(1 / epsilon))


class _Greedy:
    """Shared bookkeeping for the incremental solvers."""

    def __init__(self, oracle: ValueOracle, ground: GroundSet,
                 members: Sequence[int] = (), value: float | None = None):
        if oracle.n != ground.n:
            raise ParameterError(f"oracle has {oracle.n} elements but ground set has {ground.n}")
        self.oracle = oracle
        self.members: list[int] = list(members)
        taken = set(self.members)
        self.remaining: list[int] = [v for v in range(ground.n) if v not in taken]
        if value is None:
            value = oracle(self.members) if self.members else oracle.empty_value()
        self.value = value
        self.trace: list[IterationRecord] = []
        self.start_queries = oracle.queries

    def best_of(self, candidates: Sequence[int]) -> tuple[int | None, float | None]:
        """Argmax of marginal gain; ties go to the smallest element id."""
        if not candidates:
            return None, None
        candidates = sorted(candidates)
        gains = self.oracle.candidate_gains(self.members, self.value, candidates)
        j = int(np.argmax(gains))
        return candidates[j], float(gains[j])

    def step(self, candidates: Sequence[int], sample_size: int) -> None:
        best, gain = self.best_of(candidates)
        self.offer(best, gain, sample_size)

    def offer(self, best, gain, sample_size) -> None:
        accepted = best is not None and gain > 0
        if accepted:
            self.members.append(best)
            self.remaining.remove(best)
            self.value += gain
        self.trace.append(IterationRecord(sample_size, best if accepted else None, gain, accepted))

    def result(self, name: str, started: float, **extra) -> RunResult:
        return RunResult(
            algorithm=name,
            solution=SolutionSet(self.members),
            value=self.value,
            queries=self.oracle.queries - self.start_queries,
            iterations=self.trace,
            wall_time=time.perf_counter() - started,
            extra=extra,
        )


def run_sg(oracle: ValueOracle, ground: GroundSet, params: SolverParams,
           rng: np.random.Generator) -> RunResult:
    """Stochastic greedy with rejection of non-positive gains.

    Each of the k rounds samples ceil((n/k) ln(1/eps)) elements of V \\ A
    (the whole remainder if fewer are left) and adds the best one only if
    its marginal gain is strictly positive.
    """
    started = time.perf_counter()
    n, k = ground.n, params.k
    params.check_ground(n)
    eps = auto_epsilon(n, k) if params.epsilon is None else params.epsilon
    m = sample_size(n, k, eps)
    state = _Greedy(oracle, ground)
    for _ in range(k):
        size = min(m, len(state.remaining))
        state.step(sample_without_replacement(state.remaining, size, rng), size)
    return state.result("sg", started, epsilon=eps, sample_size=m)


def sg_round(oracle: ValueOracle, members: Sequence[int], value: float, size: int,
             rng: np.random.Generator) -> IterationRecord:
    """One SG iteration from the current solution ``members`` with f = ``value``.

    Samples ``min(size, |V \\ members|)`` candidates, exactly as :func:`run_sg`.
    """
    state = _Greedy(oracle, GroundSet(oracle.n), members, value)
    size = min(size, len(state.remaining))
    state.step(sample_without_replacement(state.remaining, size, rng), size)
    return state.trace[-1]


def run_msg(oracle: ValueOracle, ground: GroundSet, params: SolverParams,
            rng: np.random.Generator) -> RunResult:
    """Modified stochastic greedy.

    Behaves like SG on the ground set padded with zero-gain dummies up to
    N = max{n, k + ceil((2k-1)/delta)} elements, without materialising the
    dummies: each round draws the number r of real candidates from
    H(ceil(s), |V \\ A|, N - |A|) and samples r real elements.
    """
    started = time.perf_counter()
    n, k = ground.n, params.k
    params.check_ground(n)
    big_n = padded_size(n, k, params.delta)
    eps = auto_epsilon(big_n, k) if params.epsilon is None else params.epsilon
    draws = sample_size(big_n, k, eps)
    state = _Greedy(oracle, ground)
    for _ in range(k):
        population = big_n - len(state.members)
        hp = HypergeomParams(min(draws, population), len(state.remaining), population)
        r = hypergeometric_draw(hp, rng)
        state.step(sample_without_replacement(state.remaining, r, rng), r)
    return state.result("msg", started, epsilon=eps, padded_size=big_n, draws=draws)


def run_greedy(oracle: ValueOracle, ground: GroundSet, k: int) -> RunResult:
    """Standard greedy that rejects non-positive gains.

    Stops as soon as a round rejects, since every later round would repeat
    the same scan on the same set.
    """
    started = time.perf_counter()
    _check_k(k, ground.n)
    state = _Greedy(oracle, ground)
    for _ in range(k):
        state.step(list(state.remaining), len(state.remaining))
        if not state.trace[-1].accepted:
            break
    return state.result("greedy", started)


def run_random_greedy(oracle: ValueOracle, ground: GroundSet, k: int,
                      rng: np.random.Generator) -> RunResult:
    """Random greedy: pick uniformly among the k best elements each round.

    When fewer than k elements have positive gain, the top-k list is padded
    with zero-gain dummies; picking one of those skips the round.
    """
    started = time.perf_counter()
    _check_k(k, ground.n)
    state = _Greedy(oracle, ground)
    for _ in range(k):
        pool = list(state.remaining)
        gains = state.oracle.candidate_gains(state.members, state.value, pool)
        order = sorted((i for i in range(len(pool)) if gains[i] > 0),
                       key=lambda i: (-gains[i], pool[i]))[:k]
        j = int(rng.integers(k))
        if j < len(order):
            state.offer(pool[order[j]], float(gains[order[j]]), len(pool))
        else:
            state.trace.append(IterationRecord(len(pool), None, 0.0, False))
    return state.result("random_greedy", started)


def enumeration_count(n: int, k: int) -> int:
    return sum(math.comb(n, j) for j in range(min(k, n) + 1))


def brute_force(oracle: ValueOracle, ground: GroundSet, k: int,
                cap: int = DEFAULT_ENUMERATION_CAP) -> RunResult:
    """Exact maximum over all sets of size <= k.

    Ties go to the lexicographically smallest sorted tuple.
    """
    started = time.perf_counter()
    n = ground.n
    if k < 0 or k > n:
        raise ParameterError(f"need 0 <= k <= n, got k={k}, n={n}")
    count = enumeration_count(n, k)
    if count > cap:
        raise EnumerationCapError(
            f"brute force over n={n}, k={k} needs {count} evaluations, cap is {cap}")
    q0 = oracle.queries
    best: tuple[int, ...] = ()
    best_value = oracle(())
    for size in range(1, k + 1):
        for combo in itertools.combinations(range(n), size):
            value = oracle(combo)
            if values_close(value, best_value, oracle.integer_valued):
                if combo < best:
                    best, best_value = combo, value
            elif value > best_value:
                best, best_value = combo, value
    return RunResult("brute_force", SolutionSet(best), best_value, oracle.queries - q0,
                     wall_time=time.perf_counter() - started, extra={"sets": count})


def _check_k(k: int, n: int) -> None:
    if int(k) != k or not 1 <= k <= n:
        raise ParameterError(f"need 1 <= k <= n, got k={k}, n={n}")


class DummyPadded:
    """``objective`` extended to ``size`` elements; extra elements add nothing."""

    def __init__(self, objective, size: int):
        if size < objective.n:
            raise ParameterError("padded size smaller than the ground set")
        self.objective = objective
        self.real = objective.n
        self.n = size
        self.integer_valued = getattr(objective, "integer_valued", False)

    def __call__(self, members):
        return self.objective([v for v in members if v < self.real])

    def marginal_gains(self, members, candidates):
        real_members = [v for v in members if v < self.real]
        out = np.zeros(len(candidates))
        real = [i for i, v in enumerate(candidates) if v < self.real]
        if real:
            inner = getattr(self.objective, "marginal_gains", None)
            cands = [candidates[i] for i in real]
            if inner is not None:
                out[real] = inner(real_members, cands)
            else:
                base = self.objective(real_members)
                out[real] = [self.objective(real_members + [v]) - base for v in cands]
        return out


def theoretical_bounds(n: int, k: int, epsilon: float | None = None, delta: float = 0.1,
                       variant: str = "msg") -> dict:
    """Closed-form approximation ratio and query counts.

    ``epsilon=None`` means the automatic balancing choice. In that mode MSG
    reports the (1-delta)^2/4 ratio and query bounds with ln(1/eps) replaced
    by ln 2, which bounds every automatic eps >= 1/2 from above.
    """
    if variant not in VARIANTS:
        raise ParameterError(f"unknown variant {variant!r}")
    _check_k(k, n)
    if epsilon is not None and not 0 < epsilon < 1:
        raise ParameterError(f"epsilon must lie in (0, 1), got {epsilon}")
    if not 0 < delta < 1:
        raise ParameterError(f"delta must lie in (0, 1), got {delta}")
    out = {"variant": variant, "n": n, "k": k, "epsilon": epsilon, "delta": delta}

    if variant == "sg":
        eps = auto_epsilon(n, k) if epsilon is None else epsilon
        ratio = (eps - 2 * (k - 1) / (n - k)) * (1 - eps) if n > k else 0.0
        per_round = min(sample_size(n, k, eps), n)
        out.update(epsilon=eps, approx_ratio=max(0.0, ratio),
                   expected_queries=float(k * per_round), worst_case_queries=k * per_round,
                   guarantee_valid=bool(k >= 2 and n >= 3 * k and 1 / math.e <= eps < 1))
    elif variant == "msg":
        big_n = padded_size(n, k, delta)
        if epsilon is None:
            eps = auto_epsilon(big_n, k)
            eps_q = 0.5
            ratio = 0.25 * (1 - delta) ** 2
        else:
            eps = eps_q = epsilon
            ratio = (eps - delta) * (1 - eps)
        draws = sample_size(big_n, k, eps_q)
        if k >= 2:
            expected = n * math.log(1 / eps_q) + n * delta * k / (k - 1)
        else:
            expected = draws * n / big_n
        out.update(epsilon=eps, padded_size=big_n, approx_ratio=max(0.0, ratio),
                   expected_queries=expected, worst_case_queries=k * min(draws, n),
                   guarantee_valid=bool(k >= 2 and 1 / math.e <= eps < 1 and 0 < delta < eps))
    elif variant == "greedy":
        out.update(approx_ratio=0.0, expected_queries=float(k * n), worst_case_queries=k * n,
                   guarantee_valid=False)
    elif variant == "random_greedy":
        out.update(approx_ratio=1 / math.e, expected_queries=float(k * n),
                   worst_case_queries=k * n, guarantee_valid=True)
    else:
        count = enumeration_count(n, k)
        out.update(approx_ratio=1.0, expected_queries=float(count), worst_case_queries=count,
                   guarantee_valid=True)
    return out


@dataclass
class AlgorithmSpec:
    """A solver variant with its parameters; ``epsilon=None`` means automatic."""

    variant: str
    epsilon: float | None = 0.5
    delta: float = 0.1
    label: str = ""
    cap: int = DEFAULT_ENUMERATION_CAP

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ParameterError(f"unknown algorithm {self.variant!r}; expected one of {VARIANTS}")
        if not self.label:
            self.label = self.variant

    def params(self, k: int, seed: int = 0) -> SolverParams:
        return SolverParams(k=k, epsilon=self.epsilon, delta=self.delta, seed=seed)

    def bounds(self, n: int, k: int) -> dict:
        return theoretical_bounds(n, k, self.epsilon, self.delta, self.variant)


def run_algorithm(spec: AlgorithmSpec, objective, k: int, seed: int,
                  check_nonnegative: bool = True) -> RunResult:
    """Run one solver on a fresh counted oracle with its own random source."""
    oracle = counted_oracle(objective, check_nonnegative=check_nonnegative)
    ground = GroundSet(oracle.n)
    rng = seeded_rng(seed)
    if spec.variant == "sg":
        res = run_sg(oracle, ground, spec.params(k, seed), rng)
    elif spec.variant == "msg":
        res = run_msg(oracle, ground, spec.params(k, seed), rng)
    elif spec.variant == "greedy":
        res = run_greedy(oracle, ground, k)
    elif spec.variant == "random_greedy":
        res = run_random_greedy(oracle, ground, k, rng)
    else:
        res = brute_force(oracle, ground, k, cap=spec.cap)
    res.algorithm = spec.label
    return res
