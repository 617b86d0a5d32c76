"""Ground sets, solution sets, value oracles with query accounting, and RNG."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Protocol, Sequence

import numpy as np

# Objective values closer than this (relative) are considered equal.
REL_TOL = 1e-9
# Slack allowed before a returned value counts as negative.
NEG_TOL = 1e-9


class SubmaxError(Exception):
    """Base class for errors raised by this package."""


class ParameterError(SubmaxError, ValueError):
    """Invalid solver or generator parameters."""


class PreconditionError(SubmaxError, ValueError):
    """An operation was called outside its domain."""


class NegativeValueError(SubmaxError, ArithmeticError):
    """An objective returned a negative value."""


@dataclass(frozen=True)
class GroundSet:
    """The universe ``{0, ..., n-1}``."""

    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ParameterError(f"ground set size must be a positive integer, got {self.n!r}")

    def __len__(self) -> int:
        return self.n

    def __iter__(self):
        return iter(range(self.n))

    def __contains__(self, v) -> bool:
        return isinstance(v, (int, np.integer)) and 0 <= v < self.n

    def check(self, elements: Iterable[int]) -> None:
        for v in elements:
            if v not in self:
                raise PreconditionError(f"element {v!r} outside ground set of size {self.n}")


class SolutionSet(tuple):
    """Ordered collection of distinct element ids (acceptance order)."""

    def __new__(cls, members: Iterable[int] = ()):
        members = tuple(int(v) for v in members)
        if len(set(members)) != len(members):
            raise PreconditionError(f"duplicate elements in solution {members}")
        return super().__new__(cls, members)

    def __repr__(self) -> str:
        return f"SolutionSet({list(self)})"

    def added(self, v: int) -> "SolutionSet":
        if v in self:
            raise PreconditionError(f"element {v} already in solution")
        return SolutionSet((*self, v))


class Objective(Protocol):
    """A set function on ``{0, ..., n-1}``.

    Objectives may additionally define ``marginal_gains(members, candidates)``
    returning ``f(members + {v}) - f(members)`` for each candidate; the oracle
    charges one query per candidate for it, exactly as if each augmented set
    had been evaluated.
    """

    n: int

    def __call__(self, members: Sequence[int]) -> float: ...


class ValueOracle:
    """Counted view of an objective.

    Every set evaluation adds one to ``queries``. Batched candidate
    evaluation charges one query per candidate. With ``check_nonnegative``
    a negative value raises :class:`NegativeValueError`.
    """

    def __init__(self, objective: Objective, check_nonnegative: bool = True):
        self.objective = objective
        self.n = int(objective.n)
        self.check_nonnegative = check_nonnegative
        self.integer_valued = bool(getattr(objective, "integer_valued", False))
        self._queries = 0
        self._empty_value: float | None = None

    @property
    def queries(self) -> int:
        return self._queries

    def _check(self, value: float, size: int) -> float:
        if self.check_nonnegative and value < -NEG_TOL * max(1.0, abs(value)):
            raise NegativeValueError(f"objective returned {value!r} on a set of size {size}")
        return value

    def __call__(self, members: Sequence[int]) -> float:
        self._queries += 1
        return self._check(float(self.objective(members)), len(members))

    def empty_value(self) -> float:
        """f(empty set), treated as known to solvers and not charged.

        The value is computed once on the underlying objective and cached.
        """
        if self._empty_value is None:
            self._empty_value = self._check(float(self.objective(())), 0)
        return self._empty_value

    def candidate_gains(self, members: Sequence[int], base_value: float,
                        candidates: Sequence[int]) -> np.ndarray:
        """Marginal gains of ``candidates`` w.r.t. ``members``; one query each.

        ``base_value`` must be f(members); it is never re-evaluated.
        """
        candidates = list(candidates)
        if not candidates:
            return np.empty(0)
        batch = getattr(self.objective, "marginal_gains", None)
        if batch is not None:
            self._queries += len(candidates)
            gains = np.asarray(batch(members, candidates), dtype=float)
            if self.check_nonnegative:
                for g in gains:
                    self._check(base_value + g, len(members) + 1)
            return gains
        members = list(members)
        return np.array([self(members + [v]) - base_value for v in candidates], dtype=float)


def counted_oracle(base: Objective | ValueOracle, check_nonnegative: bool = True) -> ValueOracle:
    """Wrap ``base`` in a fresh oracle whose counter starts at zero."""
    if isinstance(base, ValueOracle):
        base = base.objective
    return ValueOracle(base, check_nonnegative=check_nonnegative)


def marginal_gain(oracle: ValueOracle, base: Sequence[int], v: int) -> float:
    """f(base + {v}) - f(base), computed with two evaluations."""
    base = list(base)
    if v in base:
        raise PreconditionError(f"element {v} is already in the base set")
    return oracle(base + [v]) - oracle(base)


def seeded_rng(seed: int) -> np.random.Generator:
    """Deterministic random source: numpy's PCG64 seeded with ``seed``.

    The generator choice is part of the reproducibility contract and does not
    change between releases.
    """
    if seed < 0 or seed >= 2**64:
        raise ParameterError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return np.random.Generator(np.random.PCG64(seed))


def values_close(a: float, b: float, exact: bool = False) -> bool:
    if exact:
        return a == b
    return math.isclose(a, b, rel_tol=REL_TOL, abs_tol=REL_TOL)


@dataclass
class SolverParams:
    """Budget and accuracy parameters shared by the solvers.

    ``epsilon=None`` selects the automatic choice 1/2 + (k-1)/(N-k), with N the
    (possibly padded) ground-set size the solver works on.
    """

    k: int
    epsilon: float | None = 0.5
    delta: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise ParameterError(f"k must be a positive integer, got {self.k!r}")
        if self.epsilon is not None and not 0 < self.epsilon < 1:
            raise ParameterError(f"epsilon must lie in (0, 1), got {self.epsilon!r}")
        if not 0 < self.delta < 1:
            raise ParameterError(f"delta must lie in (0, 1), got {self.delta!r}")
        if self.seed < 0 or self.seed >= 2**64:
            raise ParameterError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    @property
    def epsilon_mode(self) -> str:
        return "auto" if self.epsilon is None else "explicit"

    def check_ground(self, n: int) -> None:
        if self.k > n:
            raise ParameterError(f"k={self.k} exceeds ground set size n={n}")


@dataclass
class IterationRecord:
    sample_size: int
    chosen: int | None
    gain: float | None
    accepted: bool


@dataclass
class RunResult:
    algorithm: str
    solution: SolutionSet
    value: float
    queries: int
    iterations: list[IterationRecord] = field(default_factory=list)
    wall_time: float = 0.0
    extra: dict[str, Any] = field(default_factory=dict)

    def to_dict(self, timing: bool = True) -> dict[str, Any]:
        d = {
            "algorithm": self.algorithm,
            "solution": list(self.solution),
            "value": self.value,
            "queries": self.queries,
            "iterations": [
                {"sample_size": it.sample_size, "chosen": it.chosen,
                 "gain": it.gain, "accepted": it.accepted}
                for it in self.iterations
            ],
        }
        if self.extra:
            d["extra"] = dict(self.extra)
        if timing:
            d["wall_time"] = self.wall_time
        return d
