"""Concrete submodular objectives, instance generators and feature ingestion."""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np
import scipy.linalg
import scipy.sparse

from .core import ParameterError, PreconditionError, SubmaxError, seeded_rng


class NotPositiveDefiniteError(SubmaxError, ArithmeticError):
    pass


class IngestionError(SubmaxError, ValueError):
    pass


def _as_index_array(members: Iterable[int], n: int) -> np.ndarray:
    idx = np.fromiter((int(v) for v in members), dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= n):
        bad = idx[(idx < 0) | (idx >= n)][0]
        raise PreconditionError(f"element {bad} outside ground set of size {n}")
    return idx


# --- graphs and cuts -------------------------------------------------------


class WeightedGraph:
    """Undirected graph with non-negative edge weights, each pair stored once."""

    def __init__(self, n: int, edges: Sequence[tuple[int, int]] | np.ndarray,
                 weights: Sequence[float] | np.ndarray | None = None):
        if n < 1:
            raise ParameterError(f"graph needs at least one node, got n={n}")
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        weights = np.ones(len(edges)) if weights is None else np.asarray(weights, dtype=float)
        if len(weights) != len(edges):
            raise ParameterError("one weight per edge required")
        if len(edges):
            if edges.min() < 0 or edges.max() >= n:
                raise ParameterError("edge endpoint outside node range")
            if np.any(edges[:, 0] == edges[:, 1]):
                raise ParameterError("self-loops are not allowed")
            if np.any(weights < 0) or not np.all(np.isfinite(weights)):
                raise ParameterError("edge weights must be finite and non-negative")
            lo = np.minimum(edges[:, 0], edges[:, 1])
            hi = np.maximum(edges[:, 0], edges[:, 1])
            if len(np.unique(lo * n + hi)) != len(edges):
                raise ParameterError("duplicate edge")
        self.n = int(n)
        self.edges = edges
        self.weights = weights
        self.edges.setflags(write=False)
        self.weights.setflags(write=False)
        adj = scipy.sparse.coo_matrix(
            (np.concatenate([weights, weights]),
             (np.concatenate([edges[:, 0], edges[:, 1]]), np.concatenate([edges[:, 1], edges[:, 0]]))),
            shape=(n, n))
        self.adjacency = adj.tocsr()
        self.weighted_degree = np.asarray(self.adjacency.sum(axis=1)).ravel()

    @property
    def integer_weights(self) -> bool:
        return bool(np.all(self.weights == np.round(self.weights)))

    def __len__(self) -> int:
        return len(self.edges)

    def edge_list(self) -> list[tuple[int, int, float]]:
        return [(int(u), int(v), float(w)) for (u, v), w in zip(self.edges, self.weights)]

    def __eq__(self, other) -> bool:
        return (isinstance(other, WeightedGraph) and self.n == other.n
                and np.array_equal(self.edges, other.edges)
                and np.array_equal(self.weights, other.weights))


def cut_value(g: WeightedGraph, members: Iterable[int]) -> float:
    """Total weight of edges with exactly one endpoint in ``members``."""
    inside = np.zeros(g.n, dtype=bool)
    inside[_as_index_array(members, g.n)] = True
    if not len(g.edges):
        return 0.0
    crossing = inside[g.edges[:, 0]] != inside[g.edges[:, 1]]
    return float(g.weights[crossing].sum())


class CutObjective:
    """Graph cut function. Non-negative, symmetric, non-monotone submodular."""

    def __init__(self, graph: WeightedGraph):
        self.graph = graph
        self.n = graph.n
        self.integer_valued = graph.integer_weights

    def __call__(self, members):
        return cut_value(self.graph, members)

    def marginal_gains(self, members, candidates) -> np.ndarray:
        # gain(v) = w(v, outside) - w(v, inside) = deg(v) - 2 w(v, inside)
        inside = np.zeros(self.n)
        inside[_as_index_array(members, self.n)] = 1.0
        cand = _as_index_array(candidates, self.n)
        to_inside = self.graph.adjacency[cand] @ inside
        return self.graph.weighted_degree[cand] - 2.0 * to_inside


def gen_er_graph(n: int, p: float, seed: int) -> WeightedGraph:
    """Erdos-Renyi G(n, p) with unit weights."""
    if not 0 < p <= 1:
        raise ParameterError(f"edge probability must lie in (0, 1], got {p}")
    if n < 1:
        raise ParameterError(f"n must be positive, got {n}")
    rng = seeded_rng(seed)
    u, v = np.triu_indices(n, k=1)
    keep = rng.random(len(u)) < p
    return WeightedGraph(n, np.column_stack([u[keep], v[keep]]))


def gen_ba_graph(n: int, m_attach: int, seed: int) -> WeightedGraph:
    """Preferential attachment from ``m_attach`` isolated seed nodes.

    Each new node links to ``m_attach`` distinct existing nodes drawn with
    probability proportional to degree (uniformly while every degree is 0).
    """
    if not 1 <= m_attach < n:
        raise ParameterError(f"need 1 <= m_attach < n, got m_attach={m_attach}, n={n}")
    rng = seeded_rng(seed)
    edges: list[tuple[int, int]] = []
    # Every node appears here once per incident edge.
    endpoints: list[int] = []
    for t in range(m_attach, n):
        if endpoints:
            chosen: dict[int, None] = {}
            while len(chosen) < m_attach:
                picks = rng.integers(0, len(endpoints), size=2 * m_attach)
                for j in picks.tolist():
                    chosen.setdefault(endpoints[j])
                    if len(chosen) == m_attach:
                        break
            targets = list(chosen)
        else:
            targets = rng.permutation(t)[:m_attach].tolist()
        for u in targets:
            edges.append((u, t))
        endpoints.extend(targets)
        endpoints.extend([t] * m_attach)
    return WeightedGraph(n, np.array(edges, dtype=np.int64).reshape(-1, 2))


# --- PSD matrices, log-det entropy and mutual information --------------------


@dataclass
class PsdMatrix:
    matrix: np.ndarray
    certified: bool = False

    def __post_init__(self):
        x = np.asarray(self.matrix, dtype=float)
        if x.ndim != 2 or x.shape[0] != x.shape[1]:
            raise ParameterError(f"expected a square matrix, got shape {x.shape}")
        if not np.allclose(x, x.T, rtol=0, atol=1e-12):
            raise ParameterError("matrix is not symmetric")
        self.matrix = x
        self.matrix.setflags(write=False)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


def _cholesky(sub: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.cholesky(sub)
    except np.linalg.LinAlgError:
        raise NotPositiveDefiniteError(
            f"principal submatrix of size {sub.shape[0]} is not positive definite") from None


def logdet_entropy(x: PsdMatrix, members: Iterable[int]) -> float:
    """ln det X[S] via Cholesky; 0 for the empty set."""
    idx = _as_index_array(members, x.n)
    if idx.size == 0:
        return 0.0
    chol = _cholesky(x.matrix[np.ix_(idx, idx)])
    return float(2.0 * np.log(np.diag(chol)).sum())


def mutual_information(x: PsdMatrix, members: Iterable[int]) -> float:
    """H(S) + H(V \\ S) - H(V)."""
    idx = _as_index_array(members, x.n)
    inside = np.zeros(x.n, dtype=bool)
    inside[idx] = True
    rest = np.flatnonzero(~inside)
    return logdet_entropy(x, idx) + logdet_entropy(x, rest) - logdet_entropy(x, range(x.n))


class LogDetObjective:
    """Log-det entropy; monotone and non-negative when min eigenvalue >= 1."""

    def __init__(self, x: PsdMatrix):
        self.x = x
        self.n = x.n

    def __call__(self, members):
        return logdet_entropy(self.x, members)

    def marginal_gains(self, members, candidates) -> np.ndarray:
        return _schur_log_gains(self.x.matrix, _as_index_array(members, self.n),
                                _as_index_array(candidates, self.n))


class MutualInformationObjective:
    """Symmetric log-det mutual information, non-monotone submodular."""

    def __init__(self, x: PsdMatrix):
        self.x = x
        self.n = x.n
        self.full_entropy = logdet_entropy(x, range(x.n))

    def __call__(self, members):
        idx = _as_index_array(members, self.n)
        inside = np.zeros(self.n, dtype=bool)
        inside[idx] = True
        return (logdet_entropy(self.x, idx) + logdet_entropy(self.x, np.flatnonzero(~inside))
                - self.full_entropy)

    def marginal_gains(self, members, candidates) -> np.ndarray:
        X = self.x.matrix
        idx = _as_index_array(members, self.n)
        cand = _as_index_array(candidates, self.n)
        gain_in = _schur_log_gains(X, idx, cand)
        # H(T - v) - H(T) = ln [X_T^{-1}]_vv for v in T = V \ S.
        inside = np.zeros(self.n, dtype=bool)
        inside[idx] = True
        rest = np.flatnonzero(~inside)
        chol = _cholesky(X[np.ix_(rest, rest)])
        pos = np.searchsorted(rest, cand)
        eye = np.zeros((len(rest), len(cand)))
        eye[pos, np.arange(len(cand))] = 1.0
        inv_cols = scipy.linalg.solve_triangular(chol, eye, lower=True)
        gain_out = np.log((inv_cols ** 2).sum(axis=0))
        return gain_in + gain_out


def _schur_log_gains(X: np.ndarray, idx: np.ndarray, cand: np.ndarray) -> np.ndarray:
    """ln det X[S+v] - ln det X[S] = ln (X_vv - X_vS X_SS^{-1} X_Sv)."""
    diag = X[cand, cand]
    if idx.size == 0:
        schur = diag
    else:
        chol = _cholesky(X[np.ix_(idx, idx)])
        y = scipy.linalg.solve_triangular(chol, X[np.ix_(idx, cand)], lower=True)
        schur = diag - (y ** 2).sum(axis=0)
    if np.any(schur <= 0):
        raise NotPositiveDefiniteError(
            f"principal submatrix of size {idx.size + 1} is not positive definite")
    return np.log(schur)


def second_order_features(a: np.ndarray, pairs: Sequence[tuple[int, int]] | None = None) -> np.ndarray:
    """Append products a_i * a_j (i < j) of columns; all pairs by default."""
    a = np.asarray(a, dtype=float)
    if pairs is None:
        pairs = list(itertools.combinations(range(a.shape[1]), 2))
    if not pairs:
        return a.copy()
    extra = np.column_stack([a[:, i] * a[:, j] for i, j in pairs])
    return np.hstack([a, extra])


def psd_from_features(a: np.ndarray, columns: Sequence[int] | None = None,
                      second_order: bool = False) -> PsdMatrix:
    """X = I + A^T A after normalising each column of A to unit length.

    ``second_order`` appends all pairwise column products first; ``columns``
    then selects which columns (original or expanded) are kept.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
    if second_order:
        a = second_order_features(a)
    if columns is not None:
        a = a[:, list(columns)]
    norms = np.linalg.norm(a, axis=0)
    zero = np.flatnonzero(norms == 0)
    if zero.size:
        raise IngestionError(f"column {zero[0]} of the feature matrix is all zeros")
    a = a / norms
    x = np.eye(a.shape[1]) + a.T @ a
    return PsdMatrix((x + x.T) / 2, certified=True)


def psd_synthetic(n: int, feature_count: int, seed: int) -> PsdMatrix:
    """Seeded Gaussian feature matrix with ``feature_count`` rows and ``n`` columns."""
    if n < 1 or feature_count < 1:
        raise ParameterError("n and feature_count must be positive")
    rng = seeded_rng(seed)
    # A shared latent factor makes columns correlated, as real features are.
    latent = rng.standard_normal((feature_count, 1))
    a = rng.standard_normal((feature_count, n)) + latent * rng.uniform(0, 1, size=n)
    return psd_from_features(a)


def load_feature_csv(path: str | Path) -> np.ndarray:
    """Read a numeric matrix from CSV; a non-numeric first cell marks a header row."""
    rows: list[list[float]] = []
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if lineno == 1:
                try:
                    float(row[0])
                except ValueError:
                    continue
            values = []
            for col, cell in enumerate(row, start=1):
                try:
                    values.append(float(cell))
                except ValueError:
                    raise IngestionError(
                        f"{path}: non-numeric cell {cell!r} at row {lineno}, column {col}") from None
            if rows and len(values) != len(rows[0]):
                raise IngestionError(
                    f"{path}: row {lineno} has {len(values)} columns, expected {len(rows[0])}")
            rows.append(values)
    if not rows:
        raise IngestionError(f"{path}: no data rows")
    return np.array(rows)


# --- coverage and modular ------------------------------------------------------


class CoverageObjective:
    """Weighted coverage: total weight of universe items covered by the chosen sets."""

    def __init__(self, sets: Sequence[Iterable[int]], universe: int,
                 item_weights: Sequence[float] | None = None):
        self.sets = [frozenset(int(u) for u in s) for s in sets]
        self.n = len(self.sets)
        self.universe = int(universe)
        for s in self.sets:
            if any(not 0 <= u < self.universe for u in s):
                raise ParameterError("coverage set mentions an item outside the universe")
        self.item_weights = (np.ones(self.universe) if item_weights is None
                             else np.asarray(item_weights, dtype=float))
        self.integer_valued = bool(np.all(self.item_weights == np.round(self.item_weights)))
        self._masks = np.zeros((self.n, self.universe), dtype=bool)
        for i, s in enumerate(self.sets):
            self._masks[i, list(s)] = True

    def __call__(self, members):
        idx = _as_index_array(members, self.n)
        if idx.size == 0:
            return 0.0
        covered = self._masks[idx].any(axis=0)
        return float(self.item_weights[covered].sum())

    def marginal_gains(self, members, candidates) -> np.ndarray:
        idx = _as_index_array(members, self.n)
        covered = self._masks[idx].any(axis=0) if idx.size else np.zeros(self.universe, dtype=bool)
        fresh = self._masks[_as_index_array(candidates, self.n)] & ~covered
        return fresh @ self.item_weights


def random_coverage(n: int, universe: int, p: float, seed: int) -> CoverageObjective:
    """Each of ``n`` sets contains each universe item independently with prob. ``p``."""
    if not 0 < p <= 1:
        raise ParameterError(f"p must lie in (0, 1], got {p}")
    rng = seeded_rng(seed)
    masks = rng.random((n, universe)) < p
    return CoverageObjective([np.flatnonzero(m).tolist() for m in masks], universe)


class ModularObjective:
    def __init__(self, weights: Sequence[float]):
        self.weights = np.asarray(weights, dtype=float)
        self.n = len(self.weights)
        self.integer_valued = bool(np.all(self.weights == np.round(self.weights)))

    def __call__(self, members):
        return float(self.weights[_as_index_array(members, self.n)].sum())

    def marginal_gains(self, members, candidates) -> np.ndarray:
        return self.weights[_as_index_array(candidates, self.n)].copy()


# --- instance specs ----------------------------------------------------------

INSTANCE_KINDS = ("er_graph", "ba_graph", "psd_from_csv", "psd_synthetic", "coverage", "modular")


@dataclass
class InstanceSpec:
    """Recipe for an objective; ``params`` depend on ``kind``.

    er_graph: n, p, seed | ba_graph: n, m_attach, seed |
    psd_from_csv: path, columns, second_order, objective |
    psd_synthetic: n, feature_count, seed, objective |
    coverage: n, universe, p, seed  (or explicit ``sets``) | modular: weights

    PSD kinds build the mutual-information objective unless
    ``objective = "entropy"``.
    """

    kind: str
    params: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in INSTANCE_KINDS:
            raise ParameterError(f"unknown instance kind {self.kind!r}; expected one of {INSTANCE_KINDS}")

    def get(self, key, default=None):
        return self.params.get(key, default)


def build_graph(spec: InstanceSpec) -> WeightedGraph:
    if spec.kind == "er_graph":
        return gen_er_graph(int(spec.params["n"]), float(spec.params["p"]), int(spec.get("seed", 0)))
    if spec.kind == "ba_graph":
        return gen_ba_graph(int(spec.params["n"]), int(spec.params["m_attach"]), int(spec.get("seed", 0)))
    raise ParameterError(f"{spec.kind} is not a graph instance")


def build_psd(spec: InstanceSpec) -> PsdMatrix:
    if spec.kind == "psd_synthetic":
        return psd_synthetic(int(spec.params["n"]), int(spec.params["feature_count"]),
                             int(spec.get("seed", 0)))
    if spec.kind == "psd_from_csv":
        cols = spec.get("columns")
        return psd_from_features(load_feature_csv(spec.params["path"]),
                                 columns=None if cols is None else [int(c) for c in cols],
                                 second_order=bool(spec.get("second_order", False)))
    raise ParameterError(f"{spec.kind} is not a matrix instance")


def build_objective(spec: InstanceSpec):
    """Materialise the objective described by ``spec``."""
    if spec.kind in ("er_graph", "ba_graph"):
        return CutObjective(build_graph(spec))
    if spec.kind in ("psd_synthetic", "psd_from_csv"):
        x = build_psd(spec)
        if spec.get("objective", "mutual_information") == "entropy":
            return LogDetObjective(x)
        return MutualInformationObjective(x)
    if spec.kind == "coverage":
        if "sets" in spec.params:
            return CoverageObjective(spec.params["sets"], int(spec.params["universe"]))
        return random_coverage(int(spec.params["n"]), int(spec.params["universe"]),
                               float(spec.get("p", 0.2)), int(spec.get("seed", 0)))
    return ModularObjective([float(w) for w in spec.params["weights"]])
