"""Experiment sweeps, guarantee verification and the flat config format.

Config files are UTF-8 text with one ``key = value`` per line; ``#`` starts a
comment. Keys:

    instance.kind = er_graph            # see objectives.InstanceSpec
    instance.<param> = value            # n, p, seed, m_attach, ...
    algorithms.<label>.variant = msg    # sg | msg | greedy | random_greedy | brute_force
    algorithms.<label>.epsilon = 0.5    # or "auto"
    algorithms.<label>.delta = 0.1
    algorithms.<label>.cap = 5000000
    k_values = 10, 20, 30
    trials = 10
    base_seed = 0
    output = results/fig1
    emit_bounds = true
    paper_scale.<any key above> = value # applied only with --paper-scale

Values are parsed as int, float, bool (true/false) or string; a comma makes
a list. Trial ``t`` runs with seed ``base_seed + t``.
"""

from __future__ import annotations

import csv
import json
import math
import os
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .algorithms import AlgorithmSpec, brute_force, run_algorithm, theoretical_bounds
from .core import GroundSet, ParameterError, SubmaxError, counted_oracle
from .objectives import InstanceSpec, build_objective

CSV_HEADER = ["algorithm", "k", "trial", "seed", "value", "queries", "wall_time_ms"]
BOUND_COLUMNS = ["bound_ratio", "bound_queries_expected", "bound_queries_worst", "ceiling_violation"]


class ConfigError(SubmaxError, ValueError):
    pass


def parse_value(text: str) -> Any:
    text = text.strip()
    if "," in text:
        return [parse_value(part) for part in text.split(",") if part.strip()]
    low = text.lower()
    if low in ("true", "false"):
        return low == "true"
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def read_config(path: str | Path, paper_scale: bool = False) -> dict[str, Any]:
    """Flat ``key = value`` pairs; ``paper_scale.*`` keys override when requested."""
    plain: dict[str, Any] = {}
    scaled: dict[str, Any] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
            key, value = (s.strip() for s in line.split("=", 1))
            if not key:
                raise ConfigError(f"{path}:{lineno}: empty key")
            if key.startswith("paper_scale."):
                scaled[key[len("paper_scale."):]] = parse_value(value)
            else:
                plain[key] = parse_value(value)
    if paper_scale:
        plain.update(scaled)
    return plain


def _as_list(v) -> list:
    return v if isinstance(v, list) else [v]


def _epsilon(v):
    if isinstance(v, str) and v.lower() == "auto":
        return None
    return float(v)


def instance_from_flat(flat: dict[str, Any], prefix: str = "instance.") -> InstanceSpec:
    if prefix + "kind" not in flat:
        raise ConfigError(f"missing {prefix}kind")
    params = {k[len(prefix):]: v for k, v in flat.items() if k.startswith(prefix) and k != prefix + "kind"}
    for key in ("weights", "columns"):
        if key in params:
            params[key] = _as_list(params[key])
    return InstanceSpec(flat[prefix + "kind"], params)


def algorithms_from_flat(flat: dict[str, Any]) -> list[AlgorithmSpec]:
    grouped: dict[str, dict[str, Any]] = {}
    for key, value in flat.items():
        if not key.startswith("algorithms."):
            continue
        parts = key.split(".")
        if len(parts) != 3:
            raise ConfigError(f"algorithm keys look like algorithms.<label>.<field>, got {key!r}")
        grouped.setdefault(parts[1], {})[parts[2]] = value
    specs = []
    for label, fields in grouped.items():
        unknown = set(fields) - {"variant", "epsilon", "delta", "cap"}
        if unknown:
            raise ConfigError(f"unknown fields for algorithm {label!r}: {sorted(unknown)}")
        if "variant" not in fields:
            raise ConfigError(f"algorithm {label!r} has no variant")
        specs.append(AlgorithmSpec(
            variant=fields["variant"],
            epsilon=_epsilon(fields.get("epsilon", 0.5)),
            delta=float(fields.get("delta", 0.1)),
            label=label,
            cap=int(fields.get("cap", 5_000_000)),
        ))
    return specs


@dataclass
class ExperimentSpec:
    instance: InstanceSpec
    algorithms: list[AlgorithmSpec]
    k_values: list[int]
    trials: int = 10
    base_seed: int = 0
    output: str = "results"
    emit_bounds: bool = True
    threads: int | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise ParameterError("trials must be at least 1")
        if not self.algorithms:
            raise ParameterError("no algorithms configured")
        if not self.k_values:
            raise ParameterError("no k values configured")

    @classmethod
    def from_flat(cls, flat: dict[str, Any]) -> "ExperimentSpec":
        known = {"k_values", "trials", "base_seed", "output", "emit_bounds", "threads"}
        for key in flat:
            if not (key in known or key.startswith(("instance.", "algorithms."))):
                raise ConfigError(f"unknown config key {key!r}")
        return cls(
            instance=instance_from_flat(flat),
            algorithms=algorithms_from_flat(flat),
            k_values=[int(k) for k in _as_list(flat.get("k_values", []))],
            trials=int(flat.get("trials", 10)),
            base_seed=int(flat.get("base_seed", 0)),
            output=str(flat.get("output", "results")),
            emit_bounds=bool(flat.get("emit_bounds", True)),
            threads=flat.get("threads"),
        )

    @classmethod
    def from_file(cls, path, paper_scale: bool = False) -> "ExperimentSpec":
        return cls.from_flat(read_config(path, paper_scale=paper_scale))

    def to_dict(self) -> dict[str, Any]:
        return {
            "instance": {"kind": self.instance.kind, **self.instance.params},
            "algorithms": [{"label": a.label, "variant": a.variant, "epsilon": a.epsilon,
                            "delta": a.delta} for a in self.algorithms],
            "k_values": list(self.k_values),
            "trials": self.trials,
            "base_seed": self.base_seed,
            "emit_bounds": self.emit_bounds,
        }


def worker_count(requested: int | None = None) -> int:
    env = os.environ.get("SUBMAX_THREADS")
    limit = int(env) if env else (os.cpu_count() or 1)
    return max(1, min(limit, requested or limit))


def mean_std(values: list[float]) -> tuple[float, float]:
    """Mean and sample standard deviation (0 for a single value)."""
    if not values:
        return math.nan, math.nan
    return statistics.fmean(values), (statistics.stdev(values) if len(values) > 1 else 0.0)


@dataclass
class ExperimentResult:
    csv_path: Path
    summary_path: Path
    rows: list[dict[str, Any]]
    summary: dict[str, Any]
    errors: list[dict[str, Any]] = field(default_factory=list)


def run_experiment(spec: ExperimentSpec) -> ExperimentResult:
    """Run every (algorithm, k, trial) cell; write ``results.csv`` and ``summary.json``."""
    objective = build_objective(spec.instance)
    n = objective.n
    bounds: dict[tuple[int, int], dict] = {}
    errors: list[dict[str, Any]] = []
    for ai, alg in enumerate(spec.algorithms):
        for k in spec.k_values:
            try:
                bounds[ai, k] = alg.bounds(n, k)
            except SubmaxError as exc:
                errors.append({"algorithm": alg.label, "k": k, "trial": None, "error": str(exc)})

    cells = [(ai, k, t) for ai in range(len(spec.algorithms)) for k in spec.k_values
             for t in range(spec.trials) if (ai, k) in bounds]

    def run_cell(cell):
        ai, k, t = cell
        alg = spec.algorithms[ai]
        seed = spec.base_seed + t
        try:
            res = run_algorithm(alg, objective, k, seed)
        except SubmaxError as exc:
            return cell, None, {"algorithm": alg.label, "k": k, "trial": t, "error": str(exc)}
        row = {"algorithm": alg.label, "k": k, "trial": t, "seed": seed, "value": res.value,
               "queries": res.queries, "wall_time_ms": res.wall_time * 1e3}
        b = bounds[ai, k]
        row.update(bound_ratio=b["approx_ratio"], bound_queries_expected=b["expected_queries"],
                   bound_queries_worst=b["worst_case_queries"],
                   ceiling_violation=res.queries > b["worst_case_queries"])
        return cell, row, None

    with ThreadPoolExecutor(max_workers=worker_count(spec.threads)) as pool:
        outcomes = sorted(pool.map(run_cell, cells), key=lambda o: o[0])
    rows = [row for _, row, _ in outcomes if row is not None]
    errors += [err for _, _, err in outcomes if err is not None]

    out = Path(spec.output)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "results.csv"
    header = CSV_HEADER + (BOUND_COLUMNS if spec.emit_bounds else [])
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=header, extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({**row, "value": repr(row["value"]),
                             "wall_time_ms": f"{row['wall_time_ms']:.3f}"})

    summary = {"config": spec.to_dict(), "cells": summarize(rows, spec, bounds), "errors": errors}
    summary_path = out / "summary.json"
    summary_path.write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    return ExperimentResult(csv_path, summary_path, rows, summary, errors)


def summarize(rows, spec: ExperimentSpec, bounds) -> list[dict[str, Any]]:
    cells = []
    for ai, alg in enumerate(spec.algorithms):
        for k in spec.k_values:
            mine = [r for r in rows if r["algorithm"] == alg.label and r["k"] == k]
            if not mine:
                continue
            mv, sv = mean_std([r["value"] for r in mine])
            mq, sq = mean_std([float(r["queries"]) for r in mine])
            b = bounds[ai, k]
            cells.append({
                "algorithm": alg.label, "k": k, "trials": len(mine),
                "mean_value": mv, "std_value": sv, "mean_queries": mq, "std_queries": sq,
                "bound_ratio": b["approx_ratio"],
                "bound_queries_expected": b["expected_queries"],
                "bound_queries_worst": b["worst_case_queries"],
                "pass": not any(r["ceiling_violation"] for r in mine),
            })
    return cells


# --- guarantee verification ------------------------------------------------------


@dataclass
class VerifySpec:
    """A solver checked against the enumerated optimum.

    ``monotone`` switches the floor to the monotone-case guarantee
    (1 - 1/e - eps for SG/MSG, 1 - 1/e for greedy). ``floor`` overrides.
    """

    instance: InstanceSpec
    algorithm: AlgorithmSpec
    k: int
    trials: int = 5000
    base_seed: int = 0
    cap: int = 5_000_000
    monotone: bool = False
    floor: float | None = None


@dataclass
class VerifyReport:
    algorithm: str
    trials: int
    optimum: float
    optimum_set: tuple[int, ...]
    mean_ratio: float
    sem: float
    floor: float
    mean_queries: float
    guarantee_valid: bool

    @property
    def passed(self) -> bool:
        return self.mean_ratio >= self.floor - 3 * self.sem

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return (f"{verdict} {self.algorithm}: mean ratio {self.mean_ratio:.4f} "
                f"(SEM {self.sem:.4f}, {self.trials} trials) vs floor {self.floor:.4f}; "
                f"optimum {self.optimum:g} at {list(self.optimum_set)}; "
                f"mean queries {self.mean_queries:.1f}")

    def to_dict(self) -> dict[str, Any]:
        return {"algorithm": self.algorithm, "trials": self.trials, "optimum": self.optimum,
                "optimum_set": list(self.optimum_set), "mean_ratio": self.mean_ratio,
                "sem": self.sem, "floor": self.floor, "mean_queries": self.mean_queries,
                "guarantee_valid": self.guarantee_valid, "pass": self.passed}


def guarantee_floor(alg: AlgorithmSpec, n: int, k: int, monotone: bool) -> tuple[float, bool]:
    b = theoretical_bounds(n, k, alg.epsilon, alg.delta, alg.variant)
    if not monotone:
        return b["approx_ratio"], b["guarantee_valid"]
    if alg.variant in ("sg", "msg"):
        return max(0.0, 1 - 1 / math.e - b["epsilon"]), True
    if alg.variant == "greedy":
        return 1 - 1 / math.e, True
    return b["approx_ratio"], b["guarantee_valid"]


def verify_guarantees(spec: VerifySpec) -> VerifyReport:
    """Mean f(A)/f(A*) over seeded runs, compared with the theoretical floor at 3 SEM."""
    objective = build_objective(spec.instance)
    oracle = counted_oracle(objective)
    best = brute_force(oracle, GroundSet(oracle.n), spec.k, cap=spec.cap)
    floor, valid = guarantee_floor(spec.algorithm, oracle.n, spec.k, spec.monotone)
    if spec.floor is not None:
        floor = spec.floor
    ratios, queries = [], []
    for t in range(spec.trials):
        res = run_algorithm(spec.algorithm, objective, spec.k, spec.base_seed + t)
        ratios.append(res.value / best.value if best.value > 0 else 1.0)
        queries.append(res.queries)
    mean, std = mean_std(ratios)
    return VerifyReport(spec.algorithm.label, spec.trials, best.value, tuple(best.solution),
                        mean, std / math.sqrt(len(ratios)), floor,
                        statistics.fmean(queries), valid)
