"""Acceptance criteria, one test each.

Every test appends a PASS/FAIL line to ``conftest.ACCEPTANCE_LINES``; the
lines are printed in the terminal summary and asserted afterwards.
"""

import itertools
import math

import numpy as np
import pytest

import conftest
from helpers import (
    TableObjective, check_nonnegative, check_submodular, empirical, enumerate_optimum,
    hypergeom_pmf_comb, mean_sem, total_variation,
)
from submax.algorithms import (
    AlgorithmSpec, DummyPadded, padded_size, run_algorithm, run_msg, run_sg, sample_size,
    sg_round,
)
from submax.bench import ExperimentSpec, read_config, run_experiment
from submax.core import GroundSet, SolverParams, counted_oracle, seeded_rng
from submax.objectives import CutObjective, gen_er_graph, random_coverage
from submax.sampling import HypergeomParams, hypergeometric_draw
from submax.theory import grid_lemma_eps, grid_lemma_gamma, grid_lemma_lin
from test_objectives import PROPERTY_OBJECTIVES


def record(number, title, ok, detail):
    conftest.ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {title}: {detail}")
    assert ok, detail


def ratio_stats(spec, obj, k, trials, opt):
    return mean_sem([run_algorithm(spec, obj, k, seed=s).value / opt for s in range(trials)])


def test_01_msg_ratio():
    obj = CutObjective(gen_er_graph(24, 0.5, 7))
    opt, _ = enumerate_optimum(obj, 24, 4)
    mean, sem = ratio_stats(AlgorithmSpec("msg", epsilon=None, delta=0.1), obj, 4, 5000, opt)
    floor = 0.25 * 0.9 ** 2
    record(1, "MSG ratio, ER n=24 k=4", mean >= floor - 3 * sem,
           f"mean {mean:.4f} (SEM {sem:.4f}) vs floor {floor:.4f}")


def test_02_sg_ratio():
    obj = CutObjective(gen_er_graph(30, 0.5, 7))
    opt, _ = enumerate_optimum(obj, 30, 4)
    eps = 0.5 + 3 / 26
    mean, sem = ratio_stats(AlgorithmSpec("sg", epsilon=eps), obj, 4, 5000, opt)
    floor = (eps - 2 * 3 / 26) * (1 - eps)
    record(2, "SG ratio, ER n=30 k=4", mean >= floor - 3 * sem,
           f"mean {mean:.4f} (SEM {sem:.4f}) vs floor {floor:.4f}")


def test_03_msg_query_bounds():
    obj = CutObjective(gen_er_graph(100, 0.5, 1))
    spec = AlgorithmSpec("msg", epsilon=0.5, delta=0.1)
    queries = [run_algorithm(spec, obj, 10, seed=s).queries for s in range(2000)]
    mean, sem = mean_sem(queries)
    expected = 100 * math.log(2) + 100 * 0.1 * 10 / 9
    ok = max(queries) <= 140 and mean <= expected + 3 * sem
    record(3, "MSG query bounds, n=100 k=10", ok,
           f"max {max(queries)} <= 140, mean {mean:.2f} vs {expected:.2f} + 3 SEM ({sem:.2f})")


def test_04_monotone_sg():
    obj = TableObjective(random_coverage(14, 40, 0.12, 5), 14)
    opt, _ = enumerate_optimum(obj, 14, 3)
    mean, sem = ratio_stats(AlgorithmSpec("sg", epsilon=0.5), obj, 3, 5000, opt)
    floor = 1 - 1 / math.e - 0.5
    record(4, "SG monotone ratio, coverage n=14 k=3", mean >= floor - 3 * sem,
           f"mean {mean:.4f} (SEM {sem:.4f}) vs floor {floor:.4f}")


def reachable_states(obj, n, size, depth):
    """Every solution SG can hold after ``depth`` rounds, by enumerating all samples."""
    levels = [{()}]
    for _ in range(depth):
        nxt = set()
        for state in levels[-1]:
            rest = [v for v in range(n) if v not in state]
            base = obj(state)
            for sample in itertools.combinations(rest, min(size, len(rest))):
                gains = [(obj(state + (v,)) - base, -v) for v in sample]
                g, neg_v = max(gains)
                nxt.add(tuple(sorted(state + (-neg_v,))) if g > 0 else state)
        levels.append(nxt)
    return sorted(set().union(*levels), key=lambda s: (len(s), s))


@pytest.mark.slow
def test_05_per_iteration_gain():
    n, k, eps = 10, 3, 0.5
    obj = TableObjective(CutObjective(gen_er_graph(n, 0.5, 3)), n)
    _, opt_set = enumerate_optimum(obj, n, k)
    size = sample_size(n, k, eps)
    states = reachable_states(obj, n, size, 2)
    rng = seeded_rng(5)
    worst, failures = math.inf, []
    for state in states:
        oracle = counted_oracle(obj)
        value = obj(state)
        gains = [rec.gain if rec.accepted else 0.0
                 for rec in (sg_round(oracle, state, value, size, rng) for _ in range(20000))]
        mean, sem = mean_sem(gains)
        target = (1 - eps) / k * (obj(tuple(set(state) | set(opt_set))) - value)
        worst = min(worst, mean - target + 3 * sem)
        if mean < target - 3 * sem:
            failures.append(state)
    record(5, "per-iteration expected gain", not failures,
           f"{len(states)} reachable states, {len(failures)} failures, min slack {worst:.4f}")


def test_06_inequality_grids():
    reports = [grid_lemma_eps(), grid_lemma_lin(), grid_lemma_gamma()]
    ok = all(r.ok and r.evaluated >= 10_000 for r in reports)
    record(6, "deterministic inequality grids", ok,
           ", ".join(f"{r.name} {r.evaluated} pts {len(r.failures)} fail" for r in reports))


def test_07_hypergeometric_sampler():
    rng = seeded_rng(77)
    worst, triples = 0.0, 0
    for population in range(1, 13):
        for draws in range(population + 1):
            for targets in range(population + 1):
                r = hypergeometric_draw(HypergeomParams(draws, targets, population), rng, size=200_000)
                exact = hypergeom_pmf_comb(draws, targets, population)
                counts = np.bincount(r, minlength=len(exact) + 1) / len(r)
                emp = {i: c for i, c in enumerate(counts) if c > 0}
                worst = max(worst, total_variation(emp, exact))
                triples += 1
    p = HypergeomParams(5, 3, 10)
    r = hypergeometric_draw(p, rng, size=200_000).astype(float)
    mean_ok = abs(r.mean() - p.mean) <= 3 * math.sqrt(p.variance / len(r))
    # Standard error of the sample variance from the fourth central moment.
    m4 = np.mean((r - p.mean) ** 4)
    var_ok = abs(r.var(ddof=1) - p.variance) <= 3 * math.sqrt((m4 - p.variance ** 2) / len(r))
    record(7, "hypergeometric sampler", worst <= 0.01 and mean_ok and var_ok,
           f"{triples} triples, max TV {worst:.4f}; (5,3,10) mean {r.mean():.4f}, var {r.var(ddof=1):.4f}")


@pytest.mark.slow
def test_08_dummy_equivalence():
    n, k, delta, eps = 6, 2, 0.5, 0.5
    big_n = padded_size(n, k, delta)
    obj = TableObjective(CutObjective(gen_er_graph(n, 0.6, 2)), n)
    padded = DummyPadded(obj, big_n)
    params = SolverParams(k=k, epsilon=eps, delta=delta)
    runs = 100_000
    rng = seeded_rng(8)
    msg = [tuple(sorted(run_msg(counted_oracle(obj), GroundSet(n), params, rng).solution))
           for _ in range(runs)]
    sg = [tuple(sorted(v for v in run_sg(counted_oracle(padded), GroundSet(big_n), params, rng).solution
                       if v < n)) for _ in range(runs)]
    tv = total_variation(empirical(msg), empirical(sg))
    record(8, f"MSG vs dummy-padded SG, n=6 k=2 N={big_n}", tv <= 0.02,
           f"TV {tv:.4f} over {runs} runs each, {len(set(msg) | set(sg))} outcomes")


@pytest.mark.slow
def test_09_delta_has_little_effect(configs_dir, tmp_path):
    flat = read_config(configs_dir / "fig1_delta.cfg")
    flat["output"] = str(tmp_path / "fig1")
    result = run_experiment(ExperimentSpec.from_flat(flat))
    cells = result.summary["cells"]
    by_eps = {}
    for cell in cells:
        by_eps.setdefault(cell["algorithm"].split("_")[0], []).append(cell)
    spreads = {}
    for group, mine in by_eps.items():
        values = [c["mean_value"] for c in mine]
        spreads[group] = (max(values) - min(values)) / max(values)
    small, large = by_eps["msg1"], by_eps["msg2"]
    value_small = np.mean([c["mean_value"] for c in small])
    value_large = np.mean([c["mean_value"] for c in large])
    q_small = np.mean([c["mean_queries"] for c in small])
    q_large = np.mean([c["mean_queries"] for c in large])
    ok = (all(s < 0.05 for s in spreads.values()) and value_small > value_large and q_small > q_large
          and not result.errors)
    record(9, "delta sweep, ER n=100 k=10", ok,
           f"spread eps=0.01 {spreads['msg1']:.2%}, eps=0.5 {spreads['msg2']:.2%}; "
           f"value {value_small:.1f} vs {value_large:.1f}; queries {q_small:.1f} vs {q_large:.1f}")


@pytest.mark.slow
def test_10_efficiency_gap():
    n, k = 1000, 200
    obj = CutObjective(gen_er_graph(n, 0.5, 1))
    ceilings_ok, sg_queries = True, []
    for spec in (AlgorithmSpec("sg", epsilon=0.5), AlgorithmSpec("msg", epsilon=0.5, delta=0.1)):
        ceiling = spec.bounds(n, k)["worst_case_queries"]
        for seed in range(5):
            res = run_algorithm(spec, obj, k, seed)
            ceilings_ok &= res.queries <= ceiling
            if spec.variant == "sg":
                sg_queries.append(res.queries)
    greedy = run_algorithm(AlgorithmSpec("greedy"), obj, k, 0).queries
    factor = greedy / np.mean(sg_queries)
    record(10, "query gap, ER n=1000 k=200", ceilings_ok and factor >= 5,
           f"ceilings {'held' if ceilings_ok else 'exceeded'}; greedy {greedy} queries = "
           f"{factor:.1f}x SG mean {np.mean(sg_queries):.0f}")


def test_11_objective_properties():
    bad = {}
    for name, make in sorted(PROPERTY_OBJECTIVES.items()):
        f = make()
        rng = seeded_rng(99)
        found = len(check_submodular(f, f.n, rng)) + len(check_nonnegative(f, f.n, rng))
        if found:
            bad[name] = found
    record(11, "submodularity and non-negativity", not bad,
           f"{len(PROPERTY_OBJECTIVES)} objectives, violations {bad or 0}")
