"""Command-line entry point: ``submax {solve,bench,verify,gen,bounds}``.

Exit codes: 0 success, 1 usage or input error, 2 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

from .algorithms import VARIANTS, AlgorithmSpec, run_algorithm, theoretical_bounds
from .bench import (
    ExperimentSpec, VerifySpec, instance_from_flat, parse_value, read_config, run_experiment,
    verify_guarantees,
)
from .core import SubmaxError
from .objectives import InstanceSpec, build_graph, build_objective, build_psd


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _epsilon(text: str):
    if text.lower() == "auto":
        return None
    return float(text)


def _add_instance_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key=value file providing instance.* keys")
    p.add_argument("--instance", help="instance kind, e.g. er_graph, ba_graph, psd_synthetic")
    p.add_argument("-P", "--param", action="append", default=[], metavar="KEY=VALUE",
                   help="instance parameter, repeatable (e.g. -P n=100 -P p=0.5)")
    p.add_argument("--paper-scale", action="store_true",
                   help="apply paper_scale.* overrides from the config")


def _instance(args, default: InstanceSpec | None = None) -> InstanceSpec:
    flat = read_config(args.config, paper_scale=args.paper_scale) if args.config else {}
    if args.instance:
        flat["instance.kind"] = args.instance
    for item in args.param:
        if "=" not in item:
            raise UsageError(f"--param expects KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        flat["instance." + key.strip()] = parse_value(value)
    if "instance.kind" not in flat:
        if default is None:
            raise UsageError("no instance given (use --instance/--param or --config)")
        return default
    return instance_from_flat(flat)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="submax", description="Stochastic greedy submodular maximization.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="run one algorithm on one instance, print JSON")
    _add_instance_args(p)
    p.add_argument("--alg", choices=VARIANTS, default="msg")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--epsilon", type=_epsilon, default=0.5, help="value in (0,1) or 'auto'")
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cap", type=int, default=5_000_000)
    p.add_argument("--timing", action="store_true", help="include wall time in the output")

    p = sub.add_parser("bench", help="run an experiment sweep from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int, help="override base_seed")
    p.add_argument("--out", help="output directory")
    p.add_argument("--paper-scale", action="store_true")

    p = sub.add_parser("verify", help="compare mean approximation ratio with its guarantee")
    _add_instance_args(p)
    p.add_argument("--alg", choices=VARIANTS, default="msg")
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--epsilon", type=_epsilon, default=None, help="value in (0,1) or 'auto'")
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--trials", type=int, default=5000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cap", type=int, default=5_000_000)
    p.add_argument("--monotone", action="store_true", help="use the monotone-case floor")
    p.add_argument("--floor", type=float, help="explicit floor overriding the bound")
    p.add_argument("--out", help="also write the report as JSON here")

    p = sub.add_parser("gen", help="write an instance to a CSV file")
    _add_instance_args(p)
    p.add_argument("--out", required=True)

    p = sub.add_parser("bounds", help="print closed-form guarantees and query counts")
    p.add_argument("--alg", choices=VARIANTS, default="msg")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--epsilon", type=_epsilon, default=None, help="value in (0,1) or 'auto'")
    p.add_argument("--delta", type=float, default=0.1)
    return parser


# Default verification scenario: MSG on a 24-node ER cut instance.
VERIFY_DEFAULT = InstanceSpec("er_graph", {"n": 24, "p": 0.5, "seed": 7})


def cmd_solve(args) -> int:
    spec = AlgorithmSpec(args.alg, epsilon=args.epsilon, delta=args.delta, cap=args.cap)
    res = run_algorithm(spec, build_objective(_instance(args)), args.k, args.seed)
    print(json.dumps(res.to_dict(timing=args.timing), indent=2, sort_keys=True))
    return 0


def cmd_bench(args) -> int:
    flat = read_config(args.config, paper_scale=args.paper_scale)
    if args.trials is not None:
        flat["trials"] = args.trials
    if args.seed is not None:
        flat["base_seed"] = args.seed
    if args.out is not None:
        flat["output"] = args.out
    result = run_experiment(ExperimentSpec.from_flat(flat))
    print(f"wrote {result.csv_path} ({len(result.rows)} rows) and {result.summary_path}")
    for cell in result.summary["cells"]:
        print(f"{cell['algorithm']:>14} k={cell['k']:<5} value {cell['mean_value']:.4g} "
              f"± {cell['std_value']:.3g}  queries {cell['mean_queries']:.1f}"
              f"{'' if cell['pass'] else '  CEILING EXCEEDED'}")
    for err in result.errors:
        print(f"error in {err['algorithm']} k={err['k']} trial={err['trial']}: {err['error']}",
              file=sys.stderr)
    return 0


def cmd_verify(args) -> int:
    spec = VerifySpec(
        instance=_instance(args, default=VERIFY_DEFAULT),
        algorithm=AlgorithmSpec(args.alg, epsilon=args.epsilon, delta=args.delta, cap=args.cap),
        k=args.k, trials=args.trials, base_seed=args.seed, cap=args.cap,
        monotone=args.monotone, floor=args.floor,
    )
    report = verify_guarantees(spec)
    print(report.line())
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(report.to_dict(), fh, indent=2)
    return 0 if report.passed else 2


def cmd_gen(args) -> int:
    spec = _instance(args)
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if spec.kind in ("er_graph", "ba_graph"):
            writer.writerow(["u", "v", "w"])
            writer.writerows(build_graph(spec).edge_list())
        elif spec.kind in ("psd_synthetic", "psd_from_csv"):
            for row in build_psd(spec).matrix:
                writer.writerow([repr(float(x)) for x in row])
        elif spec.kind == "coverage":
            obj = build_objective(spec)
            writer.writerow(["element", "items"])
            for i, s in enumerate(obj.sets):
                writer.writerow([i, " ".join(map(str, sorted(s)))])
        else:
            writer.writerow(["weight"])
            writer.writerows([[w] for w in build_objective(spec).weights])
    print(f"wrote {args.out}")
    return 0


def cmd_bounds(args) -> int:
    b = theoretical_bounds(args.n, args.k, args.epsilon, args.delta, args.alg)
    for key, value in b.items():
        if isinstance(value, float):
            value = f"{value:.6g}"
        print(f"{key} = {value}")
    return 0


COMMANDS = {"solve": cmd_solve, "bench": cmd_bench, "verify": cmd_verify,
            "gen": cmd_gen, "bounds": cmd_bounds}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, SubmaxError, OSError, KeyError) as exc:
        msg = f"missing parameter {exc}" if isinstance(exc, KeyError) else str(exc)
        print(f"submax {args.command}: error: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
