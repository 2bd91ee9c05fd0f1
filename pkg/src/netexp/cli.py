"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 validation failure, 3 invariant violation.
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace

from .datasets import (
    BundleFormatError,
    build_er_dataset,
    build_org_hierarchy_dataset,
    build_pa_overlay_dataset,
    save_bundle,
)
from .harness import (
    ConfigError,
    ExperimentConfig,
    _floats,
    _ints,
    run_epsilon_sweep,
    run_needle_scenario,
    run_pval_sweep,
    run_utility_curve,
    verify,
)

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_VIOLATION = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="netexp", description="Information gathering under local network visibility.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("generate", help="build and save a dataset bundle")
    gen.add_argument("--kind", choices=("er", "pa", "org"), required=True)
    gen.add_argument("--out", required=True, help="bundle path prefix")
    gen.add_argument("--n", type=int, default=1000, help="node count")
    gen.add_argument("--p-edge", type=float, default=0.01)
    gen.add_argument("--features", type=int, default=5)
    gen.add_argument("--p-val", type=float, default=0.001)
    gen.add_argument("--theta", type=float, default=0.2)
    gen.add_argument("--m", type=int, default=2)
    gen.add_argument("--experts", type=int, default=100)
    gen.add_argument("--branching", type=int, default=4)
    gen.add_argument("--seed", type=int, default=0)

    def experiment(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", help="key=value config file")
        p.add_argument("--out", help="output directory")
        p.add_argument("--jobs", type=int)
        p.add_argument("--seed-list", help="comma list or start:stop:step of run seeds")
        return p

    experiment("run", "utility-vs-budget curves")
    eps = experiment("sweep-epsilon", "NetExp efficiency across exploration rates")
    eps.add_argument("--epsilons", default="0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0")
    pv = experiment("sweep-pval", "utility at fixed size across valued-node fractions")
    pv.add_argument("--pvals", default="0.001,0.002,0.005,0.01,0.02,0.05")
    pv.add_argument("--budget", type=int, default=50)

    nd = sub.add_parser("needle", help="set size to find a single hidden node, by graph size")
    nd.add_argument("--n-list", default="1000,10000")
    nd.add_argument("--seeds", type=int, default=40, help="graphs per size")
    nd.add_argument("--starts", type=int, default=10, help="start nodes per graph")
    nd.add_argument("--kind", choices=("pa", "path"), default="pa")
    nd.add_argument("--epsilon", type=float, default=0.5)
    nd.add_argument("--out")

    ver = sub.add_parser("verify", help="run the invariant suites")
    ver.add_argument("--level", choices=("fast", "full"), default="fast")
    return parser


def _config(args) -> ExperimentConfig:
    cfg = ExperimentConfig.from_file(args.config) if args.config else ExperimentConfig()
    changes = {}
    if args.out:
        changes["out"] = args.out
    if args.jobs:
        changes["jobs"] = args.jobs
    if args.seed_list:
        changes["seeds"] = _ints(args.seed_list)
    return replace(cfg, **changes)


def _print_rows(rows):
    for row in rows:
        print(",".join(format(v, ".9g") if isinstance(v, float) else str(v) for v in row))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "generate":
            if args.kind == "er":
                bundle = build_er_dataset(args.n, args.p_edge, args.features, args.p_val, args.seed)
            elif args.kind == "pa":
                bundle = build_pa_overlay_dataset(args.n, args.features, args.theta, args.m, args.seed)
            else:
                bundle = build_org_hierarchy_dataset(args.n, args.experts, args.features, args.branching, args.seed)
            save_bundle(bundle, args.out)
            print(f"wrote {args.out}.{{labels,edges,features,meta}}: {bundle.graph}")
        elif args.command == "run":
            for p in run_utility_curve(_config(args)):
                print(f"{p.policy},{p.budget},{p.mean_utility:.9g},{p.se_utility:.9g},{p.mean_exposed:.9g},{p.runs}")
        elif args.command == "sweep-epsilon":
            _print_rows(run_epsilon_sweep(_config(args), _floats(args.epsilons)))
        elif args.command == "sweep-pval":
            _print_rows(run_pval_sweep(_config(args), _floats(args.pvals), args.budget))
        elif args.command == "needle":
            _print_rows(run_needle_scenario(_ints(args.n_list), args.seeds, args.kind, args.starts, args.epsilon, args.out))
        elif args.command == "verify":
            report = verify(args.level)
            print(report.render())
            return EXIT_OK if report.ok else EXIT_VIOLATION
    except (ConfigError, BundleFormatError, ValueError, FileNotFoundError) as exc:
        print(f"netexp: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
