"""
Command line entry point.

Exit codes: 0 success / property holds, 1 a checked property fails,
2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import schemas
from .algorithms import run_iwrr, run_sm, run_sm_iwrr, run_weighted_greedy
from .audit import DEFAULT_GAMMA, audit, normalize_notion
from .fixtures import build_all, certify, load_fixtures, write_fixtures
from .harness import GeneratorSpec, certify_batch, gamma_frontier, generate, GuaranteeViolation
from .model import (
    InputError,
    PreconditionError,
    allocation_to_json,
    group_allocation_to_json,
    instance_to_json,
    load_allocation,
    load_instance,
    to_value,
)
from .oracle import DEFAULT_BUDGET, MODES, Query, enumerate_allocations
from .stability import check_group_epsilon_stability

ALGORITHMS = {
    "sm": run_sm,
    "iwrr": run_iwrr,
    "sm-iwrr": run_sm_iwrr,
    "weighted-greedy": run_weighted_greedy,
}


class UsageError(Exception):
    pass


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


def _notions(text):
    if not text:
        return []
    return [normalize_notion(t) for t in text.split(",") if t.strip()]


def _size(text):
    if ":" in text:
        lo, hi = text.split(":", 1)
        return (int(lo), int(hi))
    return int(text)


def _distribution(text):
    parts = text.split(":")
    if parts[0] == "uniform" and len(parts) == 3:
        return ("uniform", int(parts[1]), int(parts[2]))
    if parts[0] == "zipf" and len(parts) == 3:
        return ("zipf", float(parts[1]), int(parts[2]))
    raise argparse.ArgumentTypeError("expected uniform:LO:HI or zipf:S:CAP")


def _partition(text):
    if text in ("balanced", "random"):
        return text
    return tuple(int(s) for s in text.split(","))


def _spec_from_args(args) -> GeneratorSpec:
    return GeneratorSpec(n=args.n, m=args.m, num_groups=args.groups, valuation_class=args.cls,
                         distribution=args.dist, partition=args.partition, seed=args.seed)


# subcommands

def cmd_allocate(args) -> int:
    inst = load_instance(args.instance)
    alloc, trace = ALGORITHMS[args.algo](inst)
    if args.algo == "weighted-greedy":
        _emit(group_allocation_to_json(alloc, inst))
    else:
        _emit(allocation_to_json(alloc, inst))
    if args.trace:
        with open(args.trace, "w") as fh:
            fh.write(trace.to_jsonl())
    return 0


def cmd_audit(args) -> int:
    inst = load_instance(args.instance)
    alloc = load_allocation(args.allocation, inst)
    gamma = to_value(args.gamma) if args.gamma is not None else DEFAULT_GAMMA
    if gamma <= 0:
        raise InputError("gamma must be positive")
    report = audit(inst, alloc, gamma)
    _emit(report.to_json())
    requested = _notions(args.require)
    if args.gamma is not None:
        requested.append(normalize_notion(f"EXANTE_WEF1({args.gamma})"))
    for tag in requested:
        verdict = report.verdict(tag)
        if verdict is None:
            raise PreconditionError(f"{tag} is not defined for a {inst.valuation_class} instance")
        if not verdict.passed:
            return 1
    return 0


def cmd_oracle(args) -> int:
    inst = load_instance(args.instance)
    query = Query(frozenset(_notions(args.require)), frozenset(_notions(args.forbid)), args.mode)
    res = enumerate_allocations(inst, query, args.budget)
    out = {"verdict": res.verdict, "allocations_examined": res.allocations_examined,
           "query": {"required": sorted(query.required), "forbidden": sorted(query.forbidden),
                     "mode": query.mode}}
    if res.witness is not None:
        out["witness"] = allocation_to_json(res.witness, inst)
    if res.count is not None:
        out["count"] = res.count
    _emit(out)
    return 1 if res.verdict in ("none", "fails") else 0


def cmd_stability(args) -> int:
    inst = load_instance(args.instance)
    verdict = check_group_epsilon_stability(inst, args.mechanism)
    _emit({"pass": verdict.passed, "deviations": len(verdict.ledger),
           "violations": [e.to_json(inst) for e in verdict.violations()],
           "identity_rerun_ok": verdict.identity_rerun_ok})
    if args.ledger:
        with open(args.ledger, "w") as fh:
            fh.write(verdict.ledger_jsonl(inst))
    return 0 if verdict.passed and verdict.identity_rerun_ok else 1


def cmd_gen(args) -> int:
    _emit(instance_to_json(generate(_spec_from_args(args))))
    return 0


def cmd_certify(args) -> int:
    report = certify_batch(_spec_from_args(args), args.count, args.repro_dir)
    _emit(report.to_json())
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(report.to_csv())
    return 0 if report.ok else 1


def cmd_frontier(args) -> int:
    spec = _spec_from_args(args)
    try:
        worst, seed = gamma_frontier(spec, args.count)
    except GuaranteeViolation as exc:
        sys.stderr.write(f"{exc}\n")
        return 1
    shown = None if worst is None else ("inf" if worst == float("inf") else str(worst))
    _emit({"max_min_feasible_gamma": shown, "seed": seed, "count": args.count})
    return 0


def cmd_fixtures(args) -> int:
    if args.write:
        write_fixtures(args.write, args.c)
        return 0
    if not args.verify:
        raise UsageError("fixtures needs --verify or --write DIR")
    if args.dir and args.c is not None:
        raise UsageError("--dir and --c are exclusive")
    fixtures = load_fixtures(args.dir) if args.c is None else build_all(to_value(args.c))
    results = certify(fixtures)
    for r in results:
        sys.stdout.write(r.line() + "\n")
    return 0 if all(r.ok for r in results) else 1


def _add_spec_flags(p) -> None:
    p.add_argument("--n", type=_size, default=4, help="agents, N or LO:HI")
    p.add_argument("--m", type=_size, default=8, help="goods, N or LO:HI")
    p.add_argument("--groups", type=_size, default=2, help="groups, N or LO:HI")
    p.add_argument("--class", dest="cls", default="general",
                   choices=["all-common", "group-common", "general"])
    p.add_argument("--dist", type=_distribution, default=("uniform", 0, 1000))
    p.add_argument("--partition", type=_partition, default="random",
                   help="balanced, random or comma-separated group sizes")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="groupfair", description=__doc__.strip().splitlines()[0])
    parser.add_argument("--schema", action="store_true", help="print the JSON schemas and exit")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("allocate", help="run an allocation algorithm")
    p.add_argument("--algo", required=True, choices=sorted(ALGORITHMS))
    p.add_argument("--instance", required=True)
    p.add_argument("--trace", help="write the pick trace as JSON lines")
    p.set_defaults(func=cmd_allocate)

    p = sub.add_parser("audit", help="fairness report for an allocation")
    p.add_argument("--instance", required=True)
    p.add_argument("--allocation", required=True)
    p.add_argument("--gamma", help="ex-ante factor (p/q or decimal); also makes it required")
    p.add_argument("--require", help="comma-separated notions that must hold (exit 1 otherwise)")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("oracle", help="exhaustive search over all allocations")
    p.add_argument("--instance", required=True)
    p.add_argument("--require", default="", help="comma-separated notions that must hold")
    p.add_argument("--forbid", default="", help="comma-separated notions that must fail")
    p.add_argument("--mode", choices=MODES, default="exists")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("stability", help="group epsilon-stability under single-agent deviations")
    p.add_argument("--instance", required=True)
    p.add_argument("--mechanism", required=True, choices=["iwrr", "sm-iwrr"])
    p.add_argument("--ledger", help="write one JSON line per deviation")
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("gen", help="generate a seeded random instance")
    _add_spec_flags(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("certify", help="batch-check algorithm guarantees on random instances")
    _add_spec_flags(p)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--csv", help="write one row per instance and property")
    p.add_argument("--repro-dir", help="write reproduction bundles for failures here")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("frontier", help="worst ex-ante factor needed by IWRR over a batch")
    _add_spec_flags(p)
    p.add_argument("--count", type=int, default=100)
    p.set_defaults(func=cmd_frontier)

    p = sub.add_parser("fixtures", help="certify the shipped separating instances")
    p.add_argument("--verify", action="store_true")
    p.add_argument("--c", help="rebuild fixtures with this large value instead of reading files")
    p.add_argument("--dir", help="read fixture files from this directory")
    p.add_argument("--write", metavar="DIR", help="write fixture files to DIR")
    p.set_defaults(func=cmd_fixtures)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.schema:
        _emit(schemas.ALL)
        return 0
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        return args.func(args)
    except (InputError, PreconditionError, UsageError, OSError, ValueError) as exc:
        sys.stderr.write(f"groupfair {args.command}: error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
