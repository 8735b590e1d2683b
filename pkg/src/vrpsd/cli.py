"""Command-line entry point: ``vrpsd {solve,generate,evaluate,oracle-check,bench}``.

Exit codes: 0 success, 1 limit reached or a check failed, 2 usage or input error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from .instance import (
    InstanceError,
    RoutingPlan,
    dump_instance,
    generate_instance,
    load_instance,
    plan_is_feasible,
)
from .recourse import q_value

TIME_LIMIT_ENV = "VRPSD_TIME_LIMIT"
BENCH_COLUMNS = ["instance", "mode", "setcuts", "activation", "status", "obj", "bound", "gap", "nodes", "cuts_by_tag", "seconds"]
EXIT_OK, EXIT_LIMIT, EXIT_ERROR = 0, 1, 2


class UsageError(Exception):
    pass


def _default_time_limit() -> float:
    raw = os.environ.get(TIME_LIMIT_ENV)
    if raw is None:
        return 600.0
    try:
        return float(raw)
    except ValueError:
        raise UsageError(f"{TIME_LIMIT_ENV} must be a number, got {raw!r}") from None


def _config(mode: str, set_cuts: bool, activation: str, time_limit: float, **extra):
    from .solver import Config

    try:
        return Config(mode=mode, use_set_cuts=set_cuts, activation=activation, time_limit=time_limit, **extra)
    except ValueError as err:
        raise UsageError(str(err)) from None


def _load(path: str):
    try:
        return load_instance(path)
    except OSError as err:
        raise UsageError(f"cannot read {path}: {err.strerror}") from None
    except (InstanceError, ValueError, KeyError) as err:
        raise UsageError(f"invalid instance {path}: {err}") from None


def cmd_solve(args) -> int:
    from .solver import solve

    cfg = _config(args.mode, args.set_cuts, args.activation, args.time_limit, node_limit=args.node_limit, lp_dump=args.dump_lp)
    inst = _load(args.instance)
    res = solve(inst, cfg)
    record = res.to_dict()
    record["instance"] = Path(args.instance).name
    record["config"] = {"mode": cfg.mode.value, "set_cuts": cfg.use_set_cuts, "activation": cfg.activation}
    text = json.dumps(record, indent=2, sort_keys=True)
    if args.output:
        Path(args.output).write_text(text + "\n")
    else:
        print(text)
    return EXIT_LIMIT if res.status == "limit" else EXIT_OK


def cmd_generate(args) -> int:
    try:
        inst = generate_instance(
            args.n,
            args.k,
            args.capacity,
            args.scenarios,
            args.distribution,
            args.seed,
            cv=args.cv,
            fill=args.fill,
            name=args.name or "",
        )
    except (InstanceError, ValueError) as err:
        raise UsageError(str(err)) from None
    text = dump_instance(inst)
    if args.output:
        Path(args.output).write_text(text + "\n")
    else:
        print(text)
    return EXIT_OK


def _parse_routes(text: str) -> RoutingPlan:
    try:
        routes = [[int(v) for v in part.split(",")] for part in text.split(";") if part.strip()]
        return RoutingPlan(routes)
    except ValueError as err:
        raise UsageError(f"bad route list {text!r}: {err}") from None


def cmd_evaluate(args) -> int:
    inst = _load(args.instance)
    plan = _parse_routes(args.routes)
    if not plan_is_feasible(plan, inst):
        raise UsageError("plan does not cover every customer with the fleet size within capacity")
    routing = inst.plan_cost(plan)
    recourse = sum((q_value(r, inst) for r in plan.routes), Fraction(0))
    total = routing + recourse + inst.objective_offset
    out = {
        "routes": [list(r.customers) for r in plan.routes],
        "routing_cost": str(routing),
        "recourse": str(recourse),
        "offset": str(inst.objective_offset),
        "total": str(total),
        "total_float": float(total),
    }
    print(json.dumps(out, indent=2))
    return EXIT_OK


def cmd_oracle_check(args) -> int:
    from .checks import run_checks

    if args.instances <= 0:
        print("warning: budget 0, nothing checked", file=sys.stderr)
        print("PASS (vacuous)")
        return EXIT_OK
    outcomes = run_checks(args.seed, args.instances)
    for o in outcomes:
        line = f"{'PASS' if o.passed else 'FAIL'} {o.name} ({o.trials} trials)"
        print(line + (f": {o.detail}" if o.detail else ""))
    return EXIT_OK if all(o.passed for o in outcomes) else EXIT_LIMIT


def _bench_one(task) -> dict:
    from .solver import solve

    path, mode, set_cuts, activation, time_limit = task
    cfg = _config(mode, set_cuts, activation, time_limit)
    res = solve(load_instance(path), cfg)
    return {
        "instance": Path(path).name,
        "mode": mode,
        "setcuts": int(set_cuts),
        "activation": activation,
        "status": res.status,
        "obj": "" if res.objective is None else f"{float(res.objective):.6f}",
        "bound": f"{res.bound:.6f}",
        "gap": f"{res.gap:.6g}",
        "nodes": res.stats["nodes"],
        "cuts_by_tag": ";".join(f"{k}={v}" for k, v in res.stats["cuts_by_tag"].items()),
        "seconds": f"{res.stats['seconds']:.3f}",
    }


def _bench_configs(text: str) -> list[tuple[str, bool]]:
    out = []
    for item in text.split(","):
        item = item.strip().lower()
        mode, _, extra = item.partition("+")
        if mode not in ("d1", "d2") or extra not in ("", "set"):
            raise UsageError(f"unknown configuration {item!r}")
        if extra and mode != "d2":
            raise UsageError("set cuts require d2")
        out.append((mode, bool(extra)))
    return out


def cmd_bench(args) -> int:
    folder = Path(args.directory)
    if not folder.is_dir():
        raise UsageError(f"{folder} is not a directory")
    configs = _bench_configs(args.configs)
    files = sorted(str(p) for p in folder.glob("*.json"))
    tasks = [(f, mode, sc, args.activation, args.time_limit) for f in files for mode, sc in configs]
    if args.jobs > 1 and tasks:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_bench_one, tasks))
    else:
        rows = [_bench_one(t) for t in tasks]
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=BENCH_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    if args.output:
        Path(args.output).write_text(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vrpsd", description="Branch-and-cut for the VRP with stochastic demands.")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    def solver_flags(p):
        p.add_argument("--mode", choices=["d1", "d2"], default="d2")
        p.add_argument("--set-cuts", action="store_true")
        p.add_argument("--activation", choices=["whs", "wof"], default="whs")
        p.add_argument("--time-limit", type=float, default=None, help=f"seconds (default: ${TIME_LIMIT_ENV} or 600)")

    p = sub.add_parser("solve", help="solve one instance and print a JSON record")
    p.add_argument("instance")
    solver_flags(p)
    p.add_argument("--node-limit", type=int, default=None)
    p.add_argument("--seed", type=int, default=0, help="accepted for reproducible scripts; the solver is deterministic")
    p.add_argument("--output", "-o")
    p.add_argument("--dump-lp", metavar="PATH", help="write the final LP in text form")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("generate", help="write a random instance as JSON")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--capacity", type=int, default=100)
    p.add_argument("--scenarios", type=int, default=10)
    p.add_argument("--distribution", choices=["independent", "correlated"], default="independent")
    p.add_argument("--cv", type=float, default=0.3)
    p.add_argument("--fill", type=float, default=0.7)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--name")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("evaluate", help="exact cost of a given plan")
    p.add_argument("instance")
    p.add_argument("--routes", required=True, help='routes as "1,2,3;4,5"')
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("oracle-check", help="randomized checks against brute force")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--instances", type=int, default=20)
    p.set_defaults(func=cmd_oracle_check)

    p = sub.add_parser("bench", help="solve every instance in a directory under several configurations")
    p.add_argument("directory")
    p.add_argument("--configs", default="d1,d2,d2+set")
    p.add_argument("--activation", choices=["whs", "wof"], default="whs")
    p.add_argument("--time-limit", type=float, default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    logging.basicConfig(level=logging.WARNING - 10 * args.verbose, format="%(levelname)s %(name)s: %(message)s")
    try:
        if getattr(args, "time_limit", 0) is None:
            args.time_limit = _default_time_limit()
        return args.func(args)
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_ERROR
    except Exception as err:  # noqa: BLE001
        if args.verbose:
            raise
        print(f"error: {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
