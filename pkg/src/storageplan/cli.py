"""Command-line interface.

Exit codes: 0 success, 1 invalid input, 2 the solve stopped without
reaching the convergence tolerance, 3 infeasible dispatch.
"""

from __future__ import annotations

import argparse
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import bench, datafiles, lp_core, oracle, planner, scenario
from .datafiles import ParseError
from .dispatch import (DispatchInfeasibleError, export_dispatch_table,
                       export_price_table)
from .model import Plan, validate_network
from .scenario import ProfileError

EXIT_OK = 0
EXIT_BAD_INPUT = 1
EXIT_NOT_CONVERGED = 2
EXIT_INFEASIBLE = 3

BUNDLED_TECHS = ("aa_caes", "libes")


def _load_text(path: str) -> str:
    try:
        return datafiles.read_file(path)
    except OSError as exc:
        raise ParseError(path, 0, f"cannot read file: {exc.strerror}") from None


def _load_case(args):
    net = datafiles.parse_network(_load_text(args.network), args.network)
    days = datafiles.parse_days(_load_text(args.days), args.days)
    if args.tech in BUNDLED_TECHS:
        tech = datafiles.load_bundled_tech(args.tech)
    else:
        tech = datafiles.parse_tech(_load_text(args.tech), args.tech)
    report = validate_network(net, days)
    if not report.ok:
        raise ParseError(args.network, 0,
                         "; ".join(report.violations))
    return net, days, tech


def _load_config(args) -> dict:
    cfg = {}
    if getattr(args, "config", None):
        cfg = datafiles.parse_config(_load_text(args.config), args.config)
    for key in ("epsilon", "chi", "workers", "seed"):
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    if getattr(args, "budget", None) is not None:
        cfg["budget_max"] = args.budget
    return cfg


def _write(out_dir: str, name: str, body: str, stamp: bool = True):
    path = Path(out_dir)
    path.mkdir(parents=True, exist_ok=True)
    ts = datetime.now(timezone.utc).isoformat(timespec="seconds")
    head = f"# generated {ts}\n" if stamp else ""
    (path / name).write_text(head + body)
    return path / name


def cmd_plan(args) -> int:
    net, days, tech = _load_case(args)
    cfg = _load_config(args)
    epsilon = cfg.get("epsilon", 0.05)
    if not (0 < epsilon < 1):
        print("error: epsilon must be in (0, 1)", file=sys.stderr)
        return EXIT_BAD_INPUT
    result = planner.outer_loop(
        net, days, tech, chi=cfg.get("chi", 1.0),
        budget_init=cfg.get("budget_max"),
        budget_min=cfg.get("budget_min"),
        epsilon=epsilon, max_outer=cfg.get("max_outer", 20),
        max_iter=cfg.get("max_iter", 150), workers=cfg.get("workers", 1),
    )
    _write(args.out_dir, "report.txt", planner.format_report(result))
    _write(args.out_dir, "trace.txt", planner.format_trace(result))
    print(planner.format_report(result), end="")
    if result.return_unachievable:
        print("required rate of return is unachievable; no storage built")
        return EXIT_OK
    if not result.converged:
        print("warning: iteration limit reached before convergence",
              file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def cmd_evaluate(args) -> int:
    net, days, tech = _load_case(args)
    plan = datafiles.parse_plan(_load_text(args.plan), args.plan)
    cfg = _load_config(args)
    result = planner.evaluate_plan(net, days, tech, plan,
                                   workers=cfg.get("workers", 1))
    _write(args.out_dir, "report.txt", planner.format_report(result))
    print(planner.format_report(result), end="")
    return EXIT_OK


def cmd_oracle(args) -> int:
    net, days, tech = _load_case(args)
    cfg = _load_config(args)
    res = oracle.solve_monolithic(net, days, tech, cfg.get("budget_max"))
    body = [f"system_cost = {res.system_cost:.6f}",
            f"rows = {res.rows}", f"cols = {res.cols}",
            f"nonzeros = {res.nonzeros}",
            f"build_time = {res.build_time:.3f}",
            f"solve_time = {res.solve_time:.3f}",
            "[plan]"]
    body += [f"{b} {p:.6f} {e:.6f}"
             for b, (p, e) in sorted(res.plan.ratings.items())]
    text = "\n".join(body) + "\n"
    _write(args.out_dir, "oracle.txt", text)
    print(text, end="")
    return EXIT_OK


def cmd_dispatch(args) -> int:
    net, days, tech = _load_case(args)
    plan = Plan()
    if args.plan:
        plan = datafiles.parse_plan(_load_text(args.plan), args.plan)
    sols = planner.dispatch_all(net, days, plan, tech)
    dtab = "".join(export_dispatch_table(s, net) for s in sols.values())
    ptab = "".join(export_price_table(s) for s in sols.values())
    _write(args.out_dir, "dispatch.txt", dtab)
    _write(args.out_dir, "prices.txt", ptab)
    cost = sum(day.weight * sols[day.day_id].cost for day in days)
    print(f"weighted_operating_cost = {cost:.6f}")
    return EXIT_OK


def cmd_cluster(args) -> int:
    profiles = scenario.load_profiles(_load_text(args.profiles),
                                      args.profiles)
    days = scenario.cluster_days(profiles, args.clusters)
    text = datafiles.write_days(days)
    out = _write(args.out_dir, "days.txt", text, stamp=False)
    print(f"wrote {len(days)} typical days "
          f"(total weight {sum(d.weight for d in days):g}) to {out}")
    return EXIT_OK


def cmd_bench(args) -> int:
    """Decomposition vs monolithic runtimes over growing day counts."""
    sizes = tuple(args.sizes or (1, 3, 5, 10))
    if any(s < 1 for s in sizes):
        raise ValueError("bench sizes must be positive")
    rows = bench.scaling_benchmark(args.seed, sizes,
                                   args.epsilon or 0.05)
    text = bench.format_bench(rows)
    print(text, end="")
    _write(args.out_dir, "bench.txt", text)
    return EXIT_OK


def _add_case_args(sp, days_required=True):
    sp.add_argument("--network", required=True)
    sp.add_argument("--days", required=days_required)
    sp.add_argument("--tech", required=True,
                    help="tech file or a bundled name "
                         f"({', '.join(BUNDLED_TECHS)})")
    sp.add_argument("--config")
    sp.add_argument("--out-dir", default=".")
    sp.add_argument("--workers", type=int)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="storageplan",
        description="Siting and sizing of grid storage via cutting planes")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="optimize a storage plan")
    _add_case_args(p)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--chi", type=float)
    p.add_argument("--budget", type=float)
    p.set_defaults(fn=cmd_plan)

    p = sub.add_parser("evaluate", help="dispatch a fixed plan")
    _add_case_args(p)
    p.add_argument("--plan", required=True)
    p.set_defaults(fn=cmd_evaluate)

    p = sub.add_parser("oracle", help="solve the monolithic investment LP")
    _add_case_args(p)
    p.add_argument("--budget", type=float)
    p.set_defaults(fn=cmd_oracle)

    p = sub.add_parser("dispatch", help="export dispatch and price tables")
    _add_case_args(p)
    p.add_argument("--plan")
    p.set_defaults(fn=cmd_dispatch)

    p = sub.add_parser("cluster", help="build typical days from profiles")
    p.add_argument("--profiles", required=True)
    p.add_argument("--clusters", type=int, required=True)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(fn=cmd_cluster)

    p = sub.add_parser("bench", help="scaling benchmark on a seeded instance")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--sizes", type=int, nargs="+",
                   help="day counts to benchmark (default 1 3 5 10)")
    p.add_argument("--out-dir", default=".")
    p.set_defaults(fn=cmd_bench)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ParseError, ProfileError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except DispatchInfeasibleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except lp_core.LPError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED


if __name__ == "__main__":
    sys.exit(main())
