"""Command line: ``bipartite-thermo simulate ...`` and ``bipartite-thermo checks list``.

Exit codes are 0 when every requested check passes, 1 when one fails, 2 for
input errors and 3 for a numerical abort.
"""
import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .checks import CATALOG, list_checks
from .dynamics import step_hamiltonian
from .runner import EXIT_ABORT, EXIT_INPUT, run
from .scenario import ScenarioError, bundled_scenarios, load_scenario, resolve_scenario_path

OUT_ENV = "BIPARTITE_THERMO_OUT"
DEFAULT_OUT = "bipartite_thermo_out"


def default_out_dir():
    return Path(os.environ.get(OUT_ENV) or DEFAULT_OUT)


def _parser():
    p = argparse.ArgumentParser(prog="bipartite-thermo",
                                description="Thermodynamics of open bipartite quantum systems.")
    sub = p.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one or more scenario files")
    sim.add_argument("scenarios", nargs="+", metavar="scenario-file",
                     help="path to a TOML scenario, or the name of a bundled scenario")
    sim.add_argument("--out", type=Path, default=None,
                     help=f"output directory (default: ${OUT_ENV} or ./{DEFAULT_OUT})")
    sim.add_argument("--check", nargs="+", action="extend", default=None, metavar="NAME",
                     help="evaluate these checks instead of the scenario's list")
    sim.add_argument("--dt", type=float, default=None, help="override integrator.dt")
    sim.add_argument("--t-end", type=float, default=None, help="override integrator.t_end")
    sim.add_argument("--jobs", type=int, default=1, help="run scenarios in N processes")

    chk = sub.add_parser("checks", help="inspect the check catalog")
    chk.add_argument("action", choices=["list"])

    scn = sub.add_parser("scenarios", help="inspect the bundled scenarios")
    scn.add_argument("action", choices=["list"])
    return p


def _prepare(arg, checks, dt, t_end):
    scen = load_scenario(resolve_scenario_path(arg))
    if checks is not None:
        unknown = [c for c in checks if c not in CATALOG]
        if unknown:
            raise ScenarioError(f"unknown check {unknown[0]!r}; see `bipartite-thermo checks list`")
        checks = {c: scen.checks.get(c, CATALOG[c].default_tol) for c in checks}
    try:
        if dt is not None or t_end is not None or checks is not None:
            scen = scen.with_overrides(dt=dt, t_end=t_end, checks=checks)
        scen.integrator.check_step(step_hamiltonian(scen.build_system()))
    except ValueError as exc:
        raise ScenarioError(f"{scen.source}: integrator: {exc}") from None
    return scen


def _run_one(scen, out_dir):
    code, report = run(scen, out_dir)
    return scen.name, code, report, str(out_dir)


def _print_report(name, code, report, out_dir, stream):
    if report.get("status") == "abort":
        print(f"[{name}] numerical abort: {report['error']}", file=sys.stderr)
        for k, v in report.get("diagnostic", {}).items():
            print(f"[{name}]   {k} = {v}", file=sys.stderr)
        return
    for cname, o in report["checks"].items():
        val = "" if o["value"] is None else f" value={o['value']:.6g}"
        print(f"[{name}] {cname}: {o['outcome']}{val} tol={o['tol']:g}", file=stream)
    print(f"[{name}] {report['status']} ({report['wall_time_s']:.2f} s) -> {out_dir}", file=stream)


def cmd_simulate(args):
    base = args.out if args.out is not None else default_out_dir()
    if args.jobs < 1:
        print("error: --jobs must be >= 1", file=sys.stderr)
        return EXIT_INPUT
    try:
        scens = [_prepare(a, args.check, args.dt, args.t_end) for a in args.scenarios]
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    names = [s.name for s in scens]
    if len(set(names)) != len(names):
        print("error: scenarios in one batch must have distinct names", file=sys.stderr)
        return EXIT_INPUT
    dirs = [base if len(scens) == 1 else base / s.name for s in scens]
    if args.jobs > 1 and len(scens) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_run_one, scens, dirs))
    else:
        results = [_run_one(s, d) for s, d in zip(scens, dirs)]
    for name, code, report, out in results:
        _print_report(name, code, report, out, sys.stdout)
    return max(code for _, code, _, _ in results)


def cmd_checks(args):
    for spec in list_checks():
        print(f"{spec.name:26s} tol={spec.default_tol:<8g} {spec.formula}")
        print(f"{'':26s} {spec.description}")
    return 0


def cmd_scenarios(args):
    for name in bundled_scenarios():
        print(name)
    return 0


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        if args.command == "simulate":
            return cmd_simulate(args)
        if args.command == "checks":
            return cmd_checks(args)
        return cmd_scenarios(args)
    except KeyboardInterrupt:
        return EXIT_ABORT


if __name__ == "__main__":
    sys.exit(main())
