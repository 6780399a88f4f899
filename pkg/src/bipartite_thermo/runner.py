"""Execute a scenario and write its trajectory CSV and JSON report."""
import csv
import json
import time
import warnings
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import checks as _checks
from .dynamics import IntegratorConfig, find_steady_state, integrate, rhs, rotating_frame
from .errors import IntegrationError, SteadyStateError
from .models import DrivenSystem
from .thermo import analyze, analyze_driven, steady_record

EXIT_OK, EXIT_CHECK_FAILED, EXIT_INPUT, EXIT_ABORT = 0, 1, 2, 3

CSV_COLUMNS = (
    "t", "E_A", "E_B", "E_AB", "P_A", "P_B", "Qdot_A", "Qdot_V", "Qdot_hot", "Qdot_cold",
    "Qdot_hotA", "Qdot_hotV", "Qdot_coldA", "Qdot_coldV", "S_A", "S_B", "S_AB", "dSdt_AB",
    "dSdt_A", "sigma", "sigma_A", "firstlaw_res_A", "leak",
)


@dataclass(frozen=True)
class RunResult:
    scenario: object
    system: object
    traj: object
    steady: dict = None
    outcomes: tuple = ()
    wall_time: float = 0.0
    warnings: tuple = ()

    @property
    def exit_code(self):
        failed = any(o.outcome == _checks.FAIL for o in self.outcomes)
        return EXIT_CHECK_FAILED if failed else EXIT_OK


def execute(scenario):
    """Integrate and analyze, then evaluate checks (with an optional steady-state search).

    Raises :class:`IntegrationError` or :class:`SteadyStateError` on a
    numerical abort.
    """
    start = time.perf_counter()
    sys = scenario.build_system()
    rho0 = scenario.initial_density(sys)
    cfg = scenario.integrator
    delta = scenario.analysis["delta_rel"]
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        traj = integrate(sys, rho0, cfg)
        if isinstance(sys, DrivenSystem):
            traj = analyze_driven(traj, delta)
        else:
            traj = analyze(traj, delta, scenario.analysis["fd_order"])
        steady = None
        if scenario.steady_state["enabled"]:
            ss_cfg = IntegratorConfig(cfg.dt, cfg.t_end, cfg.sample_every, cfg.ss_tol,
                                      scenario.steady_state["max_steps"], cfg.max_phase)
            rho = find_steady_state(sys, traj.states[-1], ss_cfg)
            steady = dict(rho=rho, record=steady_record(sys, rho, 0.0, delta),
                          residual=_residual(sys, rho))
    notes = tuple(str(w.message) for w in caught)
    run = RunResult(scenario, sys, traj, steady, warnings=notes)
    outcomes = tuple(_checks.evaluate(name, run, tol) for name, tol in scenario.checks.items())
    return replace(run, outcomes=outcomes, wall_time=time.perf_counter() - start)


def _residual(sys, rho):
    if isinstance(sys, DrivenSystem):
        # at phase t = 0 the lab and rotating-frame states coincide
        return float(np.linalg.norm(rhs(rotating_frame(sys), rho)))
    return float(np.linalg.norm(rhs(sys, rho)))


def _fmt(x):
    return "" if x is None else format(float(x), ".17g")


def csv_rows(traj):
    for r in traj.records:
        row = dict(t=r.t, E_A=r.E_A, E_B=r.E_B, E_AB=r.E_AB, P_A=r.P_A, P_B=r.P_B,
                   Qdot_A=r.Qdot_A, Qdot_V=r.Qdot_V, S_A=r.S_A, S_B=r.S_B, S_AB=r.S_AB,
                   dSdt_AB=r.dSdt_AB, dSdt_A=r.dSdt_A, sigma=r.sigma, sigma_A=r.sigma_A,
                   firstlaw_res_A=r.firstlaw_res_A, leak=r.leak)
        for lab in ("hot", "cold"):
            row[f"Qdot_{lab}"] = r.Qdot_k.get(lab)
            row[f"Qdot_{lab}A"] = r.Qdot_kA.get(lab)
            row[f"Qdot_{lab}V"] = r.Qdot_kV.get(lab)
        if r.E_B is None:
            row["leak"] = None
        yield [_fmt(row[c]) for c in CSV_COLUMNS]


def write_csv(traj, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        w.writerows(csv_rows(traj))


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def report_dict(run):
    s = run.scenario
    final = run.traj.records[-1].as_dict() if run.traj.records else None
    steady = None
    if run.steady is not None:
        steady = dict(run.steady["record"].as_dict(), residual=run.steady["residual"])
    outcomes = {o.name: o.as_dict() for o in run.outcomes}
    status = "fail" if run.exit_code else "pass"
    return _jsonable(dict(
        scenario=s.name, model=s.model, source=s.source, status=status, exit_code=run.exit_code,
        checks=outcomes, samples=len(run.traj), t_final=float(run.traj.times[-1]),
        final=final, steady_state=steady, sigma_min=_checks.sigma_min(run),
        carnot=_checks.carnot_summary(run), leak_max=run.traj.leak_max,
        warnings=list(run.warnings), wall_time_s=run.wall_time,
    ))


def abort_report(scenario, exc, wall_time):
    diag = getattr(exc, "diagnostic", None)
    if diag is None and getattr(exc, "residual", None) is not None:
        diag = dict(residual=exc.residual)
    return _jsonable(dict(scenario=scenario.name, model=scenario.model, source=scenario.source,
                          status="abort", exit_code=EXIT_ABORT, error=str(exc),
                          diagnostic=diag or {}, wall_time_s=wall_time))


def run(scenario, out_dir):
    """Run one scenario into ``out_dir``; returns ``(exit_code, report)``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    try:
        result = execute(scenario)
    except (IntegrationError, SteadyStateError) as exc:
        report = abort_report(scenario, exc, time.perf_counter() - start)
        _write_json(report, out / scenario.output["report"])
        return EXIT_ABORT, report
    write_csv(result.traj, out / scenario.output["csv"])
    report = report_dict(result)
    _write_json(report, out / scenario.output["report"])
    return result.exit_code, report


def _write_json(obj, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=False, allow_nan=True)
        fh.write("\n")
