import csv
import json
import subprocess
import sys

import pytest

from bipartite_thermo.checks import CATALOG
from bipartite_thermo.cli import OUT_ENV, main
from bipartite_thermo.runner import CSV_COLUMNS
from bipartite_thermo.scenario import bundled_dir

SHORT = ["--t-end", "2.0"]  # past the first entropy maximum at pi/2


def read_report(d):
    return json.loads((d / "report.json").read_text())


def read_csv(d):
    with open(d / "trajectory.csv", newline="") as fh:
        return list(csv.reader(fh))


def write_scenario(tmp_path, body, name="s"):
    f = tmp_path / f"{name}.toml"
    f.write_text(body)
    return str(f)


def test_checks_list(capsys):
    assert main(["checks", "list"]) == 0
    out = capsys.readouterr().out
    names = [line.split()[0] for line in out.splitlines() if line and not line.startswith(" ")]
    assert len(names) >= 10 and len(names) == len(CATALOG)
    assert {"first_law_A", "zero_heat_to_B", "spohn_positive", "carnot_bound"} <= set(names)


def test_scenarios_list(capsys):
    assert main(["scenarios", "list"]) == 0
    assert "edjcm_default" in capsys.readouterr().out.split()


def test_simulate_pass_writes_outputs(tmp_path, capsys):
    code = main(["simulate", "jcm_resonant", "--out", str(tmp_path), *SHORT])
    assert code == 0
    rep = read_report(tmp_path)
    assert rep["status"] == "pass" and rep["exit_code"] == 0
    assert rep["checks"]["power_antisymmetry"]["outcome"] == "pass"
    rows = read_csv(tmp_path)
    assert tuple(rows[0]) == CSV_COLUMNS
    assert len(rows) - 1 == rep["samples"]
    assert "power_antisymmetry: pass" in capsys.readouterr().out


def test_csv_round_trips_17_digits(tmp_path, bundled_run):
    from bipartite_thermo.runner import write_csv
    run = bundled_run("tls_single_bath")
    write_csv(run.traj, tmp_path / "t.csv")
    with open(tmp_path / "t.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    for rec, row in zip(run.traj.records, rows):
        assert float(row["E_A"]) == rec.E_A and float(row["t"]) == rec.t
        # driven models have no field: B columns and leak are empty
        assert row["E_B"] == "" and row["S_B"] == "" and row["leak"] == ""
        assert row["Qdot_cold"] == "" and row["Qdot_hot"] != ""  # single hot bath


def test_check_failure_exit_code(tmp_path):
    body = (bundled_dir() / "jcm_resonant.toml").read_text()
    body = body.replace("first_law_A = 1e-5", "first_law_A = 0.0")
    out = tmp_path / "o"
    assert main(["simulate", write_scenario(tmp_path, body), "--out", str(out), *SHORT]) == 1
    rep = read_report(out)
    assert rep["status"] == "fail" and rep["checks"]["first_law_A"]["outcome"] == "fail"


def test_input_errors_exit_2(tmp_path, capsys):
    assert main(["simulate", str(tmp_path / "missing.toml"), "--out", str(tmp_path)]) == 2
    bad = write_scenario(tmp_path, 'model = "edjcm"\n[params]\ngamma_hot = -1.0\n'
                                   '[integrator]\ndt = 1e-3\nt_end = 1.0\n')
    assert main(["simulate", bad, "--out", str(tmp_path)]) == 2
    err = capsys.readouterr().err
    assert "params.gamma_hot" in err and "s.toml" in err
    assert main(["simulate", "jcm_resonant", "--check", "no_such_check"]) == 2
    assert main(["simulate", "jcm_resonant", "--dt", "1.0", "--out", str(tmp_path)]) == 2
    assert main(["simulate", "jcm_resonant", "--jobs", "0"]) == 2
    assert not (tmp_path / "report.json").exists()


def test_numerical_abort_exit_3(tmp_path, capsys):
    body = (bundled_dir() / "tls_single_bath.toml").read_text()
    body = body.replace("enabled = true", "enabled = true\nmax_steps = 3")
    out = tmp_path / "o"
    assert main(["simulate", write_scenario(tmp_path, body), "--out", str(out), *SHORT]) == 3
    rep = read_report(out)
    assert rep["status"] == "abort" and rep["exit_code"] == 3
    assert "residual" in rep["diagnostic"]
    assert "numerical abort" in capsys.readouterr().err


def test_check_override_and_integrator_overrides(tmp_path):
    code = main(["simulate", "jcm_resonant", "--out", str(tmp_path), "--check", "energy_conservation",
                 "--check", "first_law_A", "--dt", "2e-3", "--t-end", "0.4"])
    assert code == 0
    rep = read_report(tmp_path)
    assert list(rep["checks"]) == ["energy_conservation", "first_law_A"]
    assert rep["t_final"] == pytest.approx(0.4)
    assert rep["samples"] == 21


def test_out_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv(OUT_ENV, str(tmp_path / "env_out"))
    assert main(["simulate", "jcm_resonant", *SHORT]) == 0
    assert (tmp_path / "env_out" / "report.json").is_file()


def test_default_out_dir_without_environment(tmp_path, monkeypatch):
    monkeypatch.delenv(OUT_ENV, raising=False)
    monkeypatch.chdir(tmp_path)
    assert main(["simulate", "jcm_resonant", *SHORT]) == 0
    assert (tmp_path / "bipartite_thermo_out" / "trajectory.csv").is_file()


def test_batch_with_jobs(tmp_path):
    body = (bundled_dir() / "jcm_resonant.toml").read_text().replace("first_law_A = 1e-5", "first_law_A = 0.0")
    failing = write_scenario(tmp_path, body, name="strict")
    code = main(["simulate", "jcm_resonant", "driven_tls_offres", failing, "--jobs", "2",
                 "--out", str(tmp_path / "b"), *SHORT])
    assert code == 1  # worst exit code over the batch
    assert read_report(tmp_path / "b" / "jcm_resonant")["status"] == "pass"
    assert read_report(tmp_path / "b" / "driven_tls_offres")["checks"]["picture_consistency"]["outcome"] == "pass"
    assert read_report(tmp_path / "b" / "strict")["status"] == "fail"


def test_batch_rejects_duplicate_names(tmp_path):
    assert main(["simulate", "jcm_resonant", "jcm_resonant", "--out", str(tmp_path)]) == 2


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "bipartite_thermo", "simulate", "tls_single_bath",
                           "--out", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    rep = read_report(tmp_path)
    assert rep["checks"]["detailed_balance"]["outcome"] == "pass"
    assert rep["steady_state"]["residual"] < 1e-8


def test_bundled_edjcm_report(bundled_run):
    from bipartite_thermo.runner import report_dict
    rep = report_dict(bundled_run("edjcm_default"))
    assert rep["exit_code"] == 0
    for name in ("spohn_positive", "carnot_bound", "zero_heat_to_B", "first_law_A"):
        assert rep["checks"][name]["outcome"] == "pass"
    assert rep["carnot"]["eta"] < rep["carnot"]["bound"]
