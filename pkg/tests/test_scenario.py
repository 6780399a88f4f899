import numpy as np
import pytest

from bipartite_thermo.linalg import is_valid_density, partial_trace_A
from bipartite_thermo.models import EDJCM_DEFAULTS
from bipartite_thermo.scenario import (
    ScenarioError, bundled_scenarios, load_scenario, parse_scenario, resolve_scenario_path,
)

BASE = """
model = "{model}"
[integrator]
dt = 1e-3
t_end = 0.1
"""


def scen(model="jcm", extra=""):
    return parse_scenario(BASE.format(model=model) + extra, source="test.toml")


def test_bundled_scenarios_load():
    names = bundled_scenarios()
    assert {"edjcm_default", "jcm_resonant", "tls_single_bath"} <= set(names)
    for name in names:
        s = load_scenario(resolve_scenario_path(name))
        assert s.name == name and s.checks


def test_edjcm_default_parameters():
    s = load_scenario(resolve_scenario_path("edjcm_default"))
    for k, v in EDJCM_DEFAULTS.items():
        assert s.params[k] == v
    assert s.integrator.dt == 1e-3 and s.integrator.t_end == 20.0
    sys = s.build_system()
    assert sys.dim == 45


def test_defaults_applied():
    s = scen()
    assert s.params["N"] == 5 and s.integrator.sample_every == 1
    assert s.output == {"csv": "trajectory.csv", "report": "report.json"}
    assert s.steady_state["enabled"] is False and s.checks == {}


@pytest.mark.parametrize("text,match", [
    ("[params]\ngamma_hot = -0.1\n", "params.gamma_hot"),
    ("[params]\nN = 1\n", "params.N"),
    ("[params]\nomega1 = 30.0\nomega2 = 40.0\n", "ordering"),
    ("[params]\nwarp = 1\n", "unknown field params.warp"),
    ("[checks]\nnot_a_check = 1e-3\n", "unknown check"),
    ("[initial_state]\nkind = \"random\"\n", "seed is required"),
    ("[initial_state]\nkind = \"weird\"\n", "initial_state.kind"),
])
def test_invalid_edjcm_fields(text, match):
    with pytest.raises(ScenarioError, match=match):
        scen("edjcm", text)


def test_error_names_the_file():
    with pytest.raises(ScenarioError, match="^test.toml: "):
        scen("jcm", "[params]\nlam = 0.0\n")


def test_unknown_top_level_and_model():
    with pytest.raises(ScenarioError, match="unknown field colour"):
        parse_scenario('model = "jcm"\ncolour = 1\n[integrator]\ndt = 1e-3\nt_end = 1.0\n')
    with pytest.raises(ScenarioError, match="model must be"):
        parse_scenario('model = "ising"\n')


def test_missing_required_integrator_field():
    with pytest.raises(ScenarioError, match="integrator.dt"):
        parse_scenario('model = "jcm"\n[integrator]\nt_end = 1.0\n')


def test_parse_error_reports_position():
    with pytest.raises(ScenarioError, match=r"parse error.*line 2"):
        parse_scenario('model = "jcm"\ndt = = 3\n', source="bad.toml")


def test_missing_file(tmp_path):
    with pytest.raises(ScenarioError, match="no such"):
        load_scenario(tmp_path / "nope.toml")
    with pytest.raises(ScenarioError, match="bundled"):
        resolve_scenario_path("no_such_scenario")


def test_checks_true_uses_default_and_false_skips():
    s = scen("jcm", "[checks]\nfirst_law_A = true\nrabi_oracle = false\n")
    assert s.checks == {"first_law_A": 1e-5}


def test_product_state_with_coherent_field():
    s = scen("jcm", '[params]\nN = 30\n[initial_state]\nkind = "product"\nmatter = "g"\n'
                    'field = "coherent"\nalpha = 1.5\nalpha_imag = 0.5\n')
    sys = s.build_system()
    rho = s.initial_density(sys)
    assert is_valid_density(rho)
    rho_B = partial_trace_A(rho, sys.m, sys.n)
    n_mean = np.trace(rho_B @ np.diag(np.arange(sys.n))).real
    assert n_mean == pytest.approx(2.5, rel=1e-10)


def test_thermal_field_and_fock_bounds():
    s = scen("jcm", '[params]\nN = 40\n[initial_state]\nkind = "product"\nmatter = "e"\n'
                    'field = "thermal"\nnbar = 0.8\n')
    sys = s.build_system()
    rho_B = partial_trace_A(s.initial_density(sys), sys.m, sys.n)
    assert np.trace(rho_B @ np.diag(np.arange(sys.n))).real == pytest.approx(0.8, rel=1e-6)
    bad = scen("jcm", '[initial_state]\nkind = "product"\nmatter = "e"\nn = 5\n')
    with pytest.raises(ScenarioError, match="Fock cutoff"):
        bad.initial_density(bad.build_system())


def test_edjcm_named_levels():
    s = scen("edjcm", '[params]\nN = 3\n[initial_state]\nkind = "excited_vacuum"\n')
    sys = s.build_system()
    rho = s.initial_density(sys)
    assert rho[1 * sys.n, 1 * sys.n] == 1.0
    bad = scen("edjcm", '[params]\nN = 3\n[initial_state]\nkind = "product"\nmatter = "e"\n')
    with pytest.raises(ScenarioError, match="matter must be one of"):
        bad.initial_density(bad.build_system())


def test_random_state_is_reproducible():
    s = scen("jcm", '[initial_state]\nkind = "random"\nseed = 7\nrank = 2\n')
    sys = s.build_system()
    a, b = s.initial_density(sys), s.initial_density(sys)
    np.testing.assert_array_equal(a, b)
    assert np.linalg.matrix_rank(a, tol=1e-10) == 2


@pytest.mark.parametrize("suffix", [".npy", ".txt"])
def test_matrix_file_state(tmp_path, suffix, rng):
    from bipartite_thermo.linalg import random_density
    rho = random_density(10, rng)
    path = tmp_path / f"rho{suffix}"
    if suffix == ".npy":
        np.save(path, rho)
    else:
        np.savetxt(path, rho)
    text = BASE.format(model="jcm") + f'[initial_state]\nkind = "matrix_file"\npath = "{path.name}"\n'
    f = tmp_path / "s.toml"
    f.write_text(text)
    s = load_scenario(f)
    np.testing.assert_allclose(s.initial_density(s.build_system()), rho, atol=1e-15)


def test_matrix_file_validation(tmp_path):
    np.save(tmp_path / "small.npy", np.eye(3) / 3)
    np.save(tmp_path / "bad.npy", np.diag([1.5] + [-0.05] * 9))
    for fname, match in [("small.npy", "shape"), ("bad.npy", "valid density"), ("gone.npy", "cannot read")]:
        f = tmp_path / "s.toml"
        f.write_text(BASE.format(model="jcm") + f'[initial_state]\nkind = "matrix_file"\npath = "{fname}"\n')
        s = load_scenario(f)
        with pytest.raises(ScenarioError, match=match):
            s.initial_density(s.build_system())


def test_custom_bipartite_model():
    text = BASE.format(model="custom_bipartite") + """
[params]
H_A = [[1.0, 0.0], [0.0, 0.0]]
H_B = [[0.0, 0.0], [0.0, 1.0]]
V = [[0, 0, 0, 0], [0, 0, 0.2, 0], [0, 0.2, 0, 0], [0, 0, 0, 0]]

[[params.channels]]
jump = [[0, 0, 0, 0], [0, 0, 0, 0], [1, 0, 0, 0], [0, 1, 0, 0]]
gamma = 0.1
n_thermal = 0.5
omega = 1.0
label = "hot"
"""
    s = parse_scenario(text)
    sys = s.build_system()
    assert sys.dim == 4 and sys.channel("hot").gamma == 0.1
    rho = s.initial_density(sys)
    assert rho[0, 0] == 0 and rho[2, 2] == 1.0  # ground matter level is index 1


def test_custom_bipartite_shape_error():
    with pytest.raises(ScenarioError, match="params.V must be 2x2"):
        parse_scenario(BASE.format(model="custom_bipartite")
                       + "[params]\nH_A = [[1.0]]\nH_B = [[0.0, 0.0], [0.0, 1.0]]\nV = [[0.0]]\n")


def test_with_overrides():
    s = load_scenario(resolve_scenario_path("jcm_resonant"))
    o = s.with_overrides(dt=2e-3, t_end=1.0, checks={"first_law_A": 1e-4})
    assert o.integrator.dt == 2e-3 and o.integrator.t_end == 1.0
    assert o.integrator.sample_every == s.integrator.sample_every
    assert o.checks == {"first_law_A": 1e-4} and s.integrator.dt == 1e-3
