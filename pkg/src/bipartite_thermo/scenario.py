"""Scenario files: a TOML description of one simulation run.

Layout (every table except ``model`` is optional)::

    name = "edjcm_default"          # defaults to the file stem
    description = "..."
    model = "edjcm"                 # jcm | edjcm | driven_tls | custom_bipartite

    [params]                        # model parameters, see MODEL_DEFAULTS
    [initial_state]                 # kind = ground_vacuum | excited_vacuum | product | matrix_file | random
    [integrator]                    # dt, t_end, sample_every, ss_tol, max_steps, max_phase
    [steady_state]                  # enabled, max_steps
    [analysis]                      # delta_rel, fd_order
    [output]                        # csv, report (file names inside the output directory)
    [checks]                        # check_name = tolerance, or = true for the default

Unknown keys anywhere are rejected.
"""
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import tomli

from .dynamics import IntegratorConfig
from .linalg import is_valid_density, kron, random_density
from .models import (
    EDJCM_DEFAULTS, FockSpec, ThermalChannel, build_bipartite, build_driven_tls, build_edjcm,
    build_jcm, tls_channel,
)

MODELS = ("jcm", "edjcm", "driven_tls", "custom_bipartite")
REQUIRED = object()

MODEL_DEFAULTS = {
    "jcm": dict(omega_a=1.0, omega_f=1.0, lam=1.0, N=5, leak_tol=1e-6),
    "edjcm": dict(EDJCM_DEFAULTS, omega_f=None, leak_tol=1e-6),
    "driven_tls": dict(omega_a=1.0, epsilon=0.2, omega_L=1.0, gamma=0.05, n_thermal=0.5),
    "custom_bipartite": dict(H_A=REQUIRED, H_B=REQUIRED, V=REQUIRED, H_A_imag=None,
                             H_B_imag=None, V_imag=None, channels=[], leak_tol=None),
}
CHANNEL_KEYS = dict(jump=REQUIRED, jump_imag=None, gamma=REQUIRED, n_thermal=REQUIRED,
                    omega=REQUIRED, label="other")

INITIAL_KINDS = ("ground_vacuum", "excited_vacuum", "product", "matrix_file", "random")
INITIAL_KEYS = dict(kind="ground_vacuum", matter=None, field=None, n=0, nbar=0.0, alpha=0.0,
                    alpha_imag=0.0, path=None, seed=None, rank=None)
INTEGRATOR_KEYS = dict(dt=REQUIRED, t_end=REQUIRED, sample_every=1, ss_tol=1e-9,
                       max_steps=10_000_000, max_phase=0.1)
STEADY_KEYS = dict(enabled=False, max_steps=2_000_000)
ANALYSIS_KEYS = dict(delta_rel=1e-3, fd_order=4)
OUTPUT_KEYS = dict(csv="trajectory.csv", report="report.json")
TOP_KEYS = ("name", "description", "model", "params", "initial_state", "integrator",
            "steady_state", "analysis", "output", "checks")


class ScenarioError(ValueError):
    """Malformed or unphysical scenario; the message names the file and field."""


def _fill(section, table, spec, where):
    if not isinstance(table, dict):
        raise ScenarioError(f"{where}: [{section}] must be a table")
    unknown = sorted(set(table) - set(spec))
    if unknown:
        raise ScenarioError(f"{where}: unknown field {section}.{unknown[0]} "
                            f"(allowed: {', '.join(sorted(spec))})")
    out = {}
    for key, default in spec.items():
        if key in table:
            out[key] = table[key]
        elif default is REQUIRED:
            raise ScenarioError(f"{where}: missing required field {section}.{key}")
        else:
            out[key] = default
    return out


def _number(val, name, where, lo=None, strict=False, integer=False):
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ScenarioError(f"{where}: {name} must be a number, got {val!r}")
    if not math.isfinite(val):
        raise ScenarioError(f"{where}: {name} must be finite")
    if integer and int(val) != val:
        raise ScenarioError(f"{where}: {name} must be an integer, got {val!r}")
    if lo is not None and (val <= lo if strict else val < lo):
        raise ScenarioError(f"{where}: {name} must be {'>' if strict else '>='} {lo}, got {val}")
    return int(val) if integer else float(val)


def _matrix(re, im, name, where):
    try:
        M = np.array(re, dtype=float)
        if im is not None:
            M = M + 1j * np.array(im, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"{where}: {name} is not a numeric matrix ({exc})") from None
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ScenarioError(f"{where}: {name} must be a square matrix, got shape {M.shape}")
    return M.astype(complex)


@dataclass(frozen=True)
class Scenario:
    name: str
    model: str
    params: dict
    initial_state: dict
    integrator: IntegratorConfig
    steady_state: dict
    analysis: dict
    output: dict
    checks: dict
    description: str = ""
    base_dir: Path = field(default=Path("."))
    source: str = "<memory>"

    def build_system(self):
        return _build_system(self)

    def initial_density(self, system):
        return _initial_density(self, system)

    def with_overrides(self, dt=None, t_end=None, checks=None):
        """Copy with integrator or check-list overrides from the command line."""
        cfg = self.integrator
        cfg = IntegratorConfig(cfg.dt if dt is None else dt, cfg.t_end if t_end is None else t_end,
                               cfg.sample_every, cfg.ss_tol, cfg.max_steps, cfg.max_phase)
        kw = dict(vars(self))
        kw["integrator"] = cfg
        if checks is not None:
            kw["checks"] = checks
        return Scenario(**kw)


def _validate_params(model, p, where):
    w = f"{where}: params"
    if model == "jcm":
        for k in ("omega_a", "omega_f"):
            p[k] = _number(p[k], f"params.{k}", where, lo=0)
        p["lam"] = _number(p["lam"], "params.lam", where, lo=0, strict=True)
    elif model == "edjcm":
        for k in ("omega0", "omega1", "omega2"):
            p[k] = _number(p[k], f"params.{k}", where)
        for k in ("gamma_hot", "gamma_cold", "n_hot", "n_cold"):
            p[k] = _number(p[k], f"params.{k}", where, lo=0)
        p["lam"] = _number(p["lam"], "params.lam", where, lo=0, strict=True)
        if p["omega_f"] is not None:
            p["omega_f"] = _number(p["omega_f"], "params.omega_f", where, lo=0)
        if not p["omega1"] > p["omega2"] > p["omega0"] >= 0:
            raise ScenarioError(f"{w}: level ordering needs omega1 > omega2 > omega0 >= 0, got "
                                f"omega0={p['omega0']}, omega1={p['omega1']}, omega2={p['omega2']}")
    elif model == "driven_tls":
        for k in ("omega_a", "omega_L"):
            p[k] = _number(p[k], f"params.{k}", where, lo=0, strict=True)
        for k in ("epsilon", "gamma", "n_thermal"):
            p[k] = _number(p[k], f"params.{k}", where, lo=0)
    else:
        chans = []
        for i, ch in enumerate(p["channels"]):
            c = _fill(f"params.channels[{i}]", ch, CHANNEL_KEYS, where)
            for k in ("gamma", "n_thermal"):
                c[k] = _number(c[k], f"params.channels[{i}].{k}", where, lo=0)
            c["omega"] = _number(c["omega"], f"params.channels[{i}].omega", where, lo=0, strict=True)
            if c["label"] not in ("hot", "cold", "other"):
                raise ScenarioError(f"{where}: params.channels[{i}].label must be hot, cold or other")
            c["jump"] = _matrix(c["jump"], c.pop("jump_imag"), f"params.channels[{i}].jump", where)
            chans.append(c)
        p["channels"] = chans
        for k in ("H_A", "H_B", "V"):
            p[k] = _matrix(p[k], p.pop(f"{k}_imag"), f"params.{k}", where)
        m, n = len(p["H_A"]), len(p["H_B"])
        if p["V"].shape != (m * n, m * n):
            raise ScenarioError(f"{where}: params.V must be {m * n}x{m * n} for H_A {m}x{m} "
                                f"and H_B {n}x{n}")
    if "N" in p:
        N = _number(p["N"], "params.N", where, integer=True)
        if N < 2:
            raise ScenarioError(f"{where}: params.N must be >= 2 (Fock cutoff), got {N}")
        p["N"] = N
    if p.get("leak_tol") is not None:
        p["leak_tol"] = _number(p["leak_tol"], "params.leak_tol", where, lo=0, strict=True)
    return p


def parse_scenario(text, name="scenario", base_dir=".", source="<memory>"):
    """Validate a scenario given as TOML text."""
    where = source
    try:
        doc = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ScenarioError(f"{where}: parse error: {exc}") from None
    unknown = sorted(set(doc) - set(TOP_KEYS))
    if unknown:
        raise ScenarioError(f"{where}: unknown field {unknown[0]} (allowed: {', '.join(TOP_KEYS)})")
    model = doc.get("model")
    if model not in MODELS:
        raise ScenarioError(f"{where}: model must be one of {', '.join(MODELS)}, got {model!r}")

    params = _validate_params(model, _fill("params", doc.get("params", {}),
                                           MODEL_DEFAULTS[model], where), where)
    init = _fill("initial_state", doc.get("initial_state", {}), INITIAL_KEYS, where)
    if init["kind"] not in INITIAL_KINDS:
        raise ScenarioError(f"{where}: initial_state.kind must be one of {', '.join(INITIAL_KINDS)}")
    if init["kind"] == "matrix_file" and not init["path"]:
        raise ScenarioError(f"{where}: initial_state.path is required for kind = matrix_file")
    if init["kind"] == "random":
        if init["seed"] is None:
            raise ScenarioError(f"{where}: initial_state.seed is required for kind = random")
        init["seed"] = _number(init["seed"], "initial_state.seed", where, lo=0, integer=True)
    if init["kind"] == "product" and init["matter"] is None:
        raise ScenarioError(f"{where}: initial_state.matter is required for kind = product")

    ig = _fill("integrator", doc.get("integrator", {}), INTEGRATOR_KEYS, where)
    try:
        cfg = IntegratorConfig(
            dt=_number(ig["dt"], "integrator.dt", where, lo=0, strict=True),
            t_end=_number(ig["t_end"], "integrator.t_end", where, lo=0),
            sample_every=_number(ig["sample_every"], "integrator.sample_every", where, lo=1, integer=True),
            ss_tol=_number(ig["ss_tol"], "integrator.ss_tol", where, lo=0, strict=True),
            max_steps=_number(ig["max_steps"], "integrator.max_steps", where, lo=1, integer=True),
            max_phase=_number(ig["max_phase"], "integrator.max_phase", where, lo=0, strict=True),
        )
    except ValueError as exc:
        if isinstance(exc, ScenarioError):
            raise
        raise ScenarioError(f"{where}: integrator: {exc}") from None

    steady = _fill("steady_state", doc.get("steady_state", {}), STEADY_KEYS, where)
    if not isinstance(steady["enabled"], bool):
        raise ScenarioError(f"{where}: steady_state.enabled must be true or false")
    steady["max_steps"] = _number(steady["max_steps"], "steady_state.max_steps", where, lo=1, integer=True)
    analysis = _fill("analysis", doc.get("analysis", {}), ANALYSIS_KEYS, where)
    analysis["delta_rel"] = _number(analysis["delta_rel"], "analysis.delta_rel", where, lo=0)
    if analysis["fd_order"] not in (2, 4):
        raise ScenarioError(f"{where}: analysis.fd_order must be 2 or 4")
    output = _fill("output", doc.get("output", {}), OUTPUT_KEYS, where)

    from .checks import CATALOG
    checks = {}
    for cname, tol in doc.get("checks", {}).items():
        if cname not in CATALOG:
            raise ScenarioError(f"{where}: unknown check checks.{cname}")
        if tol is True:
            tol = CATALOG[cname].default_tol
        elif tol is False:
            continue
        checks[cname] = _number(tol, f"checks.{cname}", where, lo=0)

    scen = Scenario(name=str(doc.get("name", name)), model=model, params=params, initial_state=init,
                    integrator=cfg, steady_state=steady, analysis=analysis, output=output,
                    checks=checks, description=str(doc.get("description", "")),
                    base_dir=Path(base_dir), source=source)
    try:
        scen.build_system()
    except ValueError as exc:
        raise ScenarioError(f"{where}: params: {exc}") from None
    return scen


def load_scenario(path):
    """Read and validate a scenario file."""
    path = Path(path)
    if not path.is_file():
        raise ScenarioError(f"{path}: no such scenario file")
    return parse_scenario(path.read_text(encoding="utf-8"), name=path.stem,
                          base_dir=path.parent, source=str(path))


def bundled_dir():
    return Path(__file__).with_name("scenarios")


def bundled_scenarios():
    return sorted(p.stem for p in bundled_dir().glob("*.toml"))


def resolve_scenario_path(arg):
    """A path to a scenario file, or the name of a bundled scenario."""
    path = Path(arg)
    if path.is_file():
        return path
    bundled = bundled_dir() / f"{arg}.toml"
    if bundled.is_file():
        return bundled
    raise ScenarioError(f"{arg}: no such scenario file or bundled scenario "
                        f"(bundled: {', '.join(bundled_scenarios())})")


def _build_system(s):
    p = s.params
    if s.model == "jcm":
        sys = build_jcm(p["omega_a"], p["omega_f"], p["lam"], p["N"])
    elif s.model == "edjcm":
        kw = {k: p[k] for k in EDJCM_DEFAULTS}
        sys = build_edjcm(**kw, omega_f=p["omega_f"])
    elif s.model == "driven_tls":
        chans = ()
        if p["gamma"] > 0:
            chans = (tls_channel(p["gamma"], p["n_thermal"], p["omega_a"], "hot"),)
        return build_driven_tls(p["omega_a"], p["epsilon"], p["omega_L"], chans)
    else:
        chans = [ThermalChannel(c["jump"], c["gamma"], c["n_thermal"], c["omega"], c["label"])
                 for c in p["channels"]]
        fock = FockSpec(len(p["H_B"]), p["leak_tol"]) if p["leak_tol"] is not None else None
        return build_bipartite(p["H_A"], p["H_B"], p["V"], chans, fock=fock)
    if p.get("leak_tol") is not None and sys.fock is not None:
        object.__setattr__(sys, "fock", FockSpec(sys.fock.cutoff, p["leak_tol"]))
    return sys


def _pure(psi):
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def _matter_state(s, m):
    """Named matter level as a density matrix on C^m."""
    key = s.initial_state["matter"]
    if s.model in ("jcm", "driven_tls"):
        names = {"e": 0, "g": 1}
    elif s.model == "edjcm":
        names = {"0": 0, "1": 1, "2": 2, "ground": 0}
    else:
        names = {str(i): i for i in range(m)}
    key = str(key)
    if key not in names:
        raise ScenarioError(f"{s.source}: initial_state.matter must be one of "
                            f"{', '.join(sorted(names))}, got {key!r}")
    psi = np.zeros(m)
    psi[names[key]] = 1.0
    return _pure(psi)


def _field_state(s, N):
    st = s.initial_state
    kind = st["field"] or "fock"
    where = s.source
    if kind == "fock":
        k = _number(st["n"], "initial_state.n", where, lo=0, integer=True)
        if k >= N:
            raise ScenarioError(f"{where}: initial_state.n = {k} is outside the Fock cutoff N = {N}")
        psi = np.zeros(N)
        psi[k] = 1.0
        return _pure(psi)
    if kind == "thermal":
        nbar = _number(st["nbar"], "initial_state.nbar", where, lo=0)
        if nbar == 0:
            p = np.eye(N)[0]
        else:
            p = (nbar / (1.0 + nbar)) ** np.arange(N)
        return np.diag(p / p.sum()).astype(complex)
    if kind == "coherent":
        alpha = complex(_number(st["alpha"], "initial_state.alpha", where),
                        _number(st["alpha_imag"], "initial_state.alpha_imag", where))
        k = np.arange(N)
        logfact = np.array([math.lgamma(j + 1) for j in k])
        amp = np.exp(-0.5 * abs(alpha) ** 2 - 0.5 * logfact) * alpha ** k
        return _pure(amp / np.linalg.norm(amp))
    raise ScenarioError(f"{where}: initial_state.field must be fock, thermal or coherent")


def _initial_density(s, sys):
    st = s.initial_state
    kind = st["kind"]
    dim = sys.dim
    bipartite = s.model != "driven_tls"
    m, n = (sys.m, sys.n) if bipartite else (dim, 1)
    if kind in ("ground_vacuum", "excited_vacuum"):
        if s.model in ("jcm", "driven_tls"):
            level = 1 if kind == "ground_vacuum" else 0
        elif s.model == "edjcm":
            level = 0 if kind == "ground_vacuum" else 1
        else:
            E = np.real(np.diag(sys.H_A.reshape(m, n, m, n)[:, 0, :, 0]))
            level = int(np.argmin(E) if kind == "ground_vacuum" else np.argmax(E))
        psi = np.zeros(dim)
        psi[level * n] = 1.0
        return _pure(psi)
    if kind == "product":
        rho_m = _matter_state(s, m)
        if not bipartite:
            if st["field"] is not None:
                raise ScenarioError(f"{s.source}: initial_state.field given for a model without a field")
            return rho_m
        return kron(rho_m, _field_state(s, n))
    if kind == "random":
        rank = st["rank"]
        if rank is not None:
            rank = _number(rank, "initial_state.rank", s.source, lo=1, integer=True)
        return random_density(dim, np.random.default_rng(st["seed"]), rank)
    path = (s.base_dir / st["path"])
    try:
        rho = np.load(path) if path.suffix == ".npy" else np.loadtxt(path, dtype=complex)
    except (OSError, ValueError) as exc:
        raise ScenarioError(f"{s.source}: initial_state.path: cannot read {path} ({exc})") from None
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (dim, dim):
        raise ScenarioError(f"{s.source}: initial_state.path: matrix has shape {rho.shape}, "
                            f"expected {(dim, dim)}")
    report = is_valid_density(rho, tol=1e-8)
    if not report.valid:
        raise ScenarioError(f"{s.source}: initial_state.path: not a valid density matrix ({report})")
    return rho
