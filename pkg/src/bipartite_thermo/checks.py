"""Named verification checks evaluated on a finished run.

Each check returns ``pass``, ``fail`` or ``not_applicable`` together with
the measured value it compared against its tolerance.
"""
from dataclasses import dataclass

import numpy as np

from .errors import UndefinedEfficiencyError
from .linalg import commutator
from .models import DrivenSystem
from .thermo import carnot_check, heat_flux_B

PASS, FAIL, NA = "pass", "fail", "not_applicable"
# |Qdot_hot| / omega_hot below this counts as zero heat
EFFICIENCY_FLOOR = 1e-12


@dataclass(frozen=True)
class CheckSpec:
    name: str
    formula: str
    default_tol: float
    description: str


@dataclass(frozen=True)
class CheckOutcome:
    name: str
    outcome: str
    value: float = None
    tol: float = None
    detail: str = ""

    def as_dict(self):
        return dict(outcome=self.outcome, value=self.value, tol=self.tol, detail=self.detail)


_SPECS = [
    CheckSpec("first_law_A", "dE_A/dt = Qdot_A + P_A", 1e-5,
              "max finite-difference residual of the subsystem-A first law over samples"),
    CheckSpec("first_law_full", "dE_A/dt + dE_B/dt = sum_k Qdot_k - Qdot_V", 1e-5,
              "max residual of the summed-energy balance; needs a resonant coupling"),
    CheckSpec("zero_heat_to_B", "Tr{D_k[rho] H_B} = 0", 1e-12,
              "max heat any channel delivers to the undamped subsystem B"),
    CheckSpec("power_antisymmetry", "P_A + P_B = 0", 1e-10,
              "max |P_A + P_B|; needs [H_A + H_B, V_AB] = 0"),
    CheckSpec("energy_conservation", "E_AB(t) = E_AB(0)", 1e-8,
              "max drift of the total energy of a closed system"),
    CheckSpec("spectrum_conservation", "eig(rho(t)) = eig(rho(0))", 1e-7,
              "max drift of the density-matrix eigenvalues of a closed system"),
    CheckSpec("closed_entropy_rate", "sigma = dS_AB/dt = 0", 1e-6,
              "max |sigma| of a closed system"),
    CheckSpec("spohn_positive", "sigma = dS_AB/dt - sum_k Qdot_k/T_k >= 0", 1e-8,
              "min sigma over samples must be >= -tol"),
    CheckSpec("subsystem_entropy_signed", "sigma_A = dS_A/dt - sum_k Qdot_kA/T_k < 0 somewhere", 1e-3,
              "min sigma_A must drop below -tol: the subsystem rate has no fixed sign"),
    CheckSpec("carnot_bound", "eta = -P_A/Qdot_hot <= 1 - T_cold/T_hot", 1e-6,
              "efficiency at the steady state, or at the last sample when none was computed"),
    CheckSpec("steady_state_second_law", "sigma_A^ss = J_A = J > 0", 1e-2,
              "at the steady state: ss conditions hold, |sigma_A - J|/J < tol and J > 0"),
    CheckSpec("steady_energy_balance", "Qdot_A + P_A = 0 at the steady state", 1e-6,
              "energy balance of A (or of H0 for a driven system) at the fixed point"),
    CheckSpec("detailed_balance", "rho_ee = n/(2n+1)", 1e-6,
              "thermal population of an undriven two-level system at its fixed point"),
    CheckSpec("optical_bloch", "w = w0 (1 + D^2/G2^2) / (1 + D^2/G2^2 + W^2/(G1 G2))", 1e-5,
              "steady excited population of a driven damped two-level system"),
    CheckSpec("picture_consistency", "Qdot, P equal in Schrodinger and interaction pictures", 1e-8,
              "max |dQdot|, |dP| over 20 sample times"),
    CheckSpec("rabi_oracle", "P_e(t) = cos^2(lam t)", 1e-6,
              "vacuum Rabi oscillation of the resonant closed model from |e,0>"),
    CheckSpec("fock_truncation", "rho_B[N-1, N-1] <= leak_tol", 1e-6,
              "peak population of the highest retained photon number"),
]
CATALOG = {s.name: s for s in _SPECS}


def list_checks():
    return list(_SPECS)


def _col(records, key):
    return np.array([getattr(r, key) for r in records], dtype=float)


def _closed(run):
    return not any(ch.gamma > 0 for ch in run.system.channels)


def _driven(run):
    return isinstance(run.system, DrivenSystem)


def _resonant(sys):
    c = commutator(sys.H_A + sys.H_B, sys.V_AB)
    return np.linalg.norm(c) <= 1e-10 * max(1.0, np.linalg.norm(sys.V_AB))


def _upper(value, tol):
    return PASS if value <= tol else FAIL


def _first_law_A(run, tol):
    recs = run.traj.records
    if len(recs) < 5 or recs[0].firstlaw_res_A is None:
        return NA, None, "fewer than 5 samples"
    v = float(_col(recs, "firstlaw_res_A").max())
    return _upper(v, tol), v, ""


def _first_law_full(run, tol):
    if _driven(run) or not _resonant(run.system):
        return NA, None, "needs a time-independent resonant coupling"
    recs = run.traj.records
    if len(recs) < 5:
        return NA, None, "fewer than 5 samples"
    v = float(_col(recs, "firstlaw_res_full").max())
    return _upper(v, tol), v, ""


def _zero_heat_B(run, tol):
    if _driven(run) or not run.system.channels:
        return NA, None, "no thermal channels on a bipartite system"
    v = max(abs(q) for rho in run.traj.states
            for q in heat_flux_B(run.system, rho).per_channel.values())
    return _upper(v, tol), float(v), ""


def _power_antisym(run, tol):
    if _driven(run) or not _resonant(run.system):
        return NA, None, "needs [H_A + H_B, V_AB] = 0"
    recs = run.traj.records
    v = float(np.max(np.abs(_col(recs, "P_A") + _col(recs, "P_B"))))
    return _upper(v, tol), v, ""


def _energy_cons(run, tol):
    if _driven(run) or not _closed(run):
        return NA, None, "system is not closed"
    E = _col(run.traj.records, "E_AB")
    v = float(np.max(np.abs(E - E[0])))
    return _upper(v, tol), v, ""


def _spectrum_cons(run, tol):
    if not _closed(run):
        return NA, None, "system is not closed"
    lam = np.array([np.linalg.eigvalsh(r) for r in run.traj.states])
    v = float(np.max(np.abs(lam - lam[0])))
    return _upper(v, tol), v, ""


def _closed_entropy(run, tol):
    if not _closed(run):
        return NA, None, "system is not closed"
    recs = run.traj.records
    if recs[0].sigma is None:
        return NA, None, "sigma undefined"
    v = float(np.max(np.abs(_col(recs, "sigma"))))
    return _upper(v, tol), v, ""


def _sigma_min(run):
    recs = run.traj.records
    if not recs or any(r.sigma is None for r in recs):
        return None
    return float(_col(recs, "sigma").min())


def _spohn(run, tol):
    v = _sigma_min(run)
    if v is None:
        return NA, None, "sigma undefined (too few samples or a zero-temperature bath)"
    return (PASS if v >= -tol else FAIL), v, "minimum over samples"


def _sigma_A_signed(run, tol):
    recs = run.traj.records
    if _driven(run) or not recs or any(r.sigma_A is None for r in recs):
        return NA, None, "sigma_A undefined"
    v = float(_col(recs, "sigma_A").min())
    return (PASS if v < -tol else FAIL), v, "minimum over samples"


def carnot_summary(run):
    """Efficiency, bound and where they were evaluated; ``None`` if undefined."""
    sys = run.system
    labels = {ch.label: ch for ch in sys.channels if ch.gamma > 0}
    if "hot" not in labels or "cold" not in labels:
        return None
    T_H, T_C = labels["hot"].temperature, labels["cold"].temperature
    if T_H is None or T_C is None:
        return None
    if run.steady is not None:
        rec, where = run.steady["record"], "steady_state"
    else:
        rec, where = run.traj.records[-1], f"last_sample(t={run.traj.times[-1]:.6g})"
    Q_H = rec.Qdot_k["hot"]
    try:
        if abs(Q_H) <= EFFICIENCY_FLOOR * labels["hot"].omega:
            raise UndefinedEfficiencyError("hot-bath heat flux vanishes")
        res = carnot_check(rec.P_A, Q_H, T_H, T_C)
    except UndefinedEfficiencyError:
        return dict(eta=None, bound=1.0 - T_C / T_H, satisfied=None, evaluated_at=where,
                    T_hot=T_H, T_cold=T_C, Qdot_hot=rec.Qdot_k["hot"], P_A=rec.P_A)
    return dict(eta=res.eta, bound=res.bound, satisfied=res.satisfied, evaluated_at=where,
                T_hot=T_H, T_cold=T_C, Qdot_hot=rec.Qdot_k["hot"], P_A=rec.P_A)


def _carnot(run, tol):
    c = carnot_summary(run)
    if c is None:
        return NA, None, "needs active hot and cold baths at finite temperature"
    if c["eta"] is None:
        return NA, None, f"hot-bath heat flux is zero at {c['evaluated_at']}"
    ok = c["eta"] <= c["bound"] + tol
    return (PASS if ok else FAIL), c["eta"], f"bound {c['bound']:.6g} at {c['evaluated_at']}"


def _ss_second_law(run, tol):
    if run.steady is None:
        return NA, None, "no steady state computed"
    rec = run.steady["record"]
    if rec.J is None or rec.sigma_A is None:
        return NA, None, "entropy flow undefined"
    if not rec.J > 0:
        return FAIL, rec.J, f"J = {rec.J:.3e} is not positive"
    rel = abs(rec.sigma_A - rec.J) / rec.J
    ok = bool(rec.ss_conditions) and rel < tol
    return (PASS if ok else FAIL), rel, f"J = {rec.J:.6g}, ss_conditions = {rec.ss_conditions}"


def _ss_energy(run, tol):
    if run.steady is None:
        return NA, None, "no steady state computed"
    rec = run.steady["record"]
    v = abs(rec.Qdot_A + rec.P_A)
    return _upper(v, tol), v, ""


def _single_tls(run):
    sys = run.system
    return (_driven(run) and sys.dim == 2 and len(sys.channels) == 1
            and sys.channels[0].gamma > 0)


def _detailed_balance(run, tol):
    if run.steady is None or not _single_tls(run) or run.system.epsilon != 0:
        return NA, None, "needs the steady state of an undriven two-level system with one bath"
    n = run.system.channels[0].n_thermal
    v = abs(run.steady["rho"][0, 0].real - n / (2 * n + 1))
    return _upper(v, tol), v, ""


def bloch_population(sys):
    """Analytic steady ``rho_ee`` of a driven damped two-level system."""
    ch = sys.channels[0]
    g_dn = 2 * ch.gamma * (ch.n_thermal + 1)
    g_up = 2 * ch.gamma * ch.n_thermal
    G1 = g_up + g_dn
    G2 = G1 / 2
    w0 = (g_up - g_dn) / G1
    W = 2 * sys.epsilon
    D = sys.params["omega_a"] - sys.omega_L
    x = (D / G2) ** 2
    w = w0 * (1 + x) / (1 + x + W ** 2 / (G1 * G2))
    return 0.5 * (1 + w)


def _optical_bloch(run, tol):
    if run.steady is None or not _single_tls(run):
        return NA, None, "needs the steady state of a driven two-level system with one bath"
    v = abs(run.steady["rho"][0, 0].real - bloch_population(run.system))
    return _upper(v, tol), v, ""


def _picture(run, tol):
    if not _driven(run):
        return NA, None, "needs a driven system"
    from .dynamics import verify_picture_consistency
    idx = np.unique(np.linspace(0, len(run.traj) - 1, 20).round().astype(int))
    reps = [verify_picture_consistency(run.system, run.traj.states[i], run.traj.times[i])
            for i in idx]
    v = max(max(r.dQdot, r.dP) for r in reps)
    bridge = max(abs(r.bridge) for r in reps)
    return _upper(v, tol), float(v), f"max |bridge| = {bridge:.6g}"


def _rabi(run, tol):
    s = run.scenario
    ok = (s.model == "jcm" and s.initial_state["kind"] == "excited_vacuum"
          and s.params["omega_a"] == s.params["omega_f"])
    if not ok:
        return NA, None, "needs the resonant closed model started in |e,0>"
    sys = run.system
    lam = s.params["lam"]
    Pe = np.array([np.einsum("iaja->ij", r.reshape(2, sys.n, 2, sys.n))[0, 0].real
                   for r in run.traj.states])
    v = float(np.max(np.abs(Pe - np.cos(lam * run.traj.times) ** 2)))
    return _upper(v, tol), v, ""


def _fock(run, tol):
    if getattr(run.system, "fock", None) is None:
        return NA, None, "no truncated mode"
    v = float(run.traj.leak_max)
    return _upper(v, tol), v, ""


_EVAL = dict(
    first_law_A=_first_law_A, first_law_full=_first_law_full, zero_heat_to_B=_zero_heat_B,
    power_antisymmetry=_power_antisym, energy_conservation=_energy_cons,
    spectrum_conservation=_spectrum_cons, closed_entropy_rate=_closed_entropy,
    spohn_positive=_spohn, subsystem_entropy_signed=_sigma_A_signed, carnot_bound=_carnot,
    steady_state_second_law=_ss_second_law, steady_energy_balance=_ss_energy,
    detailed_balance=_detailed_balance, optical_bloch=_optical_bloch,
    picture_consistency=_picture, rabi_oracle=_rabi, fock_truncation=_fock,
)


def evaluate(name, run, tol=None):
    tol = CATALOG[name].default_tol if tol is None else tol
    outcome, value, detail = _EVAL[name](run, tol)
    return CheckOutcome(name, outcome, None if value is None else float(value), tol, detail)


def sigma_min(run):
    return _sigma_min(run)
