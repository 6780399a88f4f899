"""Energy currents (heat and power) and the entropy balance built on them.

Bipartite partitioning (dissipation acts on A only)::

    dE_A/dt = Qdot_A + P_A,   Qdot_A = Tr{L_d[rho] H_A},  P_A = -i Tr{rho [H_A, V_AB]}
    dE_B/dt = P_B,            P_B = -i Tr{rho [H_B, V_AB]}
    dE_AB/dt = sum_k Qdot_k,  Qdot_k = Tr{L_k[rho] H} = Qdot_kA + Qdot_kV

All returned fluxes are real parts; imaginary residues above
``IMAG_TOL`` raise, since they signal a non-Hermitian input.
"""
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .errors import DimensionError, InvalidStateError, UndefinedEfficiencyError
from .linalg import commutator, hermitian_eigen, partial_trace_A, partial_trace_B
from .models import DrivenSystem, dissipator_apply

IMAG_TOL = 1e-9
NEG_EIG_TOL = 1e-10


def _real_trace(M, what):
    z = np.trace(M)
    scale = max(1.0, float(np.abs(M).max(initial=0.0)))
    if abs(z.imag) > IMAG_TOL * scale:
        raise InvalidStateError(f"{what} has imaginary part {z.imag:.3e}")
    return float(z.real)


def mean_energy(rho, H):
    """``Re Tr{rho H}``."""
    if rho.shape != H.shape:
        raise DimensionError(f"state {rho.shape} and operator {H.shape} differ")
    return _real_trace(rho @ H, "<H>")


def _power(rho, H_part, V):
    if rho.shape != V.shape:
        raise DimensionError(f"state {rho.shape} does not match system {V.shape}")
    return _real_trace(-1j * rho @ commutator(H_part, V), "power")


def power_A(sys, rho):
    return _power(rho, sys.H_A, sys.V_AB)


def power_B(sys, rho):
    return _power(rho, sys.H_B, sys.V_AB)


@dataclass(frozen=True)
class Fluxes:
    """A heat flux summed over channels, with the per-channel values by label."""

    total: float
    per_channel: dict = field(default_factory=dict)

    def __getitem__(self, label):
        return self.per_channel[label]


def _channel_fluxes(sys, rho, part):
    # Tr{D_k[rho] X} evaluated as Tr{rho D_k^dagger[X]} with the adjoint image cached on sys
    if rho.shape != (sys.dim, sys.dim):
        raise DimensionError(f"state {rho.shape} does not match system dimension {sys.dim}")
    per = {}
    for label, M in sys.flux_operator(part):
        z = np.einsum("ij,ji->", rho, M)
        if abs(z.imag) > IMAG_TOL * max(1.0, float(np.abs(M).max(initial=0.0))):
            raise InvalidStateError(f"heat flux has imaginary part {z.imag:.3e}")
        per[label] = per.get(label, 0.0) + float(z.real)
    return Fluxes(sum(per.values()), per)


def heat_flux_A(sys, rho):
    return _channel_fluxes(sys, rho, "H_A")


def heat_flux_B(sys, rho):
    """Dissipative flux into H_B; identically zero when jumps act on A only."""
    return _channel_fluxes(sys, rho, "H_B")


def heat_flux_V(sys, rho):
    return _channel_fluxes(sys, rho, "V_AB")


def heat_flux_total(sys, rho):
    """``Qdot_k = Tr{L_k[rho] H}``; the total equals ``dE_AB/dt``."""
    return _channel_fluxes(sys, rho, "H")


@dataclass(frozen=True)
class UnipartiteFluxes:
    Qdot_alicki: float
    P_alicki: float
    Qdot_0: float
    P_0: float
    per_channel_alicki: dict = field(default_factory=dict)
    per_channel_0: dict = field(default_factory=dict)


def unipartite_fluxes(sys, rho, t):
    """Heat and power of a driven system under both partitionings.

    Alicki-type: ``Qdot = Tr{L_d[rho] H(t)}`` and ``P = Tr{rho dH/dt}``.
    Bare-energy: ``Qdot_0 = Tr{L_d[rho] H0}`` and ``P_0 = -i Tr{rho [H0, V(t)]}``.
    """
    if rho.shape != sys.H0.shape:
        raise DimensionError("state does not match the driven system")
    H, V = sys.H(t), sys.V(t)
    per_a, per_0 = {}, {}
    for ch in sys.channels:
        D = dissipator_apply(ch, rho)
        per_a[ch.label] = per_a.get(ch.label, 0.0) + _real_trace(D @ H, "heat flux")
        per_0[ch.label] = per_0.get(ch.label, 0.0) + _real_trace(D @ sys.H0, "heat flux")
    P = _real_trace(rho @ sys.dV_dt(t), "power")
    P0 = _real_trace(-1j * rho @ commutator(sys.H0, V), "power")
    return UnipartiteFluxes(sum(per_a.values()), P, sum(per_0.values()), P0, per_a, per_0)


def von_neumann_entropy(rho):
    """``-sum p ln p`` in nats; eigenvalues within ``-1e-10`` of zero are clamped."""
    lam = hermitian_eigen(rho).values
    if lam[0] < -NEG_EIG_TOL:
        raise InvalidStateError(f"negative eigenvalue {lam[0]:.3e}")
    lam = np.clip(lam, 0.0, 1.0)
    lam = lam[lam > 0]
    return float(-np.sum(lam * np.log(lam))) + 0.0


def _betas(channels):
    betas = {}
    for ch in channels:
        if ch.gamma == 0:
            continue
        betas[ch.label] = ch.beta
    return betas


@dataclass(frozen=True)
class EntropyProduction:
    sigma: float
    J: float


def reservoir_entropy_flow(sys, per_channel):
    """``J = -sum_k beta_k Qdot_k``; ``None`` if an active bath has zero temperature."""
    J = 0.0
    for label, beta in _betas(sys.channels).items():
        if beta is None:
            return None
        J -= beta * per_channel.get(label, 0.0)
    return J


def entropy_production_full(sys, rho, dSdt_AB):
    """``sigma = dS_AB/dt + J`` using the full-Hamiltonian heat fluxes.

    ``sigma`` and ``J`` are ``None`` when a dissipating channel has zero
    temperature.
    """
    J = reservoir_entropy_flow(sys, heat_flux_total(sys, rho).per_channel)
    if J is None:
        return EntropyProduction(None, None)
    return EntropyProduction(dSdt_AB + J, J)


@dataclass(frozen=True)
class SubsystemEntropyProduction:
    sigma_A: float
    J_A: float
    ss_conditions: bool
    delta: float


def entropy_production_A(sys, rho, dSdt_A, delta_rel=1e-3):
    """``sigma_A = dS_A/dt + J_A`` with ``J_A = -sum_k beta_k Qdot_kA``.

    ``ss_conditions`` is true when every interaction split ``|Qdot_kV|`` is
    at most ``delta_rel * max_k |Qdot_k|``. No sign is implied for sigma_A.
    """
    QA = heat_flux_A(sys, rho).per_channel
    QV = heat_flux_V(sys, rho).per_channel
    J_A = reservoir_entropy_flow(sys, QA)
    scale = max((abs(QA[k] + QV[k]) for k in QA), default=0.0)
    delta = delta_rel * scale
    ok = all(abs(v) <= delta for v in QV.values())
    if J_A is None:
        return SubsystemEntropyProduction(None, None, ok, delta)
    return SubsystemEntropyProduction(dSdt_A + J_A, J_A, ok, delta)


@dataclass(frozen=True)
class CarnotResult:
    eta: float
    bound: float
    satisfied: bool


def carnot_check(P_out, Qdot_H, T_H, T_C, slack=1e-6):
    """Efficiency ``eta = -P/Qdot_H`` of the working medium against ``1 - T_C/T_H``.

    ``P_out`` is the power *into* the working medium, so an engine has
    ``P_out < 0`` and ``eta > 0``.
    """
    if Qdot_H == 0:
        raise UndefinedEfficiencyError("hot-bath heat flux is zero")
    if not T_H >= T_C > 0:
        raise ValueError(f"need T_H >= T_C > 0, got T_H={T_H}, T_C={T_C}")
    eta = -P_out / Qdot_H
    bound = 1.0 - T_C / T_H
    return CarnotResult(eta, bound, bool(eta <= bound + slack))


def time_derivative(y, t, order=2):
    """Finite-difference ``dy/dt`` on sample times ``t``.

    ``order=2`` uses second-order central differences with second-order
    one-sided ends (any spacing). ``order=4`` needs uniform spacing and at
    least five samples and uses five-point stencils throughout.
    """
    y = np.asarray(y, dtype=float)
    t = np.asarray(t, dtype=float)
    if len(y) < 3:
        raise ValueError("need at least 3 samples for a finite-difference derivative")
    if order == 2 or len(y) < 5:
        return np.gradient(y, t, edge_order=2)
    if order != 4:
        raise ValueError("order must be 2 or 4")
    h = np.diff(t)
    if not np.allclose(h, h[0], rtol=1e-9, atol=0):
        raise ValueError("order-4 stencils need uniform sample spacing")
    h = h[0]
    d = np.empty_like(y)
    d[2:-2] = (y[:-4] - 8 * y[1:-3] + 8 * y[3:-1] - y[4:]) / (12 * h)
    d[0] = (-25 * y[0] + 48 * y[1] - 36 * y[2] + 16 * y[3] - 3 * y[4]) / (12 * h)
    d[1] = (-3 * y[0] - 10 * y[1] + 18 * y[2] - 6 * y[3] + y[4]) / (12 * h)
    d[-1] = (25 * y[-1] - 48 * y[-2] + 36 * y[-3] - 16 * y[-4] + 3 * y[-5]) / (12 * h)
    d[-2] = (3 * y[-1] + 10 * y[-2] - 18 * y[-3] + 6 * y[-4] - y[-5]) / (12 * h)
    return d


@dataclass(frozen=True)
class ThermoRecord:
    t: float
    E_A: float
    E_B: float
    E_AB: float
    E_V: float
    P_A: float
    P_B: float
    Qdot_A: float
    Qdot_V: float
    Qdot: float
    Qdot_k: dict
    Qdot_kA: dict
    Qdot_kV: dict
    S_A: float
    S_B: float
    S_AB: float
    dSdt_AB: float = None
    dSdt_A: float = None
    sigma: float = None
    sigma_A: float = None
    J: float = None
    J_A: float = None
    ss_conditions: bool = None
    firstlaw_res_A: float = None
    firstlaw_res_full: float = None
    leak: float = 0.0

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


def instantaneous_record(sys, rho, t):
    """Every quantity that needs only the state at one instant."""
    QA = heat_flux_A(sys, rho)
    QV = heat_flux_V(sys, rho)
    Qk = {k: QA[k] + QV[k] for k in QA.per_channel}
    rA = partial_trace_B(rho, sys.m, sys.n)
    rB = partial_trace_A(rho, sys.m, sys.n)
    return dict(
        t=float(t),
        E_A=mean_energy(rho, sys.H_A),
        E_B=mean_energy(rho, sys.H_B),
        E_AB=mean_energy(rho, sys.H),
        E_V=mean_energy(rho, sys.V_AB),
        P_A=power_A(sys, rho),
        P_B=power_B(sys, rho),
        Qdot_A=QA.total,
        Qdot_V=QV.total,
        Qdot=sum(Qk.values()),
        Qdot_k=Qk,
        Qdot_kA=dict(QA.per_channel),
        Qdot_kV=dict(QV.per_channel),
        S_A=von_neumann_entropy(rA),
        S_B=von_neumann_entropy(rB),
        S_AB=von_neumann_entropy(rho),
        leak=sys.leakage(rho),
    )


def first_law_residuals(traj, order=4):
    """Per-sample ``(res_A, res_full)`` from finite differences of the energies.

    ``res_A = |dE_A/dt - Qdot_A - P_A|`` and
    ``res_full = |dE_A/dt + dE_B/dt - dE_AB/dt + Qdot_V|`` with
    ``dE_AB/dt = sum_k Qdot_k``. The second identity needs resonance,
    ``P_A + P_B = 0``; otherwise it measures ``|P_A + P_B|``.
    """
    if len(traj) < 3:
        raise ValueError("first-law residuals need at least 3 samples")
    recs = traj.records or tuple(
        ThermoRecord(**instantaneous_record(traj.system, r, t)) for t, r in zip(traj.times, traj.states))
    t = traj.times
    dEA = time_derivative([r.E_A for r in recs], t, order)
    dEB = time_derivative([r.E_B for r in recs], t, order)
    QA = np.array([r.Qdot_A for r in recs])
    PA = np.array([r.P_A for r in recs])
    QV = np.array([r.Qdot_V for r in recs])
    Q = np.array([r.Qdot for r in recs])
    res_A = np.abs(dEA - QA - PA)
    res_full = np.abs(dEA + dEB - Q + QV)
    return res_A, res_full


def analyze(traj, delta_rel=1e-3, fd_order=4):
    """Attach a :class:`ThermoRecord` to every sample of a bipartite trajectory.

    Entropy rates use second-order differences; energy rates for the first
    law use ``fd_order``.
    """
    sys = traj.system
    base = [instantaneous_record(sys, r, t) for t, r in zip(traj.times, traj.states)]
    n = len(base)
    if n >= 3:
        dS_AB = time_derivative([b["S_AB"] for b in base], traj.times, 2)
        dS_A = time_derivative([b["S_A"] for b in base], traj.times, 2)
        probe = type(traj)(traj.times, traj.states, system=sys,
                           records=tuple(ThermoRecord(**b) for b in base))
        res_A, res_full = first_law_residuals(probe, order=fd_order)
    else:
        dS_AB = dS_A = res_A = res_full = [None] * n
    records = []
    for i, (b, rho) in enumerate(zip(base, traj.states)):
        extra = {}
        if dS_AB[i] is not None:
            full = entropy_production_full(sys, rho, float(dS_AB[i]))
            sub = entropy_production_A(sys, rho, float(dS_A[i]), delta_rel)
            extra = dict(dSdt_AB=float(dS_AB[i]), dSdt_A=float(dS_A[i]), sigma=full.sigma,
                         J=full.J, sigma_A=sub.sigma_A, J_A=sub.J_A,
                         ss_conditions=sub.ss_conditions, firstlaw_res_A=float(res_A[i]),
                         firstlaw_res_full=float(res_full[i]))
        records.append(ThermoRecord(**b, **extra))
    return replace(traj, records=tuple(records))


def _driven_row(sys, rho, t):
    u = unipartite_fluxes(sys, rho, t)
    S = von_neumann_entropy(rho)
    per_a, per_0 = u.per_channel_alicki, u.per_channel_0
    return dict(t=float(t), E_A=mean_energy(rho, sys.H0), E_B=None,
                E_AB=mean_energy(rho, sys.H(t)), E_V=mean_energy(rho, sys.V(t)),
                P_A=u.P_0, P_B=None, Qdot_A=u.Qdot_0, Qdot_V=u.Qdot_alicki - u.Qdot_0,
                Qdot=u.Qdot_alicki, Qdot_k=dict(per_a), Qdot_kA=dict(per_0),
                Qdot_kV={k: per_a[k] - per_0[k] for k in per_a},
                S_A=S, S_B=None, S_AB=S, leak=0.0)


def _driven_entropy(sys, row, dS, delta_rel):
    J = reservoir_entropy_flow(sys, row["Qdot_k"])
    J_A = reservoir_entropy_flow(sys, row["Qdot_kA"])
    scale = max((abs(v) for v in row["Qdot_k"].values()), default=0.0)
    ok = all(abs(v) <= delta_rel * scale for v in row["Qdot_kV"].values())
    return dict(dSdt_AB=dS, dSdt_A=dS, sigma=None if J is None else dS + J, J=J,
                sigma_A=None if J_A is None else dS + J_A, J_A=J_A, ss_conditions=ok)


def analyze_driven(traj, delta_rel=1e-3):
    """Records for a driven unipartite trajectory.

    Columns map as: ``E_A = <H0>``, ``E_AB = <H(t)>``, ``P_A = P_0``,
    ``Qdot_A = Qdot_0``, ``Qdot_V = Tr{L_d[rho] V(t)}``; entropy production
    uses the Alicki heat fluxes. Subsystem-B fields are ``None``.
    """
    sys = traj.system
    rows = [_driven_row(sys, rho, t) for t, rho in zip(traj.times, traj.states)]
    n = len(rows)
    if n >= 3:
        dS = time_derivative([r["S_AB"] for r in rows], traj.times, 2)
        dE0 = time_derivative([r["E_A"] for r in rows], traj.times, 4)
    records = []
    for i, r in enumerate(rows):
        if n >= 3:
            r.update(_driven_entropy(sys, r, float(dS[i]), delta_rel),
                     firstlaw_res_A=float(abs(dE0[i] - r["Qdot_A"] - r["P_A"])))
        records.append(ThermoRecord(**r))
    return replace(traj, records=tuple(records))


def steady_record(sys, rho, t=0.0, delta_rel=1e-3):
    """Record of a stationary state, where every entropy rate ``dS/dt`` is zero.

    For a driven system ``rho`` is the state at phase ``t`` of the periodic
    orbit.
    """
    if isinstance(sys, DrivenSystem):
        row = _driven_row(sys, rho, t)
        return ThermoRecord(**row, **_driven_entropy(sys, row, 0.0, delta_rel))
    base = instantaneous_record(sys, rho, t)
    full = entropy_production_full(sys, rho, 0.0)
    sub = entropy_production_A(sys, rho, 0.0, delta_rel)
    return ThermoRecord(**base, dSdt_AB=0.0, dSdt_A=0.0, sigma=full.sigma, J=full.J,
                        sigma_A=sub.sigma_A, J_A=sub.J_A, ss_conditions=sub.ss_conditions)
