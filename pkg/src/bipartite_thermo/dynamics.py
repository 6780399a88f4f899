"""Master-equation time evolution, steady states and the interaction picture."""
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, IntegrationError, NotHermitianError, SteadyStateError, TruncationWarning
from .linalg import commutator, dagger, hermitian_eigen, hermiticity_error, is_valid_density
from .models import BipartiteSystem, DrivenSystem, dissipator_apply

TRACE_DRIFT_MAX = 1e-8
POSITIVITY_FLOOR = -1e-6


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed-step RK4 settings.

    ``max_phase`` bounds ``dt * ||H - c 1||_2`` (minimized over the shift
    ``c``, i.e. half the spectral spread of ``H``); it is checked against a
    concrete Hamiltonian by :meth:`check_step`.
    """

    dt: float
    t_end: float
    sample_every: int = 1
    ss_tol: float = 1e-9
    max_steps: int = 10_000_000
    max_phase: float = 0.1

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if self.t_end < 0:
            raise ValueError(f"t_end must be >= 0, got {self.t_end}")
        if int(self.sample_every) != self.sample_every or self.sample_every < 1:
            raise ValueError("sample_every must be an integer >= 1")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")

    @property
    def n_steps(self):
        return int(round(self.t_end / self.dt))

    def check_step(self, H):
        width = step_norm(H)
        if self.dt * width > self.max_phase + 1e-12:
            raise ValueError(
                f"dt * ||H|| = {self.dt * width:.4g} exceeds {self.max_phase}; "
                f"use dt <= {self.max_phase / width:.3g}"
            )


def step_norm(H):
    """Half the spectral spread of Hermitian ``H``: the norm that sets the RK4 phase per step."""
    lam = np.linalg.eigvalsh(0.5 * (H + dagger(H)))
    return 0.5 * float(lam[-1] - lam[0])


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    system: object = None
    records: tuple = ()
    leak_max: float = 0.0
    warnings: tuple = ()
    params: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.times)


def _check_dims(sys, rho):
    if rho.shape != (sys.dim, sys.dim):
        raise DimensionError(f"state shape {rho.shape} does not match system dimension {sys.dim}")


def rhs(sys, rho):
    """``-i[H, rho] + sum_k D_k[rho]`` for a time-independent system."""
    _check_dims(sys, rho)
    out = -1j * commutator(sys.H, rho)
    for ch in sys.channels:
        out = out + dissipator_apply(ch, rho)
    return out


def rhs_driven(sys, rho, t):
    _check_dims(sys, rho)
    out = -1j * commutator(sys.H(t), rho)
    for ch in sys.channels:
        out = out + dissipator_apply(ch, rho)
    return out


def _local_selection(jump, m, n):
    """``(i, j, |c|^2)`` if ``jump == c |i><j| (x) 1_n``, else ``None``."""
    local = jump.reshape(m, n, m, n)[:, 0, :, 0]
    nz = np.argwhere(local != 0)
    if len(nz) != 1 or not np.array_equal(np.kron(local, np.eye(n)), jump):
        return None
    i, j = nz[0]
    return int(i), int(j), float(abs(local[i, j]) ** 2)


def make_generator(sys):
    """Fast ``f(t, rho)`` equal to :func:`rhs` / :func:`rhs_driven` on Hermitian ``rho``.

    Uses ``rho' = -i(Y - Y^dagger) + sum_j c_j L_j rho L_j^dagger`` with
    ``Y = (H - iK) rho``, which halves the dense products; jumps of the form
    ``|i><j| (x) 1`` are applied as block copies.
    """
    dim = sys.dim
    m, n = (sys.m, sys.n) if isinstance(sys, BipartiteSystem) else (dim, 1)
    K = np.zeros((dim, dim), dtype=complex)
    dense, blocks = [], []
    for ch in sys.channels:
        if ch.gamma == 0:
            continue
        s, sd, sds, ssd = ch._ops
        terms = [(2.0 * ch.gamma * (ch.n_thermal + 1.0), s, sd)]
        K += ch.gamma * (ch.n_thermal + 1.0) * sds
        if ch.n_thermal:
            terms.append((2.0 * ch.gamma * ch.n_thermal, sd, s))
            K += ch.gamma * ch.n_thermal * ssd
        for c, L, Ld in terms:
            sel = _local_selection(L, m, n)
            if sel is None:
                dense.append((c, L, Ld))
            else:
                i, j, w = sel
                blocks.append((i, j, c * w))

    def dissipative(rho, out):
        for c, L, Ld in dense:
            out += c * (L @ rho @ Ld)
        if blocks:
            r4 = rho.reshape(m, n, m, n)
            o4 = out.reshape(m, n, m, n)
            for i, j, c in blocks:
                o4[i, :, i, :] += c * r4[j, :, j, :]
        return out

    if isinstance(sys, DrivenSystem):
        H0 = sys.H0 - 1j * K

        def f(t, rho):
            Y = (H0 + sys.V(t)) @ rho
            return dissipative(rho, -1j * (Y - dagger(Y)))
    else:
        Heff = sys.H - 1j * K

        def f(t, rho):
            Y = Heff @ rho
            return dissipative(rho, -1j * (Y - dagger(Y)))
    return f


def step_hamiltonian(sys):
    if isinstance(sys, DrivenSystem):
        return sys.H0 + sys.V(0.0)
    return sys.H


def integrate(sys, rho0, cfg, observer=None, t0=0.0):
    """Classic fixed-step RK4 from ``t0`` to ``t0 + cfg.t_end``.

    States are sampled every ``cfg.sample_every`` steps (and at the start);
    the run ends on the last sample at or before ``t0 + cfg.t_end``.
    At each sample the trace drift is checked and removed, the state is
    re-Hermitized and its smallest eigenvalue is checked. ``observer(t, rho)``
    is called on every sample; a truthy return stops the run early.
    """
    rho = np.array(rho0, dtype=complex)
    _check_dims(sys, rho)
    report = is_valid_density(rho, tol=1e-8)
    if not report.valid:
        raise IntegrationError("initial state is not a valid density matrix", vars(report))
    cfg.check_step(step_hamiltonian(sys))

    n_steps = min(cfg.n_steps, cfg.max_steps)
    n_steps -= n_steps % cfg.sample_every
    f = make_generator(sys)
    dt = cfg.dt
    fock = getattr(sys, "fock", None)
    leak_tol = fock.leak_tol if fock is not None else np.inf
    leak_of = getattr(sys, "leakage", lambda r: 0.0)

    times, states, notes = [], [], []
    leak_max = 0.0
    warned = False

    def sample(t, rho):
        nonlocal leak_max, warned
        tr = np.trace(rho).real
        drift = abs(tr - 1.0)
        if drift >= TRACE_DRIFT_MAX:
            raise IntegrationError(f"trace drift {drift:.3e} at t={t:.6g}", dict(t=t, trace_drift=drift))
        rho = 0.5 * (rho + dagger(rho)) / tr
        lam_min = np.linalg.eigvalsh(rho)[0]
        if lam_min < POSITIVITY_FLOOR:
            raise IntegrationError(f"negative eigenvalue {lam_min:.3e} at t={t:.6g}",
                                   dict(t=t, min_eigenvalue=float(lam_min)))
        leak = leak_of(rho)
        leak_max = max(leak_max, leak)
        if leak > leak_tol and not warned:
            msg = f"top Fock population {leak:.3e} exceeds {leak_tol:g} at t={t:.6g}"
            warnings.warn(msg, TruncationWarning, stacklevel=3)
            notes.append(msg)
            warned = True
        times.append(t)
        states.append(rho)
        return rho

    t = t0
    rho = sample(t, rho)
    stop = observer is not None and observer(t, rho)
    step = 0
    while not stop and step < n_steps:
        k1 = f(t, rho)
        k2 = f(t + 0.5 * dt, rho + (0.5 * dt) * k1)
        k3 = f(t + 0.5 * dt, rho + (0.5 * dt) * k2)
        k4 = f(t + dt, rho + dt * k3)
        rho = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        step += 1
        t = t0 + step * dt
        if step % cfg.sample_every == 0:
            rho = sample(t, rho)
            if observer is not None and observer(t, rho):
                stop = True

    return Trajectory(np.array(times), np.array(states), system=sys, leak_max=leak_max,
                      warnings=tuple(notes), params=dict(dt=dt, sample_every=cfg.sample_every))


def _has_dissipation(sys):
    return any(ch.gamma > 0 for ch in sys.channels)


def rotation_generator(sys):
    """Number operator ``s+ s-`` of the driven transition."""
    return sys.sigma_plus @ sys.sigma_minus


def rotating_frame(sys):
    """Time-independent system seen in the frame co-rotating with the carrier.

    With ``G = s+ s-`` and ``U = exp(-i wL G t)``, the rotated state obeys a
    master equation with ``H = H0 - wL G + eps (s+ + s-)`` and unchanged
    dissipators, provided ``[H0, G] = 0`` and every jump is lowered or
    raised by ``G``.
    """
    G = rotation_generator(sys)
    if np.linalg.norm(commutator(sys.H0, G)) > 1e-12 * max(1.0, np.linalg.norm(sys.H0)):
        raise ValueError("H0 does not commute with the drive's rotation generator")
    for ch in sys.channels:
        L = ch.jump
        c = commutator(G, L)
        if min(np.linalg.norm(c - L), np.linalg.norm(c + L)) > 1e-12:
            raise ValueError(f"channel {ch.label} is not covariant under the carrier rotation")
    H = sys.H0 - sys.omega_L * G + sys.epsilon * (sys.sigma_plus + sys.sigma_minus)
    zero = np.zeros_like(H)
    return BipartiteSystem(sys.dim, 1, H, zero, zero, sys.channels, name="rotating_frame")


def lab_state(sys, rho_rot, t):
    """Undo the carrier rotation: ``U(t) rho U(t)^dagger``."""
    G = rotation_generator(sys)
    phases = np.exp(-1j * sys.omega_L * t * np.real(np.diag(G)))
    if np.linalg.norm(G - np.diag(np.diag(G))) > 0:
        raise ValueError("rotation generator must be diagonal")
    return (phases[:, None] * rho_rot) * np.conj(phases)[None, :]


def find_steady_state(sys, rho0, cfg):
    """Integrate until ``||rhs(rho)||_F < cfg.ss_tol`` and return the state.

    For a :class:`DrivenSystem` the search runs in the carrier's rotating
    frame; the returned matrix is the lab-frame state at phase ``t = 0`` of
    the periodic steady orbit (see :func:`lab_state`).
    """
    if not _has_dissipation(sys):
        raise SteadyStateError("no dissipation, steady state not guaranteed")
    target = rotating_frame(sys) if isinstance(sys, DrivenSystem) else sys
    last = {"res": np.inf, "rho": None}

    def observer(t, rho):
        last["res"] = float(np.linalg.norm(rhs(target, rho)))
        last["rho"] = rho
        return last["res"] < cfg.ss_tol

    horizon = IntegratorConfig(cfg.dt, cfg.max_steps * cfg.dt, cfg.sample_every, cfg.ss_tol,
                               cfg.max_steps, cfg.max_phase)
    integrate(target, rho0, horizon, observer=observer)
    if not last["res"] < cfg.ss_tol:
        raise SteadyStateError(
            f"steady state not reached within {cfg.max_steps} steps "
            f"(final residual {last['res']:.3e})", residual=last["res"])
    rho = last["rho"]
    report = is_valid_density(rho, tol=1e-7)
    if not report.valid:
        raise SteadyStateError(f"converged state is not a valid density matrix: {report}",
                               residual=last["res"])
    return rho


def propagator(H0, t):
    """``exp(-i H0 t)`` built from the eigendecomposition of ``H0``."""
    eig = hermitian_eigen(H0)
    U = (eig.vectors * np.exp(-1j * eig.values * t)) @ dagger(eig.vectors)
    if np.linalg.norm(dagger(U) @ U - np.eye(len(U))) > 1e-10:
        raise RuntimeError("propagator lost unitarity")
    return U


def to_interaction_picture(X, H0, t):
    """``U0^dagger X U0`` with ``U0 = exp(-i H0 t)``."""
    if hermiticity_error(H0) > 1e-10 * max(1.0, np.linalg.norm(H0)):
        raise NotHermitianError("H0 must be Hermitian")
    U = propagator(H0, t)
    return dagger(U) @ X @ U


@dataclass(frozen=True)
class PictureReport:
    t: float
    Qdot_schrodinger: float
    P_schrodinger: float
    Qdot_interaction: float
    P_interaction: float
    Qdot_full_interaction: float
    P_full_interaction: float
    bridge: float

    @property
    def dQdot(self):
        return abs(self.Qdot_schrodinger - self.Qdot_interaction)

    @property
    def dP(self):
        return abs(self.P_schrodinger - self.P_interaction)


def verify_picture_consistency(sys, rho, t):
    """Heat flux and power from partial time derivatives in both pictures.

    The interaction-picture values transform ``rho``, ``H0``, ``V(t)``,
    ``dV/dt`` and every jump operator by ``U0 = exp(-i H0 t)``. The
    full-derivative variants in the interaction picture are also returned;
    they differ from the Schrodinger values by ``-/+ bridge`` where
    ``bridge = i Tr{rho [H0, V]}``.
    """
    H0, V, dV = sys.H0, sys.V(t), sys.dV_dt(t)
    Ld = sum((dissipator_apply(ch, rho) for ch in sys.channels), np.zeros_like(rho))
    Q_s = np.trace(Ld @ (H0 + V)).real
    P_s = np.trace(rho @ dV).real

    U = propagator(H0, t)
    Ud = dagger(U)
    rho_i, V_i, dV_i, H0_i = Ud @ rho @ U, Ud @ V @ U, Ud @ dV @ U, Ud @ H0 @ U
    H_i = H0_i + V_i
    Ld_i = sum((dissipator_apply(ch.conjugated(U), rho_i) for ch in sys.channels),
               np.zeros_like(rho))
    Q_i = np.trace(Ld_i @ H_i).real
    P_i = np.trace(rho_i @ dV_i).real

    drho_i = -1j * commutator(V_i, rho_i) + Ld_i
    dH_i = 1j * commutator(H0_i, H_i) + dV_i
    Q_full = np.trace(drho_i @ H_i).real
    P_full = np.trace(rho_i @ dH_i).real
    bridge = (1j * np.trace(rho @ commutator(H0, V))).real
    return PictureReport(t, Q_s, P_s, Q_i, P_i, Q_full, P_full, bridge)
