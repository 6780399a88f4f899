"""Operators, Hamiltonians and thermal channels of the light-matter models.

Units are hbar = k_B = 1 and all frequencies are angular. The matter is
always subsystem A and the cavity mode subsystem B.

Two-level basis order is ``(|e>, |g>)``; three-level basis order is
``(|0>, |1>, |2>)``.
"""
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DimensionError, NotHermitianError
from .linalg import dagger, embed_A, embed_B, hermiticity_error, kron

HERMITIAN_TOL = 1e-12


@dataclass(frozen=True)
class FockSpec:
    cutoff: int
    leak_tol: float = 1e-6

    def __post_init__(self):
        if int(self.cutoff) != self.cutoff or self.cutoff < 2:
            raise ValueError(f"Fock cutoff must be an integer >= 2, got {self.cutoff}")
        if self.leak_tol <= 0:
            raise ValueError("leak_tol must be positive")


def _fock(N):
    return N if isinstance(N, FockSpec) else FockSpec(N)


def annihilation(N):
    """Truncated ladder operator with ``a[k-1, k] = sqrt(k)``."""
    N = _fock(N).cutoff
    return np.diag(np.sqrt(np.arange(1, N)), k=1).astype(complex)


def number_op(N):
    a = annihilation(N)
    return dagger(a) @ a


def matter_ops_2level():
    return {
        "sigma_plus": np.array([[0, 1], [0, 0]], dtype=complex),
        "sigma_minus": np.array([[0, 0], [1, 0]], dtype=complex),
        "sigma_e": np.array([[1, 0], [0, 0]], dtype=complex),
    }


def matter_ops_3level(omega0=0.0, omega1=0.0, omega2=0.0):
    def unit(i, j):
        M = np.zeros((3, 3), dtype=complex)
        M[i, j] = 1.0
        return M

    return {
        "sigma_21": unit(2, 1),
        "sigma_01": unit(0, 1),
        "sigma_02": unit(0, 2),
        "sigma_bar": np.diag([omega0, omega1, omega2]).astype(complex),
    }


def reservoir_temperature(delta_omega, n):
    """Temperature of a bosonic reservoir with occupation ``n`` at gap ``delta_omega``."""
    if delta_omega <= 0:
        raise ValueError(f"transition frequency must be positive, got {delta_omega}")
    if n <= 0:
        raise ValueError(f"thermal occupation must be positive, got {n}")
    return delta_omega / np.log1p(1.0 / n)


@dataclass(frozen=True, eq=False)
class ThermalChannel:
    """One reservoir coupled through the lowering operator ``jump``.

    ``omega`` is the bare transition frequency the reservoir is resonant
    with; it fixes the temperature through the occupation ``n_thermal``.
    A channel with ``n_thermal == 0`` is a zero-temperature bath and has
    ``temperature is None``.
    """

    jump: np.ndarray
    gamma: float
    n_thermal: float
    omega: float
    label: str = "other"

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError(f"decay rate must be >= 0, got {self.gamma}")
        if self.n_thermal < 0:
            raise ValueError(f"thermal occupation must be >= 0, got {self.n_thermal}")
        if self.label not in ("hot", "cold", "other"):
            raise ValueError(f"unknown reservoir label {self.label!r}")
        object.__setattr__(self, "jump", np.asarray(self.jump, dtype=complex))

    @property
    def dim(self):
        return self.jump.shape[0]

    @property
    def temperature(self):
        if self.n_thermal == 0:
            return None
        return reservoir_temperature(self.omega, self.n_thermal)

    @property
    def beta(self):
        T = self.temperature
        return None if T is None else 1.0 / T

    @cached_property
    def _ops(self):
        s = self.jump
        sd = dagger(s)
        return s, sd, sd @ s, s @ sd

    def apply(self, rho):
        return dissipator_apply(self, rho)

    def conjugated(self, U):
        """Same reservoir with the jump operator replaced by ``U^dagger jump U``."""
        return ThermalChannel(dagger(U) @ self.jump @ U, self.gamma, self.n_thermal,
                              self.omega, self.label)


def dissipator_adjoint(ch, X):
    """Heisenberg-picture dissipator: ``Tr{D[rho] X} = Tr{rho D^dagger[X]}``."""
    s, sd, sds, ssd = ch._ops
    out = (ch.n_thermal + 1.0) * (2.0 * sd @ X @ s - sds @ X - X @ sds)
    if ch.n_thermal:
        out = out + ch.n_thermal * (2.0 * s @ X @ sd - ssd @ X - X @ ssd)
    return ch.gamma * out


def dissipator_apply(ch, rho):
    """``G{(n+1)(2 s r s+ - {s+ s, r}) + n(2 s+ r s - {s s+, r})}`` for one channel."""
    if rho.shape != ch.jump.shape:
        raise DimensionError(f"state {rho.shape} does not match channel {ch.jump.shape}")
    s, sd, sds, ssd = ch._ops
    out = (ch.n_thermal + 1.0) * (2.0 * s @ rho @ sd - sds @ rho - rho @ sds)
    if ch.n_thermal:
        out = out + ch.n_thermal * (2.0 * sd @ rho @ s - ssd @ rho - rho @ ssd)
    return ch.gamma * out


def _require_hermitian(M, name):
    if hermiticity_error(M) > HERMITIAN_TOL * max(1.0, np.linalg.norm(M)):
        raise NotHermitianError(f"{name} is not Hermitian")


@dataclass(frozen=True, eq=False)
class BipartiteSystem:
    """Time-independent ``H = H_A + H_B + V_AB`` on C^m (x) C^n, all parts embedded."""

    m: int
    n: int
    H_A: np.ndarray
    H_B: np.ndarray
    V_AB: np.ndarray
    channels: tuple = ()
    fock: FockSpec = None
    name: str = "custom"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        dim = self.m * self.n
        for key in ("H_A", "H_B", "V_AB"):
            M = np.asarray(getattr(self, key), dtype=complex)
            if M.shape != (dim, dim):
                raise DimensionError(f"{key} has shape {M.shape}, expected {(dim, dim)}")
            _require_hermitian(M, key)
            object.__setattr__(self, key, M)
        object.__setattr__(self, "channels", tuple(self.channels))
        for ch in self.channels:
            if ch.dim != dim:
                raise DimensionError(f"channel {ch.label} acts on dimension {ch.dim}, expected {dim}")

    @property
    def dim(self):
        return self.m * self.n

    @cached_property
    def H(self):
        return self.H_A + self.H_B + self.V_AB

    def channel(self, label):
        for ch in self.channels:
            if ch.label == label:
                return ch
        raise KeyError(label)

    def flux_operator(self, part):
        """Per-channel ``D_k^dagger[X]`` for ``part`` in ``H_A``, ``H_B``, ``V_AB``, ``H``, cached."""
        cache = self.__dict__.setdefault("_flux_ops", {})
        if part not in cache:
            X = getattr(self, part)
            cache[part] = tuple((ch.label, dissipator_adjoint(ch, X)) for ch in self.channels)
        return cache[part]

    def leakage(self, rho):
        """Population in the top Fock level of B, or 0 when B is not a truncated mode."""
        if self.fock is None:
            return 0.0
        rB = np.einsum("iaib->ab", rho.reshape(self.m, self.n, self.m, self.n))
        return float(rB[-1, -1].real)


def build_bipartite(H_A_local, H_B_local, V_AB, channels=(), name="custom_bipartite", fock=None):
    """Escape hatch: embed local Hamiltonians and pair them with a raw coupling.

    ``channels`` entries may carry jumps on A alone (``m x m``); they are
    lifted to ``sigma (x) 1_B``.
    """
    H_A_local = np.asarray(H_A_local, dtype=complex)
    H_B_local = np.asarray(H_B_local, dtype=complex)
    m, n = H_A_local.shape[0], H_B_local.shape[0]
    lifted = []
    for ch in channels:
        if ch.dim == m and m != m * n:
            ch = ThermalChannel(embed_A(ch.jump, n), ch.gamma, ch.n_thermal, ch.omega, ch.label)
        lifted.append(ch)
    return BipartiteSystem(m, n, embed_A(H_A_local, n), embed_B(H_B_local, m), V_AB,
                           lifted, fock=fock, name=name)


def build_jcm(omega_a, omega_f, lam, N):
    """Closed Jaynes-Cummings model: two-level atom (A) and one cavity mode (B)."""
    if omega_a < 0 or omega_f < 0:
        raise ValueError("frequencies must be >= 0")
    if lam <= 0:
        raise ValueError("coupling must be > 0")
    fock = _fock(N)
    N = fock.cutoff
    ops = matter_ops_2level()
    a = annihilation(N)
    H_m = omega_a * kron(ops["sigma_e"], np.eye(N))
    H_f = omega_f * kron(np.eye(2), dagger(a) @ a)
    V = lam * (kron(ops["sigma_plus"], a) + kron(ops["sigma_minus"], dagger(a)))
    return BipartiteSystem(2, N, H_m, H_f, V, (), fock=fock, name="jcm",
                           params=dict(omega_a=omega_a, omega_f=omega_f, lam=lam, N=N))


def build_edjcm(omega0, omega1, omega2, lam, gamma_hot, gamma_cold, n_hot, n_cold, N,
                omega_f=None, enforce_resonance=True):
    """Three-level atom between a hot and a cold bath, coupled to one cavity mode.

    The hot bath drives ``|0> <-> |1>`` through ``sigma_01`` and the cold bath
    ``|0> <-> |2>`` through ``sigma_02``. The cavity mode is exchanged on the
    ``|1> -> |2>`` transition by ``sigma_21 (x) a^dagger`` so it is resonant
    when ``omega_f = omega1 - omega2``; this requires ``omega1 > omega2 > omega0``.
    """
    if not omega1 > omega2 > omega0 >= 0:
        raise ValueError(
            f"level ordering must satisfy omega1 > omega2 > omega0 >= 0, got "
            f"({omega0}, {omega1}, {omega2})"
        )
    for key, val in dict(gamma_hot=gamma_hot, gamma_cold=gamma_cold,
                         n_hot=n_hot, n_cold=n_cold).items():
        if val < 0:
            raise ValueError(f"{key} must be >= 0, got {val}")
    if lam <= 0:
        raise ValueError("coupling must be > 0")
    resonant = omega1 - omega2
    if omega_f is None:
        omega_f = resonant
    elif enforce_resonance and not np.isclose(omega_f, resonant, rtol=0, atol=1e-12):
        raise ValueError(f"omega_f = {omega_f} breaks resonance omega1 - omega2 = {resonant}")
    fock = _fock(N)
    N = fock.cutoff
    ops = matter_ops_3level(omega0, omega1, omega2)
    a = annihilation(N)
    I_f = np.eye(N)
    H_m = kron(ops["sigma_bar"], I_f)
    H_f = omega_f * kron(np.eye(3), dagger(a) @ a)
    V = lam * (kron(ops["sigma_21"], dagger(a)) + kron(dagger(ops["sigma_21"]), a))
    hot = ThermalChannel(kron(ops["sigma_01"], I_f), gamma_hot, n_hot, omega1 - omega0, "hot")
    cold = ThermalChannel(kron(ops["sigma_02"], I_f), gamma_cold, n_cold, omega2 - omega0, "cold")
    params = dict(omega0=omega0, omega1=omega1, omega2=omega2, omega_f=omega_f, lam=lam,
                  gamma_hot=gamma_hot, gamma_cold=gamma_cold, n_hot=n_hot, n_cold=n_cold, N=N)
    return BipartiteSystem(3, N, H_m, H_f, V, (hot, cold), fock=fock, name="edjcm", params=params)


EDJCM_DEFAULTS = dict(omega0=0.0, omega1=40.0, omega2=30.0, lam=1.0, gamma_hot=0.05,
                      gamma_cold=0.05, n_hot=5.0, n_cold=0.5, N=15)


def tls_channel(gamma, n_thermal, omega, label="other"):
    """Thermal channel on a bare two-level system (jump ``sigma_minus``)."""
    return ThermalChannel(matter_ops_2level()["sigma_minus"], gamma, n_thermal, omega, label)


def build_tls_bath(omega_a, gamma, n_thermal, label="hot"):
    """Two-level atom and one bath, cast as a bipartite system with a trivial B."""
    ops = matter_ops_2level()
    ch = tls_channel(gamma, n_thermal, omega_a, label)
    zero = np.zeros((2, 2), dtype=complex)
    return BipartiteSystem(2, 1, omega_a * ops["sigma_e"], zero, zero, (ch,), name="tls_bath",
                           params=dict(omega_a=omega_a, gamma=gamma, n_thermal=n_thermal))


@dataclass(frozen=True, eq=False)
class DrivenSystem:
    """``H(t) = H0 + eps (s+ e^{-i wL t} + s- e^{+i wL t})`` with thermal channels."""

    H0: np.ndarray
    epsilon: float
    omega_L: float
    sigma_plus: np.ndarray
    sigma_minus: np.ndarray
    channels: tuple = ()
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError("drive amplitude must be >= 0")
        object.__setattr__(self, "H0", np.asarray(self.H0, dtype=complex))
        _require_hermitian(self.H0, "H0")
        object.__setattr__(self, "channels", tuple(self.channels))
        for ch in self.channels:
            if ch.dim != self.dim:
                raise DimensionError("channel dimension does not match H0")

    @property
    def dim(self):
        return self.H0.shape[0]

    def V(self, t):
        ph = np.exp(-1j * self.omega_L * t)
        return self.epsilon * (self.sigma_plus * ph + self.sigma_minus * np.conj(ph))

    def dV_dt(self, t):
        ph = np.exp(-1j * self.omega_L * t)
        w = self.omega_L
        return self.epsilon * (-1j * w * self.sigma_plus * ph + 1j * w * self.sigma_minus * np.conj(ph))

    def H(self, t):
        return self.H0 + self.V(t)


def build_driven_tls(omega_a, epsilon, omega_L, channels=()):
    """Two-level atom ``H0 = omega_a sigma_e`` under a classical carrier."""
    ops = matter_ops_2level()
    return DrivenSystem(omega_a * ops["sigma_e"], epsilon, omega_L, ops["sigma_plus"],
                        ops["sigma_minus"], channels,
                        params=dict(omega_a=omega_a, epsilon=epsilon, omega_L=omega_L))
