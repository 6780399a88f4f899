"""
Why the maser has no useful steady state in a truncated Fock space
==================================================================

The cavity mode is undamped, so once gain exceeds zero the photon number
keeps growing. In a finite Fock space the growth stops at the cutoff: the
"steady state" piles population onto the highest retained level, where
every heat flux and the power vanish. We find the null vector of the
Liouvillian for a few cutoffs and show that the top-level population does
not shrink as N grows, so no cutoff converges. The second slowest
eigenvalue sets how long plain time stepping needs to get there.

Run: python3 demos/05_no_true_steady_state.py   (under a minute)
"""
import numpy as np

from bipartite_thermo import EDJCM_DEFAULTS, build_edjcm, heat_flux_total, power_A
from bipartite_thermo.dynamics import rhs


def liouvillian(sys):
    d = sys.dim
    cols = []
    for k in range(d * d):
        e = np.zeros(d * d, dtype=complex)
        e[k] = 1.0
        cols.append(rhs(sys, e.reshape(d, d)).ravel())
    return np.array(cols).T


print("  N   top Fock pop   <n>/N    Qdot_hot      P_A     slowest rate")
for N in (4, 6, 8, 10, 15):
    sys = build_edjcm(**dict(EDJCM_DEFAULTS, N=N))
    L = liouvillian(sys)
    vals, vecs = np.linalg.eig(L)
    order = np.argsort(np.abs(vals))
    rho = vecs[:, order[0]].reshape(sys.dim, sys.dim)
    rho = rho / np.trace(rho)
    rho = 0.5 * (rho + rho.conj().T)
    gap = -vals[order[1]].real
    n_mean = np.real(np.trace(rho @ sys.H_B)) / sys.params["omega_f"]
    print(f"{N:3d}   {sys.leakage(rho):10.4f}   {n_mean / N:6.3f}  "
          f"{heat_flux_total(sys, rho)['hot']:+.2e}  {power_A(sys, rho):+.2e}   {gap:.2e}")

t_relax = 1.0 / gap
print(f"\nAt N = 15 relaxation takes ~{t_relax:.0f} time units, ~{20 * t_relax / 1e-3:.0e} RK4 steps")
print("of dt = 1e-3 to settle to 1e-9. The fixed point sits at the cutoff for every N;")
print("the meaningful regime is the transient amplifier, see 02_edjcm_amplifier.py.")
