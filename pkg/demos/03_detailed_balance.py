"""
Thermalization of a two-level atom
==================================

One atom in one bath relaxes to the Gibbs state at the bath temperature,
rho_ee = n/(2n+1). At that point no heat flows and the entropy production
vanishes; on the way it is strictly positive.

Run: python3 demos/03_detailed_balance.py
"""
import numpy as np

from bipartite_thermo import (
    IntegratorConfig, analyze, build_tls_bath, find_steady_state, heat_flux_total, integrate,
)

n = 1.0
sys = build_tls_bath(omega_a=1.0, gamma=0.1, n_thermal=n)
print(f"bath temperature T = {sys.channels[0].temperature:.4f}, Gibbs rho_ee = {n / (2 * n + 1):.6f}")

rho0 = np.diag([0.0, 1.0]).astype(complex)  # ground state
traj = analyze(integrate(sys, rho0, IntegratorConfig(dt=1e-2, t_end=10.0)))

print("\n    t    rho_ee    Qdot     sigma")
for rho, r in list(zip(traj.states, traj.records))[::200]:
    print(f"{r.t:5.1f}  {rho[0, 0].real:.5f}  {r.Qdot:+.5f}  {r.sigma:.5f}")

rho_ss = find_steady_state(sys, traj.states[-1], IntegratorConfig(dt=1e-2, t_end=10.0))
print(f"\nsteady state rho_ee = {rho_ss[0, 0].real:.9f}")
print(f"heat flux there     = {heat_flux_total(sys, rho_ss).total:+.1e}")
