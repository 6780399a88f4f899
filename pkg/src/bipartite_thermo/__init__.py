"""Thermodynamics of open bipartite quantum systems.

Lindblad dynamics of matter (subsystem A) coupled to a cavity mode
(subsystem B), split into heat and power currents and checked against the
laws of thermodynamics. Units are hbar = k_B = 1.
"""
from .dynamics import (
    IntegratorConfig, Trajectory, find_steady_state, integrate, lab_state, propagator,
    rhs, rhs_driven, rotating_frame, to_interaction_picture, verify_picture_consistency,
)
from .errors import (
    DimensionError, IntegrationError, InvalidStateError, NotHermitianError, SteadyStateError,
    TruncationWarning, UndefinedEfficiencyError,
)
from .linalg import (
    commutator, dagger, embed_A, embed_B, hermitian_eigen, is_valid_density, jacobi_eigh, kron,
    partial_trace_A, partial_trace_B,
)
from .models import (
    EDJCM_DEFAULTS, BipartiteSystem, DrivenSystem, FockSpec, ThermalChannel, annihilation,
    build_bipartite, build_driven_tls, build_edjcm, build_jcm, build_tls_bath,
    reservoir_temperature, tls_channel,
)
from .thermo import (
    ThermoRecord, analyze, analyze_driven, carnot_check, entropy_production_A,
    entropy_production_full, heat_flux_A, heat_flux_B, heat_flux_total, heat_flux_V,
    instantaneous_record, mean_energy, power_A, power_B, steady_record, unipartite_fluxes,
    von_neumann_entropy,
)

__version__ = "0.1.0"
