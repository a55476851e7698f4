"""Numerical laboratory for multi-bump solutions of coupled cubic Schrodinger
systems on R^3.

The package builds radial ground states of -Dw + w = mu w^3, assembles
cylinder configurations of translated copies (bumps), evaluates the energy
functional both by direct quadrature and by closed-form asymptotic
expansions, fits the interaction coefficients of the expansion against the
quadrature oracle, and locates critical points of the reduced
finite-dimensional energy in (r, h[, rho]).
"""

from .ground_state import (
    RadialProfile,
    GroundStateError,
    solve_ground_state,
    profile_value,
    profile_moments,
    decay_fit,
    save_profile,
    load_profile,
)
from .coupling import (
    CouplingParams,
    WindowClass,
    InadmissibleCoupling,
    synchronized_amplitudes,
    classify_beta,
    analytic_constants,
)
from .geometry import (
    Family,
    BumpConfiguration,
    synchronized_config,
    segregated_config,
    sign_changing_config,
    synchronized_positions,
    segregated_positions,
    neighbor_distance,
    vertical_distance,
    cross_distance,
    sector_membership,
)
from .field import AnsatzField, ResidualNorm, eval_field, eval_laplacian, residual_norm
from .energy import (
    EnergyBreakdown,
    Potential,
    QuadratureError,
    builtin_potential,
    energy_direct,
    pair_interaction,
    potential_correction,
    cross_species_overlap,
)
from .expansion import (
    ExpansionConstants,
    PotParams,
    FitError,
    sync_expansion,
    seg_expansion,
    sign_changing_expansion,
    ring_interaction_term,
    fit_expansion_constants,
    remainder_bound,
)
from .reduced import (
    ReducedCriticalPoint,
    NoCriticalPoint,
    SolverError,
    reduced_gradient,
    reduced_energy,
    solve_newton,
    solve_contraction,
    solve_segregated,
    scaling_sweep,
    plant_sync_root,
    plant_segregated_root,
)

__version__ = "0.1.0"
