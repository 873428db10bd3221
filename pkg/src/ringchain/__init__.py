"""Damped, driven harmonic chain of point particles on a circle.

Direct event-handling simulation, exact spectral solutions of the gap
dynamics, closed-form continuum (damped wave) limits, hydrodynamic
fields with Euler-equation residuals, and a configuration-driven
experiment runner.
"""

from .chain import (
    ChainParams,
    ChainState,
    CollisionEvent,
    EnergyRecord,
    accelerations,
    detect_and_resolve_collisions,
    energies,
    init_from_profile,
    integrate,
    limit_velocity,
    mean_velocity_closed_form,
    run_to_relaxation,
    stability_dt,
    step,
)
from .continuum import (
    BesselEval,
    ContinuumSolution,
    bessel_I,
    bessel_solution,
    boundary_trajectory,
    dalembert_solution,
    diffeomorphism_check,
    homogeneous_field,
    inhomogeneous_wave_check,
    lagrangian_solution,
    trajectory_Y,
)
from .fields import (
    density_velocity,
    discrete_force,
    empirical_distribution,
    euler_residuals,
    limit_distribution,
    limit_force,
    pressure,
)
from .forcing import Constant, Forcing, PeriodicFourier, SpectralAtoms
from .profiles import (
    Profile,
    RegularityReport,
    deviation_bound_check,
    eval_profile,
    fluctuation_constants,
    gamma_constant,
    trig_profile,
    uniform_profile,
    x_of_z,
    z_of_x,
)
from .runner import PRESETS, ScenarioConfig, estimate_rate, load_config, run
from .spectral import (
    ModeParams,
    ModeState,
    TubeCertificate,
    dft,
    envelopes,
    evolve_modes,
    exact_gaps,
    idft,
    mode_params,
    tube_certificate,
)

__version__ = "0.1.0"
