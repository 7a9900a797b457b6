from ._internal.analytic import (
    Propagators,
    center_analytic_driven,
    center_analytic_static,
    center_analytic_static_velocity,
    damped_propagators,
    dissipative_time,
    free_arrival_time,
    width_analytic_classical,
    width_analytic_frictionless,
)
from ._internal.cli import execute, main
from ._internal.config import (
    CONFIGS_REGISTRY,
    BrownianConfig,
    CommonConfig,
    DiffractionConfig,
    EarlyArrivalsConfig,
    TunnelingConfig,
    parse_config,
)
from ._internal.dynamics import (
    WIDTH_EQUATIONS_REGISTRY,
    WidthEquation,
    WidthVariant,
    integrate_center_deterministic,
    integrate_center_langevin,
    integrate_center_langevin_ensemble,
    integrate_complex_friction_system,
    integrate_width,
    sample_thermal_velocities,
    soliton_gamma_i,
)
from ._internal.exceptions import (
    ArrivalConditionException,
    ConfigException,
    GridMismatchException,
    IntegrationAbortedException,
    InvalidParameterException,
    NonFiniteStateException,
    ScaledTrajectoriesException,
    SingularCoefficientException,
    WidthCollapseException,
)
from ._internal.experiments import (
    ExperimentResult,
    TunnelingScan,
    diffraction_density,
    first_local_maximum,
    following_local_minimum,
    refine_argmax,
    run_brownian,
    run_diffraction,
    run_early_arrivals,
    run_tunneling,
    transmission_probability,
)
from ._internal.grid import CoupledPath, Path, TimeGrid
from ._internal.models import (
    POTENTIALS_REGISTRY,
    Bath,
    ConstantPotential,
    DrivenRepeller,
    Friction,
    GaussianState,
    GaussianWindowRepeller,
    ParameterBundle,
    PotentialValue,
    QuadraticPotential,
    SystemParams,
    build_potential,
    eval_potential,
    validate_params,
)
from ._internal.rng import RandomStreams, SeedProvenance, Substream
from ._internal.specfun import ErfPair, FresnelPair, erf_family, erf_family_array, fresnel, fresnel_array
from ._internal.trajectories import (
    TrajectoryEnsemble,
    build_ensemble,
    critical_initial_position,
    crossing_transmission,
    diffusion_coefficients,
    dressing_trajectory,
    is_non_crossing,
    msd_classical_analytic,
    msd_monte_carlo,
    sample_initial_positions,
    transmitted_fraction,
    velocity_field,
)

__all__ = [
    "CONFIGS_REGISTRY",
    "POTENTIALS_REGISTRY",
    "WIDTH_EQUATIONS_REGISTRY",
    "ArrivalConditionException",
    "Bath",
    "BrownianConfig",
    "CommonConfig",
    "ConfigException",
    "ConstantPotential",
    "CoupledPath",
    "DiffractionConfig",
    "DrivenRepeller",
    "EarlyArrivalsConfig",
    "ErfPair",
    "ExperimentResult",
    "FresnelPair",
    "Friction",
    "GaussianState",
    "GaussianWindowRepeller",
    "GridMismatchException",
    "IntegrationAbortedException",
    "InvalidParameterException",
    "NonFiniteStateException",
    "ParameterBundle",
    "Path",
    "PotentialValue",
    "Propagators",
    "QuadraticPotential",
    "RandomStreams",
    "ScaledTrajectoriesException",
    "SeedProvenance",
    "SingularCoefficientException",
    "Substream",
    "SystemParams",
    "TimeGrid",
    "TrajectoryEnsemble",
    "TunnelingConfig",
    "TunnelingScan",
    "WidthCollapseException",
    "WidthEquation",
    "WidthVariant",
    "build_ensemble",
    "build_potential",
    "center_analytic_driven",
    "center_analytic_static",
    "center_analytic_static_velocity",
    "critical_initial_position",
    "crossing_transmission",
    "damped_propagators",
    "diffraction_density",
    "diffusion_coefficients",
    "dissipative_time",
    "dressing_trajectory",
    "erf_family",
    "erf_family_array",
    "eval_potential",
    "execute",
    "first_local_maximum",
    "following_local_minimum",
    "free_arrival_time",
    "fresnel",
    "fresnel_array",
    "integrate_center_deterministic",
    "integrate_center_langevin",
    "integrate_center_langevin_ensemble",
    "integrate_complex_friction_system",
    "integrate_width",
    "is_non_crossing",
    "main",
    "msd_classical_analytic",
    "msd_monte_carlo",
    "parse_config",
    "refine_argmax",
    "run_brownian",
    "run_diffraction",
    "run_early_arrivals",
    "run_tunneling",
    "sample_initial_positions",
    "sample_thermal_velocities",
    "soliton_gamma_i",
    "transmission_probability",
    "transmitted_fraction",
    "validate_params",
    "velocity_field",
    "width_analytic_classical",
    "width_analytic_frictionless",
]
