"""aggflow: pseudo-spectral aggregation-diffusion experiments on the torus."""

__version__ = "0.1.0"

from .spectral import (  # noqa: F401
    Field,
    Grid,
    MultiplierConvention,
    SpectralField,
    apply_lambda,
    dealias,
    divergence,
    forward,
    gradient,
    inverse,
    make_grid,
    sobolev_norm,
)
from .lp import LPBump, commutator_check, lp_norm_equivalence, lp_project  # noqa: F401
from .kernels import KernelSpec, apply_kernel, build_ks_kernel, build_power_kernel  # noqa: F401
from .flows import FlowSpec, VelocityField, advect_term, build_flow  # noqa: F401
from .dynamics import (  # noqa: F401
    Outcome,
    RunRecord,
    SolverConfig,
    find_threshold_amplitude,
    rhs_nonlinear,
    run_linear,
    run_nonlinear,
    run_transport,
    step,
)
from .diagnostics import annular_mass, criticality_report, second_moment  # noqa: F401
from .initial import InitialSpec  # noqa: F401
from .harness import make_initial_data, run_experiment  # noqa: F401
from .config import ConfigError, ExperimentConfig, load_config, parse_config  # noqa: F401
