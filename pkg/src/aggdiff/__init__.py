"""Pseudo-spectral solver for N-species nonlocal aggregation-diffusion
systems on a periodic 1D domain.

The model couples linear diffusion with advection toward (or away from)
kernel-averaged densities of all species; see :mod:`aggdiff.model`. The
public surface re-exported here covers the usual workflow: build a grid and
kernel, assemble model parameters and an initial state, integrate, classify.
"""

from ._version import __version__
from .spectral import (
    Grid,
    Field,
    SpectralField,
    forward,
    inverse,
    spectral_derivative,
    spectral_convolve,
    dealias_two_thirds,
)
from .kernels import (
    Kernel,
    von_mises,
    top_hat,
    custom_kernel,
    load_kernel,
    kernel_sigma,
    solve_param_for_sigma,
    build_kernel,
    log_bessel_i0,
)
from .model import ModelParams, State, rhs, nonlocal_average, total_mass
from .integrator import (
    IntegratorConfig,
    Monitors,
    RunResult,
    DiagnosticsSeries,
    rk4_step,
    run,
    STEADY,
    TIMED_OUT,
    BLOWUP,
)
from .diagnostics import (
    PatternReport,
    classify,
    segregation_index,
    flatness_profile,
    dispersion_relation,
    dominant_mode,
    profile_difference,
    aligned_profile_difference,
    profile_shift,
    shift_profile,
    HOMOGENEOUS,
    STATIONARY,
    OSCILLATORY,
)
from .initial import perturbed_homogeneous
from .config import SimulationConfig, parse_config, build_simulation, make_initial_condition
from .records import SimulationRecord, read_record, write_record, record_from_run
from .errors import (
    AggdiffError,
    ConfigError,
    GridMismatchError,
    IntegrationError,
    BlowupError,
    MassDriftError,
    RecordFormatError,
)

__all__ = [name for name in dir() if not name.startswith("_")]
