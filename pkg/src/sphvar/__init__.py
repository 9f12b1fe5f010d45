"""Generalized spherical means, q-variation and jump functionals."""
from .special import (
    BesselEvalConfig,
    DEFAULT_CONFIG,
    bessel,
    bessel_asymptotic,
    bessel_series,
    gamma,
    multiplier,
    rgamma,
    sphere_fourier,
)
from .variation import (
    SampledPath,
    VariationResult,
    dyadic_variation,
    jump_count,
    short_variation,
    sobolev_rhs,
    var_inf,
    var_norm,
)
from .means import (
    GridField,
    RadialProfile,
    RadialStep,
    ResolutionError,
    apply_mean_grid,
    ball_average_offcenter,
    banded_multiplier,
    lp_window,
    mean_radial_freq,
    mean_step_at_origin,
)
from .counterexamples import (
    ChirpSpec,
    ScalingReport,
    linfty_experiment,
    scaling_experiment,
)

__version__ = "0.1.0"
