"""Fourier multipliers built from measures: symbols, torus and radial operators, experiments."""

from .errors import AccuracyError, ConfigError, DimensionMismatchError, DivergenceError, DomainError
from .special_functions import (
    dai_ditzian_j,
    gauss_legendre,
    mehler_average,
    one_minus_dai_ditzian_j,
    one_minus_j_mehler,
    one_minus_j_series,
    one_minus_vl,
    spherical_bessel_j,
    unit_sphere_measures,
    vl_coefficients,
    vl_trig,
)
from .multipliers import (
    EquivalenceScan,
    Multiplier,
    box_surface,
    compose_binomial,
    compose_dai_ditzian,
    compose_power,
    cube_surface,
    ksigma_scan,
    make_multiplier,
    polytope_symbol,
)
from .torus import (
    Spectrum,
    apply_torus_multiplier,
    difference_spectrum,
    lp_norm_torus,
    omega_modulus,
    pick_lhs,
    power_spectrum,
    random_spectrum,
    shell_partial_sums,
    single_mode,
    spectral_min_lhs,
    tail_sum,
)
from .radial import (
    RadialProfile,
    ShellTransform,
    integrability_partial,
    lp_norm_radial,
    make_ball_indicator,
    make_gaussian_profile,
    make_titchmarsh_profile,
    modulus_sphere_mean,
    radial_fourier,
    spherical_mean_radial,
    titchmarsh_fourier,
)
from .harness import (
    ExperimentConfig,
    ExperimentReport,
    beta_range,
    config_from_dict,
    judge,
    run_experiment,
    slope_fit,
)

__version__ = "0.1.0"
