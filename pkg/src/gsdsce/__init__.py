"""Sparse OFDM channel estimation by geometric sequence decomposition.

The pilot sequence of an L-path multipath channel, observed on equispaced
subcarriers, is a superposition of L geometric progressions. This package
recovers the progression parameters (and with them the per-path gains and
delays) from a handful of pilots, reconstructs the full-band channel
frequency response, and provides OMP and cubic-interpolation baselines plus
a seeded Monte Carlo harness and a CLI around the estimator.
"""

from .baselines import OmpOptions, cubic_interp_estimate, omp_decompose, omp_estimate
from .channel_model import (
    DelayDistribution,
    MultipathChannel,
    OfdmConfig,
    cfr,
    channel_from_json,
    channel_to_json,
    frequency_response,
    p_free_closed_form,
    pilot_observation,
    sample_channel,
)
from .errors import (
    DegenerateGeometryError,
    DegeneratePolynomialError,
    DetectionFailureError,
    DimensionError,
    EmptyAggregateError,
    EstimationPhaseError,
    GsdSceError,
    InsufficientSamplesError,
    RankDeficiencyError,
    RootConvergenceError,
    UndefinedMetricError,
)
from .estimator import (
    GsdEstimate,
    GsdOptions,
    build_vertices,
    detect_path_count,
    estimate,
    extract_channel,
    ratio_polynomial,
    reconstruct_cfr,
    simplex_volume_series,
    solve_initial_terms,
    solve_ratios,
)
from .evaluation import (
    ERROR_FREE_NMSE,
    NMSE_CDF_GRID,
    ExperimentConfig,
    TrialRecord,
    nmse,
    run_experiment,
    ser,
    spectral_efficiency,
    summarize,
    write_aggregate_csv,
    write_trial_csv,
)
from .numkit import ComplexPolynomial, det_complex, is_geometric, poly_roots, solve_least_squares

__version__ = "0.1.0"

__all__ = [
    "ComplexPolynomial",
    "DelayDistribution",
    "DegenerateGeometryError",
    "DegeneratePolynomialError",
    "DetectionFailureError",
    "DimensionError",
    "EmptyAggregateError",
    "ERROR_FREE_NMSE",
    "EstimationPhaseError",
    "ExperimentConfig",
    "GsdEstimate",
    "GsdOptions",
    "GsdSceError",
    "InsufficientSamplesError",
    "MultipathChannel",
    "NMSE_CDF_GRID",
    "OfdmConfig",
    "OmpOptions",
    "RankDeficiencyError",
    "RootConvergenceError",
    "TrialRecord",
    "UndefinedMetricError",
    "build_vertices",
    "cfr",
    "channel_from_json",
    "channel_to_json",
    "cubic_interp_estimate",
    "det_complex",
    "detect_path_count",
    "estimate",
    "extract_channel",
    "frequency_response",
    "is_geometric",
    "nmse",
    "omp_decompose",
    "omp_estimate",
    "p_free_closed_form",
    "pilot_observation",
    "poly_roots",
    "ratio_polynomial",
    "reconstruct_cfr",
    "run_experiment",
    "sample_channel",
    "ser",
    "simplex_volume_series",
    "solve_initial_terms",
    "solve_least_squares",
    "solve_ratios",
    "spectral_efficiency",
    "summarize",
    "write_aggregate_csv",
    "write_trial_csv",
    "__version__",
]
