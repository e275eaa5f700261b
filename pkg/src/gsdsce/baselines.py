"""Comparison estimators: greedy sparse recovery and spline interpolation.

Both work from the same pilot observation as the main estimator but make no
use of the geometric-progression structure. OMP matches pilots against a
dense grid of candidate delays spanning one symbol duration; cubic
interpolation simply smooths the per-pilot channel estimates across the
band.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.interpolate import CubicSpline

from .channel_model import OfdmConfig, frequency_response
from .errors import InsufficientSamplesError
from .numkit import solve_least_squares


@dataclass(frozen=True)
class OmpOptions:
    grid_size: int = 5000
    max_iterations: int = 10
    residual_threshold: float = 1e-8

    def __post_init__(self):
        if self.grid_size < 1:
            raise ValueError("grid_size must be >= 1")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.residual_threshold < 0:
            raise ValueError("residual_threshold must be non-negative")


@lru_cache(maxsize=16)
def _pilot_dictionary(pilot_count: int, pilot_spacing: int, grid_size: int) -> np.ndarray:
    """Pilot-domain atoms for delays tau_g = g / (grid_size * delta_f).

    The atom phase -2*pi*p*K*g/grid_size does not depend on delta_f, so the
    dictionary is cached on (P, K, G) only.
    """
    p = np.arange(pilot_count)[:, None]
    g = np.arange(grid_size)[None, :]
    return np.exp(-2j * np.pi * p * pilot_spacing * g / grid_size)


def omp_decompose(
    s, cfg: OfdmConfig, opts: OmpOptions
) -> tuple[np.ndarray, np.ndarray, list[float]]:
    """Greedy delay-grid decomposition of the pilot observation.

    Returns the selected grid delays (seconds), their fitted complex
    coefficients, and the relative residual norm after each iteration.
    Iteration stops at ``max_iterations``, when the relative residual drops
    below ``residual_threshold``, or when the correlation step re-selects an
    atom already in the support (stagnation).
    """
    s = np.asarray(s, dtype=np.complex128).ravel()
    if opts.grid_size < s.size:
        raise ValueError("grid_size must be at least the pilot count")
    target = s / cfg.pilot_symbol
    target_norm = float(np.linalg.norm(target))
    if target_norm == 0.0:
        return np.empty(0), np.empty(0, dtype=np.complex128), [0.0]

    atoms = _pilot_dictionary(s.size, cfg.pilot_spacing, opts.grid_size)
    atom_norm = np.sqrt(s.size)
    tau_step = 1.0 / (opts.grid_size * cfg.subcarrier_spacing)

    support: list[int] = []
    coeffs = np.empty(0, dtype=np.complex128)
    residual = target.copy()
    history: list[float] = []
    # A support larger than P cannot be refit; cap the greedy loop there.
    for _ in range(min(opts.max_iterations, s.size)):
        correlations = np.abs(atoms.conj().T @ residual) / atom_norm
        pick = int(np.argmax(correlations))
        if pick in support:
            break
        support.append(pick)
        coeffs = solve_least_squares(atoms[:, support], target)
        residual = target - atoms[:, support] @ coeffs
        history.append(float(np.linalg.norm(residual)) / target_norm)
        if history[-1] < opts.residual_threshold:
            break
    delays = np.asarray(support, dtype=np.float64) * tau_step
    return delays, coeffs, history


def omp_estimate(s, cfg: OfdmConfig, opts: OmpOptions | None = None) -> np.ndarray:
    """Full-band channel estimate from the greedy delay-grid decomposition."""
    opts = opts or OmpOptions()
    delays, coeffs, _ = omp_decompose(s, cfg, opts)
    if delays.size == 0:
        return np.zeros(cfg.n_subcarriers, dtype=np.complex128)
    return frequency_response(coeffs, delays, cfg.n_subcarriers, cfg.subcarrier_spacing)


def cubic_interp_estimate(s, cfg: OfdmConfig) -> np.ndarray:
    """Natural cubic spline through the per-pilot channel estimates.

    Real and imaginary parts are splined separately over the pilot
    subcarrier indices; subcarriers beyond the last pilot are filled by
    linear extrapolation with the spline's end slope.
    """
    s = np.asarray(s, dtype=np.complex128).ravel()
    if s.size < 4:
        raise InsufficientSamplesError(f"cubic interpolation needs at least 4 pilots, got {s.size}")
    values = s / cfg.pilot_symbol
    x = cfg.pilot_indices()[: s.size].astype(np.float64)
    n = np.arange(cfg.n_subcarriers, dtype=np.float64)

    out = np.empty(cfg.n_subcarriers, dtype=np.complex128)
    parts = []
    for component in (values.real, values.imag):
        spline = CubicSpline(x, component, bc_type="natural")
        y = spline(np.minimum(n, x[-1]))
        beyond = n > x[-1]
        if np.any(beyond):
            end_slope = float(spline(x[-1], 1))
            y[beyond] = float(spline(x[-1])) + end_slope * (n[beyond] - x[-1])
        parts.append(y)
    out.real, out.imag = parts
    return out
