"""Self-contained complex-valued numerical kernels.

Determinants, polynomial roots, least squares and a geometric-progression
predicate, implemented directly on complex128 numpy arrays. The matrices
this package meets are tiny (at most a few dozen rows), so the kernels
favour explicit, well-pinned algorithms over general-purpose solvers:
LU with partial pivoting for determinants, simultaneous Durand-Kerner
iteration for roots, and Householder QR for least squares.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegeneratePolynomialError,
    DimensionError,
    InsufficientSamplesError,
    RankDeficiencyError,
    RootConvergenceError,
)

# Relative tolerance defaults. The pilot model is noiseless, so these can be
# tight; they are parameters everywhere they matter so noisy extensions can
# loosen them.
EPS_GEO = 1e-6
EPS_ZERO = 1e-9

LEADING_COEFF_EPS = 1e-12
ROOT_UPDATE_TOL = 1e-13
ROOT_MAX_ITER = 500
ROOT_RESIDUAL_TOL = 1e-9
RANK_EPS = 1e-10


def _polyval(coefficients: np.ndarray, z):
    """Horner evaluation; ``coefficients`` ordered highest degree first."""
    result = np.full_like(np.asarray(z, dtype=np.complex128), coefficients[0])
    for c in coefficients[1:]:
        result = result * z + c
    return result


@dataclass(frozen=True, eq=False)
class ComplexPolynomial:
    """Polynomial with complex coefficients, highest-degree term first.

    The leading coefficient must not be negligible relative to the largest
    coefficient, otherwise the degree would be ill-defined.
    """

    coefficients: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coefficients, dtype=np.complex128))
        if c.ndim != 1 or c.size == 0:
            raise DegeneratePolynomialError("coefficients must be a non-empty 1-d sequence")
        if not np.all(np.isfinite(c)):
            raise DegeneratePolynomialError("coefficients must be finite")
        largest = np.max(np.abs(c))
        if largest == 0 or np.abs(c[0]) <= LEADING_COEFF_EPS * largest:
            raise DegeneratePolynomialError(
                "leading coefficient is negligible relative to the largest coefficient"
            )
        object.__setattr__(self, "coefficients", c)

    @property
    def degree(self) -> int:
        return self.coefficients.size - 1

    def __call__(self, z):
        return _polyval(self.coefficients, z)


def det_complex(m) -> complex:
    """Determinant of a square complex matrix.

    Computed by LU factorization with partial pivoting (pivot on the largest
    remaining magnitude), with the sign tracked across row swaps.
    """
    a = np.array(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"determinant requires a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if n < 1:
        raise DimensionError("determinant requires dimension >= 1")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")

    sign = 1.0 + 0.0j
    for k in range(n - 1):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        if a[p, k] == 0:
            return 0j
        if p != k:
            a[[k, p]] = a[[p, k]]
            sign = -sign
        factors = a[k + 1 :, k] / a[k, k]
        a[k + 1 :, k + 1 :] -= factors[:, None] * a[k, k + 1 :]
    return complex(sign * np.prod(np.diagonal(a)))


def poly_roots(p) -> np.ndarray:
    """All ``degree`` roots of a complex polynomial, with multiplicity.

    Runs the simultaneous Durand-Kerner iteration on the monic
    normalization, starting from the classic seeds ``(0.4 + 0.9j)**k``.
    Iteration stops once the largest per-root update falls below
    ``ROOT_UPDATE_TOL`` or after ``ROOT_MAX_ITER`` sweeps; the result is
    accepted only if every root has residual ``|p(root)|`` below
    ``ROOT_RESIDUAL_TOL`` times the largest coefficient magnitude.

    Raises
    ------
    DegeneratePolynomialError
        If the degree is < 1 or the leading coefficient is negligible.
    RootConvergenceError
        If the residual test fails; the error carries the best iterate.
    """
    if not isinstance(p, ComplexPolynomial):
        p = ComplexPolynomial(np.asarray(p, dtype=np.complex128))
    if p.degree < 1:
        raise DegeneratePolynomialError("root finding requires degree >= 1")

    c = p.coefficients
    monic = c / c[0]
    n = p.degree

    z = (0.4 + 0.9j) ** np.arange(n)
    for _ in range(ROOT_MAX_ITER):
        values = _polyval(monic, z)
        diffs = z[:, None] - z[None, :]
        np.fill_diagonal(diffs, 1.0)
        denom = np.prod(diffs, axis=1)
        collided = denom == 0
        if np.any(collided):
            z = z + np.where(collided, 1e-8 * (1 + 1j), 0)
            continue
        step = values / denom
        z = z - step
        if np.max(np.abs(step)) < ROOT_UPDATE_TOL:
            break

    residual = np.abs(_polyval(c, z))
    if np.any(residual >= ROOT_RESIDUAL_TOL * np.max(np.abs(c))):
        raise RootConvergenceError(
            f"root iteration left residual {residual.max():.3e} "
            f"(limit {ROOT_RESIDUAL_TOL:.1e} x largest coefficient)",
            best=z,
        )
    return z


def solve_least_squares(a, b) -> np.ndarray:
    """Minimum-norm-residual solution of an overdetermined complex system.

    Householder QR of the tall matrix ``a`` (P x L, P >= L); the system is
    rejected as rank deficient when the smallest diagonal magnitude of the
    triangular factor falls below ``RANK_EPS`` times the largest.
    """
    r = np.array(a, dtype=np.complex128)
    if r.ndim != 2:
        raise DimensionError(f"expected a 2-d system matrix, got shape {r.shape}")
    rows, cols = r.shape
    if cols < 1:
        raise DimensionError("system must have at least one unknown")
    if rows < cols:
        raise DimensionError(f"system is underdetermined: {rows} rows < {cols} unknowns")
    y = np.array(b, dtype=np.complex128).ravel()
    if y.size != rows:
        raise DimensionError(f"right-hand side has length {y.size}, expected {rows}")

    for k in range(cols):
        x = r[k:, k]
        norm = float(np.linalg.norm(x))
        if norm == 0.0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        alpha = -phase * norm
        v = x.copy()
        v[0] -= alpha
        vnorm = float(np.linalg.norm(v))
        if vnorm == 0.0:
            continue
        w = v / vnorm
        r[k:, k:] -= 2.0 * np.outer(w, w.conj() @ r[k:, k:])
        y[k:] -= 2.0 * w * (w.conj() @ y[k:])
        r[k, k] = alpha
        r[k + 1 :, k] = 0.0

    diag = np.abs(np.diagonal(r)[:cols])
    largest = float(diag.max())
    effective_rank = int(np.count_nonzero(diag > RANK_EPS * largest)) if largest > 0 else 0
    if effective_rank < cols:
        raise RankDeficiencyError(
            f"system is rank deficient: effective rank {effective_rank} of {cols}",
            effective_rank=effective_rank,
        )

    x = np.zeros(cols, dtype=np.complex128)
    for i in range(cols - 1, -1, -1):
        x[i] = (y[i] - r[i, i + 1 : cols] @ x[i + 1 :]) / r[i, i]
    return x


def geometric_dispersion(seq, eps_zero: float = EPS_ZERO) -> float:
    """Relative dispersion of consecutive ratios around the first ratio.

    Returns ``inf`` when any entry is within ``eps_zero`` (relative to the
    largest magnitude) of zero, since ratios are then meaningless.
    """
    s = np.asarray(seq, dtype=np.complex128)
    if s.ndim != 1 or s.size < 3:
        raise InsufficientSamplesError(
            f"ratio dispersion needs at least 3 samples, got {s.size}"
        )
    mags = np.abs(s)
    largest = float(mags.max())
    if largest == 0.0 or np.any(mags <= eps_zero * largest):
        return math.inf
    q = s[1:] / s[:-1]
    return float(np.max(np.abs(q - q[0])) / abs(q[0]))


def is_geometric(seq, eps_geo: float = EPS_GEO, eps_zero: float = EPS_ZERO) -> bool:
    """True iff ``seq`` is a non-zero geometric progression within tolerance.

    All entries must exceed ``eps_zero`` relative to the largest magnitude,
    and every consecutive ratio must stay within ``eps_geo`` (relative to
    the first ratio) of the first ratio.
    """
    return geometric_dispersion(seq, eps_zero) <= eps_geo
