"""Exception hierarchy shared across the package.

Everything raised deliberately by this package derives from
:class:`GsdSceError`, so harness code can treat estimator failures as data
(one failed trial) without masking genuine bugs.
"""

from __future__ import annotations


class GsdSceError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(GsdSceError, ValueError):
    """Array arguments have incompatible or unsupported shapes."""


class InsufficientSamplesError(GsdSceError, ValueError):
    """An operation was asked to use more samples than are available."""


class DegeneratePolynomialError(GsdSceError, ValueError):
    """Polynomial has an effectively zero leading coefficient or no degree."""


class RootConvergenceError(GsdSceError, RuntimeError):
    """Root iteration did not reach the required accuracy.

    ``best`` carries the last iterate so callers can inspect how far the
    solver got.
    """

    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best


class RankDeficiencyError(GsdSceError, ValueError):
    """Least-squares system is numerically rank deficient."""

    def __init__(self, message: str, effective_rank: int | None = None):
        super().__init__(message)
        self.effective_rank = effective_rank


class DegenerateGeometryError(GsdSceError, ValueError):
    """Leading simplex volume vanished; the assumed model order is wrong
    or two progression ratios coincide."""


class DetectionFailureError(GsdSceError, RuntimeError):
    """No tested model order produced a geometric volume series.

    ``dispersions`` maps each tested order to the relative ratio dispersion
    of its volume series (``inf`` when the series contains near-zero terms).
    """

    def __init__(self, message: str, dispersions: dict[int, float] | None = None):
        super().__init__(message)
        self.dispersions = dict(dispersions or {})


class EstimationPhaseError(GsdSceError, RuntimeError):
    """A pipeline phase failed; ``phase`` names the failing stage."""

    def __init__(self, phase: str, cause: Exception):
        super().__init__(f"estimation failed in phase {phase!r}: {cause}")
        self.phase = phase


class UndefinedMetricError(GsdSceError, ValueError):
    """Metric is undefined for the given inputs (e.g. zero-norm estimate)."""


class EmptyAggregateError(GsdSceError, ValueError):
    """Aggregation was requested over an empty record set."""
