"""Multipath channel synthesis and the pilot observation model.

An OFDM symbol sees an L-path channel as a frequency response
``h[n] = sum_l alpha_l * exp(-2j*pi*n*delta_f*tau_l)``. Pilots carrying a
known symbol ``beta`` on every K-th subcarrier observe ``beta * h[p*K]``.
This module samples random channels, evaluates the true response and the
pilot observation, and provides the closed-form probability that all path
delays fall inside the unambiguous recovery range ``1/(K*delta_f)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class OfdmConfig:
    """OFDM layout and pilot arrangement.

    ``pilot_count`` is derived: pilots sit at subcarriers 0, K, 2K, ... so
    P = ceil(N / K) of them fill the band.
    """

    n_subcarriers: int
    subcarrier_spacing: float
    pilot_spacing: int
    pilot_symbol: complex = 1.0 + 0.0j
    modulation_order: int = 1024

    def __post_init__(self):
        if self.n_subcarriers < 2:
            raise ValueError("n_subcarriers must be >= 2")
        if not self.subcarrier_spacing > 0:
            raise ValueError("subcarrier_spacing must be positive")
        if not 1 <= self.pilot_spacing < self.n_subcarriers:
            raise ValueError("pilot_spacing must satisfy 1 <= K < N")
        if abs(self.pilot_symbol) == 0:
            raise ValueError("pilot_symbol must be non-zero")
        m = self.modulation_order
        while m % 4 == 0:
            m //= 4
        if m != 1 or self.modulation_order < 4:
            raise ValueError("modulation_order must be a power of 4 (4, 16, 64, ...)")
        if self.pilot_count < 3:
            raise ValueError("pilot arrangement must yield at least 3 pilots")

    @property
    def pilot_count(self) -> int:
        return -(-self.n_subcarriers // self.pilot_spacing)

    @property
    def max_unambiguous_delay(self) -> float:
        """Largest delay whose pilot-to-pilot phase advance stays below a full turn."""
        return 1.0 / (self.pilot_spacing * self.subcarrier_spacing)

    def pilot_indices(self) -> np.ndarray:
        return np.arange(self.pilot_count) * self.pilot_spacing


@dataclass(frozen=True)
class DelayDistribution:
    """Exponential excess-delay law, optionally truncated at ``tau_max``."""

    rate: float
    tau_max: float = math.inf

    def __post_init__(self):
        if not self.rate > 0:
            raise ValueError("rate must be positive")
        if not self.tau_max > 0:
            raise ValueError("tau_max must be positive")

    def cdf(self, t: float) -> float:
        if t >= self.tau_max:
            return 1.0
        if t <= 0:
            return 0.0
        numerator = -math.expm1(-self.rate * t)
        if math.isinf(self.tau_max):
            return numerator
        return numerator / -math.expm1(-self.rate * self.tau_max)


@dataclass(frozen=True)
class MultipathChannel:
    """Ground-truth channel: complex path gains and pairwise-distinct delays."""

    gains: np.ndarray
    delays: np.ndarray

    def __post_init__(self):
        gains = np.atleast_1d(np.asarray(self.gains, dtype=np.complex128))
        delays = np.atleast_1d(np.asarray(self.delays, dtype=np.float64))
        if gains.ndim != 1 or delays.ndim != 1 or gains.size != delays.size:
            raise ValueError("gains and delays must be 1-d sequences of equal length")
        if gains.size < 1:
            raise ValueError("channel needs at least one path")
        if not (np.all(np.isfinite(gains)) and np.all(np.isfinite(delays))):
            raise ValueError("gains and delays must be finite")
        if np.any(delays < 0):
            raise ValueError("delays must be non-negative")
        if np.unique(delays).size != delays.size:
            raise ValueError("delays must be pairwise distinct")
        object.__setattr__(self, "gains", gains)
        object.__setattr__(self, "delays", delays)

    @property
    def path_count(self) -> int:
        return self.gains.size


def _delay_from_uniform(u, dist: DelayDistribution):
    """Inverse-CDF map from uniform [0, 1) draws to (truncated) exponential delays."""
    if math.isinf(dist.tau_max):
        return -np.log1p(-np.asarray(u)) / dist.rate
    mass = -math.expm1(-dist.rate * dist.tau_max)
    return -np.log1p(-np.asarray(u) * mass) / dist.rate


def sample_channel(rng: np.random.Generator, path_count: int, dist: DelayDistribution) -> MultipathChannel:
    """Draw a random channel: unit-variance circular complex Gaussian gains,
    i.i.d. (truncated) exponential delays.

    A delay that duplicates an already drawn one bit-exactly is redrawn, so
    the distinct-delay invariant holds without disturbing the distribution.
    """
    if path_count < 1:
        raise ValueError("path_count must be >= 1")
    gains = (rng.standard_normal(path_count) + 1j * rng.standard_normal(path_count)) / math.sqrt(2.0)
    delays = np.empty(path_count, dtype=np.float64)
    seen: set[float] = set()
    for i in range(path_count):
        tau = float(_delay_from_uniform(rng.random(), dist))
        while tau in seen:
            tau = float(_delay_from_uniform(rng.random(), dist))
        seen.add(tau)
        delays[i] = tau
    return MultipathChannel(gains, delays)


def frequency_response(gains, delays, n_subcarriers: int, subcarrier_spacing: float) -> np.ndarray:
    """Superpose per-path complex exponentials across ``n_subcarriers`` bins."""
    gains = np.asarray(gains, dtype=np.complex128)
    delays = np.asarray(delays, dtype=np.float64)
    if gains.shape != delays.shape:
        raise ValueError("gains and delays must have equal length")
    n = np.arange(n_subcarriers)
    phases = np.exp(-2j * np.pi * subcarrier_spacing * np.outer(n, delays))
    return phases @ gains


def cfr(ch: MultipathChannel, cfg: OfdmConfig) -> np.ndarray:
    """True channel frequency response over all N subcarriers."""
    return frequency_response(ch.gains, ch.delays, cfg.n_subcarriers, cfg.subcarrier_spacing)


def pilot_observation(ch: MultipathChannel, cfg: OfdmConfig) -> np.ndarray:
    """Known receive values at the pilot subcarriers: ``beta * h[p*K]``."""
    h = cfr(ch, cfg)
    return cfg.pilot_symbol * h[:: cfg.pilot_spacing][: cfg.pilot_count]


def p_free_closed_form(dist: DelayDistribution, cfg: OfdmConfig, path_count: int) -> float:
    """Probability that every path delay falls inside the unambiguous range,
    i.e. the closed-form probability of error-free full-band recovery."""
    if path_count < 1:
        raise ValueError("path_count must be >= 1")
    return dist.cdf(cfg.max_unambiguous_delay) ** path_count


def channel_to_json(ch: MultipathChannel) -> str:
    """Serialize a channel as ``{"gains": [[re, im], ...], "delays_s": [...]}``."""
    doc = {
        "gains": [[float(g.real), float(g.imag)] for g in ch.gains],
        "delays_s": [float(t) for t in ch.delays],
    }
    return json.dumps(doc, indent=2)


def channel_from_json(text: str) -> MultipathChannel:
    """Parse the JSON channel document; raises ValueError on schema violations."""
    doc = json.loads(text)
    if not isinstance(doc, dict) or "gains" not in doc or "delays_s" not in doc:
        raise ValueError('channel document must contain "gains" and "delays_s"')
    try:
        gains = np.array([complex(re, im) for re, im in doc["gains"]], dtype=np.complex128)
    except (TypeError, ValueError) as exc:
        raise ValueError('"gains" must be a list of [re, im] pairs') from exc
    delays = np.asarray(doc["delays_s"], dtype=np.float64)
    return MultipathChannel(gains, delays)
