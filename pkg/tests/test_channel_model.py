"""Channel synthesis, pilot observation, and the closed-form recovery probability."""

import cmath
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gsdsce.channel_model import (
    DelayDistribution,
    MultipathChannel,
    OfdmConfig,
    _delay_from_uniform,
    cfr,
    channel_from_json,
    channel_to_json,
    p_free_closed_form,
    pilot_observation,
    sample_channel,
)

CFG = OfdmConfig(360, 60e3, 12, 1.0 + 0.0j, 1024)


class TestOfdmConfig:
    def test_pilot_count_fills_band(self):
        assert CFG.pilot_count == 30
        assert CFG.pilot_indices()[-1] == 348

    def test_pilot_count_ceiling(self):
        cfg = OfdmConfig(10, 1e3, 3)
        assert cfg.pilot_count == 4

    def test_max_unambiguous_delay(self):
        assert CFG.max_unambiguous_delay == pytest.approx(1 / (12 * 60e3))

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(n_subcarriers=1, subcarrier_spacing=1e3, pilot_spacing=1),
            dict(n_subcarriers=16, subcarrier_spacing=0.0, pilot_spacing=4),
            dict(n_subcarriers=16, subcarrier_spacing=1e3, pilot_spacing=0),
            dict(n_subcarriers=16, subcarrier_spacing=1e3, pilot_spacing=16),
            dict(n_subcarriers=16, subcarrier_spacing=1e3, pilot_spacing=4, pilot_symbol=0j),
            dict(n_subcarriers=16, subcarrier_spacing=1e3, pilot_spacing=4, modulation_order=8),
            dict(n_subcarriers=16, subcarrier_spacing=1e3, pilot_spacing=4, modulation_order=2),
            dict(n_subcarriers=4, subcarrier_spacing=1e3, pilot_spacing=2),  # P = 2 < 3
        ],
    )
    def test_invalid_configs_rejected(self, kwargs):
        with pytest.raises(ValueError):
            OfdmConfig(**kwargs)

    @pytest.mark.parametrize("m", [4, 16, 64, 256, 1024, 4096])
    def test_valid_modulation_orders(self, m):
        OfdmConfig(360, 60e3, 12, modulation_order=m)


class TestMultipathChannel:
    def test_duplicate_delays_rejected(self):
        with pytest.raises(ValueError):
            MultipathChannel([1.0, 2.0], [1e-7, 1e-7])

    def test_negative_delay_rejected(self):
        with pytest.raises(ValueError):
            MultipathChannel([1.0], [-1e-9])

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            MultipathChannel([1.0, 2.0], [1e-7])

    def test_json_round_trip(self):
        ch = MultipathChannel([1 + 2j, -0.5j], [0.0, 3e-7])
        again = channel_from_json(channel_to_json(ch))
        assert np.array_equal(again.gains, ch.gains)
        assert np.array_equal(again.delays, ch.delays)

    def test_json_schema_shape(self):
        doc = json.loads(channel_to_json(MultipathChannel([1 + 2j], [1e-7])))
        assert doc == {"gains": [[1.0, 2.0]], "delays_s": [1e-7]}

    def test_json_missing_field_rejected(self):
        with pytest.raises(ValueError):
            channel_from_json('{"gains": [[1, 0]]}')

    def test_json_bad_gain_pairs_rejected(self):
        with pytest.raises(ValueError):
            channel_from_json('{"gains": [1.0], "delays_s": [1e-7]}')


class _ScriptedRng:
    """Minimal stand-in driving sample_channel with scripted draws."""

    def __init__(self, uniforms):
        self._uniforms = list(uniforms)

    def standard_normal(self, n):
        return np.ones(n)

    def random(self, n=None):
        if n is None:
            return self._uniforms.pop(0)
        return np.array([self._uniforms.pop(0) for _ in range(n)])


class TestSampleChannel:
    def test_inverse_cdf_endpoint(self):
        dist = DelayDistribution(rate=2e6, tau_max=1e-6)
        assert _delay_from_uniform(0.0, dist) == 0.0
        assert _delay_from_uniform(0.0, DelayDistribution(rate=2e6)) == 0.0

    def test_bounded_draws_stay_below_tau_max(self):
        dist = DelayDistribution(rate=2e6, tau_max=1e-6)
        u = np.random.default_rng(3).random(100_000)
        taus = _delay_from_uniform(u, dist)
        assert np.all(taus <= 1e-6)

    def test_unbounded_mean_matches_exponential(self):
        dist = DelayDistribution(rate=2e6)
        u = np.random.default_rng(4).random(1_000_000)
        taus = _delay_from_uniform(u, dist)
        assert abs(float(np.mean(taus)) - 5e-7) < 2e-9

    def test_gain_law_moments(self):
        rng = np.random.default_rng(5)
        gains = np.concatenate(
            [sample_channel(rng, 8, DelayDistribution(rate=2e6)).gains for _ in range(2000)]
        )
        assert float(np.mean(np.abs(gains) ** 2)) == pytest.approx(1.0, abs=0.02)
        assert float(np.var(gains.real)) == pytest.approx(0.5, abs=0.02)
        assert float(np.var(gains.imag)) == pytest.approx(0.5, abs=0.02)
        assert abs(complex(np.mean(gains))) < 0.02

    def test_bit_exact_duplicate_is_redrawn(self):
        dist = DelayDistribution(rate=2e6)
        rng = _ScriptedRng([0.25, 0.25, 0.625])
        ch = sample_channel(rng, 2, dist)
        assert ch.delays[0] != ch.delays[1]

    def test_deterministic_given_generator_seed(self):
        dist = DelayDistribution(rate=2e6)
        a = sample_channel(np.random.default_rng(9), 4, dist)
        b = sample_channel(np.random.default_rng(9), 4, dist)
        assert np.array_equal(a.gains, b.gains)
        assert np.array_equal(a.delays, b.delays)


class TestCfr:
    def test_single_path_zero_delay_is_all_ones(self):
        h = cfr(MultipathChannel([1.0 + 0j], [0.0]), CFG)
        assert np.array_equal(h, np.ones(360, dtype=complex))

    def test_single_path_unit_modulus(self):
        h = cfr(MultipathChannel([0.7 - 0.2j], [4.2e-7]), CFG)
        assert np.allclose(np.abs(h), abs(0.7 - 0.2j), atol=1e-12)

    def test_matches_per_term_summation_oracle(self):
        rng = np.random.default_rng(11)
        gains = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        delays = np.array([1.3e-7, 8.6e-7])
        h = cfr(MultipathChannel(gains, delays), CFG)
        for n in range(0, 360, 37):
            expected = sum(
                complex(g) * cmath.exp(-2j * cmath.pi * n * 60e3 * t)
                for g, t in zip(gains, delays)
            )
            # A one-ulp difference in the phase argument (|phase| can reach
            # ~100 rad) moves the value by |phase| * eps, so the achievable
            # agreement scales with the phase magnitude.
            phase_span = 2 * np.pi * n * 60e3 * delays.max()
            tol = 1e-14 * (1 + phase_span) * float(np.sum(np.abs(gains)))
            assert abs(h[n] - expected) <= tol

    def test_dc_bin_is_gain_sum(self):
        rng = np.random.default_rng(12)
        gains = rng.standard_normal(5) + 1j * rng.standard_normal(5)
        h = cfr(MultipathChannel(gains, np.linspace(1e-8, 9e-7, 5)), CFG)
        assert abs(h[0] - gains.sum()) <= 1e-14 * abs(gains.sum())


class TestPilotObservation:
    def test_matches_scaled_cfr_at_pilot_indices(self):
        cfg = OfdmConfig(360, 60e3, 12, 0.5 - 0.5j, 1024)
        ch = sample_channel(np.random.default_rng(13), 3, DelayDistribution(rate=2e6))
        s = pilot_observation(ch, cfg)
        h = cfr(ch, cfg)
        assert s.shape == (30,)
        assert np.array_equal(s, (0.5 - 0.5j) * h[::12])

    def test_single_path_is_geometric_progression(self):
        alpha, tau = 0.8 + 0.3j, 6.1e-7
        s = pilot_observation(MultipathChannel([alpha], [tau]), CFG)
        assert s[0] == pytest.approx(alpha)
        ratio = cmath.exp(-2j * cmath.pi * 12 * 60e3 * tau)
        assert np.allclose(s[1:] / s[:-1], ratio, atol=1e-12)

    def test_two_paths_sum_of_progressions(self):
        gains = np.array([1.2 - 0.1j, -0.4 + 0.9j])
        delays = np.array([2.2e-7, 1.05e-6])
        s = pilot_observation(MultipathChannel(gains, delays), CFG)
        p = np.arange(30)
        oracle = sum(
            g * np.exp(-2j * np.pi * p * 12 * 60e3 * t) for g, t in zip(gains, delays)
        )
        assert np.allclose(s, oracle, atol=1e-13 * np.max(np.abs(oracle)))

    def test_unit_pilot_spacing_prefix_of_cfr(self):
        cfg = OfdmConfig(16, 60e3, 1, 1.0 + 0.0j, 16)
        ch = MultipathChannel([1.0, 0.5j], [1e-7, 5e-7])
        assert np.array_equal(pilot_observation(ch, cfg), cfr(ch, cfg)[: cfg.pilot_count])


class TestPFree:
    def test_paper_value_four_paths(self):
        dist = DelayDistribution(rate=2e6)
        assert p_free_closed_form(dist, CFG, 4) == pytest.approx(0.77, abs=0.005)

    def test_paper_value_eight_paths(self):
        dist = DelayDistribution(rate=2e6)
        assert p_free_closed_form(dist, CFG, 8) == pytest.approx(0.59, abs=0.01)

    def test_bounded_below_wrap_limit_is_one(self):
        dist = DelayDistribution(rate=2e6, tau_max=CFG.max_unambiguous_delay)
        assert p_free_closed_form(dist, CFG, 5) == 1.0

    def test_monotone_in_path_count_and_spacing(self):
        dist = DelayDistribution(rate=2e6)
        values = [p_free_closed_form(dist, CFG, L) for L in (1, 2, 4, 8)]
        assert values == sorted(values, reverse=True)
        spacings = [
            p_free_closed_form(dist, OfdmConfig(360, 60e3, k), 4) for k in (6, 12, 24, 36)
        ]
        assert spacings == sorted(spacings, reverse=True)

    def test_monotone_in_mean_delay(self):
        values = [
            p_free_closed_form(DelayDistribution(rate=1.0 / mean), CFG, 4)
            for mean in (2e-7, 5e-7, 1e-6)
        ]
        assert values == sorted(values, reverse=True)

    def test_empirical_in_bound_fraction_matches(self):
        dist = DelayDistribution(rate=2e6)
        rng = np.random.default_rng(17)
        bound = CFG.max_unambiguous_delay
        hits = sum(
            np.all(sample_channel(rng, 4, dist).delays < bound) for _ in range(5000)
        )
        p = p_free_closed_form(dist, CFG, 4)
        sigma = math.sqrt(p * (1 - p) / 5000)
        assert abs(hits / 5000 - p) < 3 * sigma

    @given(
        rate=st.floats(5e5, 5e6, allow_nan=False),
        tau_max=st.one_of(st.just(math.inf), st.floats(1e-7, 5e-6)),
        t=st.floats(0, 4e-6),
    )
    @settings(max_examples=200, deadline=None)
    def test_cdf_is_a_cdf(self, rate, tau_max, t):
        dist = DelayDistribution(rate=rate, tau_max=tau_max)
        value = dist.cdf(t)
        assert 0.0 <= value <= 1.0
        assert dist.cdf(t + 1e-7) >= value
