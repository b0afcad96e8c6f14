import numpy as np
import pytest

from bicm_jed.channel import (
    LOS,
    RBF,
    SIMO,
    ChannelRealization,
    apply_channel,
    canonical_mode,
    sample_channel,
    snr_to_n0,
)
from bicm_jed.errors import ConfigError, DomainError
from bicm_jed.harness import rng as rngs

from conftest import crandn


class TestSnr:
    @pytest.mark.parametrize("snr,n0", [(0.0, 1.0), (10.0, 0.1), (-3.0, 1.9952623149688795)])
    def test_values(self, snr, n0):
        assert snr_to_n0(snr) == pytest.approx(n0, rel=1e-12)

    def test_non_finite(self):
        with pytest.raises(DomainError):
            snr_to_n0(float("nan"))


class TestSample:
    def test_pure_los_simo(self, rng):
        r = sample_channel(SIMO, 1.0, 1, 8, rng)
        assert np.allclose(np.abs(r.h), 1.0, atol=1e-15)

    def test_rayleigh_power(self, rng):
        h = sample_channel(SIMO, 0.0, 1, 10**6, rng).h
        assert 0.99 <= np.mean(np.abs(h) ** 2) <= 1.01

    def test_half_ricean_moments(self, rng):
        h = sample_channel(SIMO, 0.5, 1, 10**6, rng).h
        assert abs(np.mean(h)) <= 0.01
        assert 0.99 <= np.mean(np.abs(h) ** 2) <= 1.01

    @pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75])
    def test_power_split(self, rng, alpha):
        r = sample_channel(SIMO, alpha, 1, 10**6, rng)
        los = np.sqrt(alpha) * np.exp(1j * r.theta)
        diffuse = r.h - los
        ratio = np.mean(np.abs(los) ** 2) / np.mean(np.abs(diffuse) ** 2)
        assert ratio == pytest.approx(alpha / (1 - alpha), rel=0.03)

    def test_rbf_shape_and_power(self, rng):
        h = sample_channel(RBF, 0.0, 2, 3, rng).h
        assert h.shape == (2, 3)
        big = sample_channel(RBF, 0.0, 2, 10**5, rng).h
        assert np.mean(np.abs(big) ** 2) == pytest.approx(1.0, abs=0.01)

    def test_los_mimo(self, rng):
        r = sample_channel(LOS, 1.0, 2, 4, rng)
        assert r.h.shape == (2, 4) and np.allclose(np.abs(r.h), 1.0)

    def test_los_needs_two_tx(self, rng):
        with pytest.raises(ConfigError):
            sample_channel(LOS, 1.0, 1, 4, rng)

    def test_alpha_range(self, rng):
        with pytest.raises(DomainError):
            sample_channel(SIMO, 1.5, 1, 4, rng)

    def test_aliases(self):
        assert canonical_mode("los") == LOS and canonical_mode("Rayleigh") == RBF
        with pytest.raises(ConfigError):
            canonical_mode("doppler")


class TestApply:
    def test_noise_free_identity(self, rng):
        x = crandn(rng, 1, 48)
        y = apply_channel(x, ChannelRealization(SIMO, np.ones((1, 1))), 0.0, rng)
        assert np.array_equal(y, x)

    def test_noise_variance(self, rng):
        n0 = 0.37
        y = apply_channel(np.zeros((1, 10**5)), ChannelRealization(SIMO, np.ones((1, 1))), n0, rng)
        assert np.var(y) == pytest.approx(n0, rel=0.02)

    def test_los_phase_algebra(self, rng):
        x = crandn(rng, 2, 48)
        theta = np.array([[0.0, 0.0], [np.pi, np.pi]])
        y = apply_channel(x, ChannelRealization(LOS, np.exp(1j * theta), 1.0, theta), 0.0, rng)
        assert np.allclose(y[0], x[0] - x[1], atol=1e-15)

    def test_block_fading_constant(self, rng):
        x = np.ones((1, 48), complex)
        h = np.array([[0.3 - 0.8j, 1.1j]])
        y = apply_channel(x, ChannelRealization(SIMO, h), 0.0, rng)
        assert np.all(y[:, 0] == y[:, -1])

    def test_noise_whiteness(self, rng):
        y = apply_channel(np.zeros((1, 10**5)), ChannelRealization(SIMO, np.ones((1, 2))), 1.0, rng)
        corr = np.abs(np.mean(y[0] * np.conj(y[1])))
        assert corr < 0.01

    def test_antenna_mismatch(self, rng):
        with pytest.raises(ConfigError):
            apply_channel(np.zeros((2, 4)), ChannelRealization(SIMO, np.ones((1, 1))), 1.0, rng)


class TestStreams:
    def test_reproducible(self):
        a = rngs.stream(1, 2, 3, rngs.NOISE).standard_normal(5)
        b = rngs.stream(1, 2, 3, rngs.NOISE).standard_normal(5)
        assert np.array_equal(a, b)

    def test_streams_distinct(self):
        draws = {
            tuple(rngs.stream(s, p, t, k).integers(0, 2**62, 2))
            for s in (0, 1)
            for p in (0, 1)
            for t in (0, 1, 2)
            for k in (0, 1, 2)
        }
        assert len(draws) == 2 * 2 * 3 * 3

    def test_order_independent(self):
        fwd = [rngs.trial_streams(5, 0, t)[1].standard_normal() for t in range(10)]
        rev = [rngs.trial_streams(5, 0, t)[1].standard_normal() for t in reversed(range(10))]
        assert fwd == rev[::-1]
