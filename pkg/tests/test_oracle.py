import math

import numpy as np
import pytest

from bicm_jed.detector import EXACT_LOG, MAX_LOG, SIMO_JED, ReceiverSpec, llr_noncoherent_simo, window_metric_table
from bicm_jed.errors import DomainError
from bicm_jed.numerics import log_bessel_i0
from bicm_jed.oracle import (
    QuadratureSpec,
    exhaustive_ml,
    llrs_from_scores,
    los_closed_form,
    quad_likelihood_mimo_los,
    quad_likelihood_simo,
)

from conftest import candidates, crandn, full_x, full_y, observed_window

FINE = QuadratureSpec(1024)


class TestQuadratureSpec:
    def test_minimum_nodes(self):
        with pytest.raises(DomainError):
            QuadratureSpec(128)

    def test_nodes_periodic(self):
        t = QuadratureSpec(256).nodes()
        assert t[0] == 0.0 and t[-1] < 2 * np.pi


class TestQuadSimo:
    def test_alpha_zero_exact(self, rng):
        for _ in range(20):
            x, y = crandn(rng, 6), crandn(rng, 6)
            n0 = 0.4
            xn = np.vdot(x, x).real
            lx = n0 + xn
            ref = -math.log(lx) + (1 / (n0 * lx)) * abs(np.vdot(x, y)) ** 2
            assert quad_likelihood_simo(x, y, 0.0, n0) == pytest.approx(ref, abs=1e-12)

    def test_alpha_one_bessel_identity(self, rng):
        for _ in range(20):
            x = crandn(rng, 5)
            n0 = float(rng.uniform(0.2, 2.0))
            # choose y so that x^H y is real and positive
            y = x * float(rng.uniform(0.1, 2.0)) + 0.1 * crandn(rng, 5)
            y = y * np.exp(-1j * np.angle(np.vdot(x, y)))
            a = np.vdot(x, y)
            assert abs(a.imag) < 1e-12 and a.real > 0
            ref = -math.log(n0) - np.vdot(x, x).real / n0 + log_bessel_i0(2 * a.real / n0)
            assert quad_likelihood_simo(x, y, 1.0, n0) == pytest.approx(ref, rel=1e-8)

    def test_convergence(self, rng):
        for _ in range(20):
            x, y = crandn(rng, 8), 2 * crandn(rng, 8)
            a = quad_likelihood_simo(x, y, 0.5, 0.5)
            b = quad_likelihood_simo(x, y, 0.5, 0.5, FINE)
            assert abs(a - b) < 1e-8

    def test_alpha_domain(self):
        with pytest.raises(DomainError):
            quad_likelihood_simo(np.ones(2), np.ones(2), -0.5, 1.0)

    def test_length_mismatch(self):
        with pytest.raises(DomainError):
            quad_likelihood_simo(np.ones(2), np.ones(3), 0.5, 1.0)


class TestClosedFormAgainstQuadrature:
    @pytest.mark.parametrize("alpha", [0.0, 0.3, 0.7, 1.0])
    def test_per_hypothesis_metric(self, alpha):
        # 250 windows x 4 alphas = 10^3 instances, every hypothesis checked
        rng = np.random.default_rng(int(alpha * 10) + 40)
        cands = candidates(2, 1)
        worst = 0.0
        for _ in range(250):
            n0 = float(rng.uniform(0.1, 2.0))
            win, _, _ = observed_window(rng, n_d=2, n_rx=2, n0=n0, beta=float(rng.uniform(1.0, 2.0)), index=int(rng.integers(16)))
            table = window_metric_table(win, ReceiverSpec(SIMO_JED, EXACT_LOG, 2, alpha), n0)
            y = full_y(win)
            for t in rng.choice(len(cands), 4, replace=False):
                x = full_x(win, cands[t])[:, 0]
                ref = sum(quad_likelihood_simo(x, yi, alpha, n0) for yi in y)
                worst = max(worst, abs(table[t] - ref) / max(1.0, abs(ref)))
        assert worst <= 1e-6


class TestQuadLos:
    def test_x2_zero_reduces_to_simo(self, rng):
        for _ in range(5):
            x1, y = crandn(rng, 6), crandn(rng, 6)
            n0 = 0.7
            los = quad_likelihood_mimo_los(x1, np.zeros(6), y, n0, QuadratureSpec(256))
            # the SIMO reference also subtracts ln det(n0 I) and adds back (N-1) ln n0
            assert los == pytest.approx(quad_likelihood_simo(x1, y, 1.0, n0) + math.log(n0), rel=1e-10)

    def test_orthogonal_matches_closed_form(self, rng):
        for _ in range(5):
            x1 = np.r_[crandn(rng, 4), np.zeros(4)]
            x2 = np.r_[np.zeros(4), crandn(rng, 4)]
            y = x1 * np.exp(0.3j) + x2 * np.exp(-1.1j) + 0.5 * crandn(rng, 8)
            q = quad_likelihood_mimo_los(x1, x2, y, 0.6, QuadratureSpec(256))
            assert q == pytest.approx(los_closed_form(x1, x2, y, 0.6), rel=1e-6)

    def test_non_orthogonal_deviation_reported(self, rng):
        base = crandn(rng, 8)
        other = crandn(rng, 8)
        other -= np.vdot(base, other) / np.vdot(base, base) * base
        x1 = base / np.linalg.norm(base)
        x2 = 0.5 * x1 + math.sqrt(0.75) * other / np.linalg.norm(other)
        assert abs(np.vdot(x1, x2)) == pytest.approx(0.5)
        devs = []
        for _ in range(5):
            y = x1 * np.exp(1j * rng.uniform(0, 2 * np.pi)) + x2 * np.exp(1j * rng.uniform(0, 2 * np.pi)) + 0.3 * crandn(rng, 8)
            q = quad_likelihood_mimo_los(x1, x2, y, 0.5, QuadratureSpec(256))
            devs.append(los_closed_form(x1, x2, y, 0.5) - q)
        print("closed form minus exact LOS log-likelihood at correlation 0.5:", np.round(devs, 4))
        assert np.all(np.isfinite(devs))

    def test_convergence(self, rng):
        x1, x2, y = crandn(rng, 4), crandn(rng, 4), crandn(rng, 4)
        a = quad_likelihood_mimo_los(x1, x2, y, 1.0, QuadratureSpec(256))
        b = quad_likelihood_mimo_los(x1, x2, y, 1.0, QuadratureSpec(512))
        assert abs(a - b) < 1e-8


class TestExhaustiveMl:
    def test_dominant(self):
        assert exhaustive_ml([0, 1, 2, 3], lambda c: [0.1, 5.0, 0.2, -1.0][c]).index == 1

    def test_tie_break(self):
        assert exhaustive_ml(list(range(4)), lambda c: 0.0).index == 0

    def test_empty(self):
        with pytest.raises(DomainError):
            exhaustive_ml([], lambda c: 0.0)

    def test_detector_llrs_from_table(self):
        rng = np.random.default_rng(60)
        cands = candidates(2, 1)
        for _ in range(1000):
            n0 = float(rng.uniform(0.2, 2.0))
            win, _, _ = observed_window(rng, n_d=2, n0=n0, index=int(rng.integers(16)))
            y = full_y(win)

            def metric(d):
                x = full_x(win, d)[:, 0]
                return sum(2 * abs(np.vdot(x, yi)) / n0 for yi in y) - len(y) * (math.log(n0) + np.vdot(x, x).real / n0)

            ml = exhaustive_ml(cands, metric)
            llr = llr_noncoherent_simo(win, 1.0, n0, MAX_LOG)
            assert np.allclose(llr, llrs_from_scores(ml.scores, 4), atol=1e-9)
