"""
Unit tests for the map, its saddles, the manifold parameterization and the
splitting measurement
"""
import math
import unittest

import numpy as np
from mpmath import mp

from dynamics.manifolds import (
    conjugacy_residual, energy_drift, evaluate, locate, manifold_series, p_on_manifold_at_q,
)
from dynamics.splitting import (
    precision_guard, q0, required_bits, series_vs_manifold, splitting_law, splitting_scan, vertical_distance,
)
from dynamics.standard_map import (
    d_of_eps, eps_of_d, fixed_point_data, map_backward, map_forward, modified_energy, separatrix_momentum,
)
from errors import DomainError, PrecisionGuardError
from models.config import PrecisionConfig
from models.dynamics import FixedPointLabel, ManifoldBranch, PhasePoint
from series.evaluation import xi_minus
from series.recurrence import formal_solution


class TestStandardMap(unittest.TestCase):
    """The discretized pendulum and its saddles"""

    def test_inverse_round_trip(self):
        with mp.workprec(128):
            eps = mp.mpf("0.4")
            z = PhasePoint(mp.mpf(1), mp.mpf("0.3"))
            back = map_backward(map_forward(z, eps), eps)
            self.assertLess(abs(back.q - z.q), mp.mpf(2) ** -120)
            self.assertLess(abs(back.p - z.p), mp.mpf(2) ** -120)

    def test_orbit_matches_float64_reference(self):
        """Test 20 steps against a float64 iteration of the same scheme"""
        q, p = np.float64(1.0), np.float64(-0.5)
        with mp.workprec(128):
            z = PhasePoint(mp.mpf(1), mp.mpf("-0.5"))
            for _ in range(20):
                p = p + 0.3 * np.sin(q)
                q = q + 0.3 * p
                z = map_forward(z, mp.mpf("0.3"))
            self.assertAlmostEqual(float(z.q), float(q), places=10)
            self.assertAlmostEqual(float(z.p), float(p), places=10)

    def test_p_updated_first(self):
        with mp.workprec(128):
            z = map_forward(PhasePoint(mp.pi / 2, mp.mpf(0)), mp.mpf("0.5"))
            self.assertLess(abs(z.p - mp.mpf("0.5")), mp.mpf(2) ** -120)
            self.assertLess(abs(z.q - (mp.pi / 2 + mp.mpf("0.25"))), mp.mpf(2) ** -120)

    def test_d_of_eps(self):
        with mp.workprec(128):
            self.assertLess(abs(d_of_eps(eps_of_d(mp.mpf("0.3"))) - mp.mpf("0.3")), mp.mpf(2) ** -120)
            self.assertLess(abs(d_of_eps(mp.mpf("0.5")) - 2 * mp.asinh(mp.mpf("0.25"))), mp.mpf(2) ** -120)
        with self.assertRaises(DomainError):
            d_of_eps(0)
        with self.assertRaises(DomainError):
            d_of_eps(-1)

    def test_fixed_point_data(self):
        """Test trace 2 + eps^2, determinant 1 and multipliers e^(±d)"""
        with mp.workprec(128):
            eps = mp.mpf("0.5")
            for label in FixedPointLabel:
                data = fixed_point_data(eps, label)
                self.assertLess(abs(data.trace - 2 - eps * eps), mp.mpf(2) ** -120)
                self.assertLess(abs(data.determinant - 1), mp.mpf(2) ** -120)
                lam_s, lam_u = data.eigenvalues
                self.assertLess(abs(lam_u - mp.exp(d_of_eps(eps))), mp.mpf(2) ** -110)
                self.assertLess(abs(lam_s * lam_u - 1), mp.mpf(2) ** -110)
                for vq, vp in data.eigenvectors:
                    self.assertGreater(vq, 0)
                    self.assertLess(abs(vq * vq + vp * vp - 1), mp.mpf(2) ** -110)

    def test_energies(self):
        with mp.workprec(128):
            saddle = PhasePoint(mp.mpf(0), mp.mpf(0))
            self.assertEqual(modified_energy(saddle, mp.mpf("0.5")), 1)
            self.assertLess(abs(separatrix_momentum(mp.pi) + 2), mp.mpf(2) ** -120)


class TestManifolds(unittest.TestCase):
    """Parameterization of the saddle branches"""

    @classmethod
    def setUpClass(cls):
        cls.cfg = PrecisionConfig(bits=192, manifold_order=30)
        cls.eps = "0.5"
        cls.stable = manifold_series(cls.eps, ManifoldBranch.STABLE_AT_A, cls.cfg)
        cls.unstable = manifold_series(cls.eps, ManifoldBranch.UNSTABLE_AT_B, cls.cfg)

    def test_even_coefficients_vanish(self):
        for ms in (self.stable, self.unstable):
            self.assertEqual(ms.order, 30)
            for k in range(2, 31, 2):
                c = ms.coeffs[k - 1]
                self.assertEqual(c[0], 0)
                self.assertEqual(c[1], 0)

    def test_conjugacy_residual_at_seed(self):
        for ms in (self.stable, self.unstable):
            self.assertLess(conjugacy_residual(ms, ms.seed), mp.mpf(2) ** -96)
            self.assertLess(conjugacy_residual(ms, -ms.seed), mp.mpf(2) ** -96)

    def test_branches_start_at_saddles(self):
        with mp.workprec(192):
            self.assertEqual(evaluate(self.stable, 0).q, 0)
            self.assertLess(abs(evaluate(self.unstable, 0).q - 2 * mp.pi), mp.mpf(2) ** -180)
            self.assertGreater(self.unstable.multiplier, 1)
            self.assertLess(self.stable.multiplier, 1)

    def test_momentum_at_pi(self):
        """Test p on the stable branch at q = pi is close to the continuous value -2"""
        with mp.workprec(192):
            p = p_on_manifold_at_q(self.stable, mp.pi, self.eps, self.cfg)
            self.assertLess(abs(p + 2), 0.3)
            self.assertLess(p, 0)

    def test_locate_hits_target(self):
        with mp.workprec(192):
            crossing = locate(self.unstable, mp.mpf(4), self.eps, self.cfg)
            self.assertLess(abs(crossing.point.q - 4), mp.mpf(2) ** -150)
            self.assertGreater(crossing.iterations, 0)

    def test_locate_rejects_targets_outside_saddles(self):
        with self.assertRaises(DomainError):
            locate(self.stable, 7, self.eps, self.cfg)
        with self.assertRaises(DomainError):
            locate(self.stable, 0, self.eps, self.cfg)

    def test_energy_drift_small(self):
        with mp.workprec(192):
            drift = energy_drift(self.stable, mp.pi, self.eps, self.cfg)
            self.assertLess(drift, 10 * mp.mpf(self.eps) ** 2)


class TestSplitting(unittest.TestCase):
    """Vertical distance, its law and the precision guard"""

    def test_required_bits(self):
        self.assertEqual(required_bits(0.3), 231)
        self.assertLess(required_bits(0.6), required_bits(0.5))

    def test_precision_guard(self):
        with self.assertRaises(PrecisionGuardError):
            precision_guard("0.3", PrecisionConfig(bits=128))
        precision_guard("0.5", PrecisionConfig(bits=192))
        with self.assertRaises(PrecisionGuardError):
            splitting_scan("0.3", PrecisionConfig(bits=128))

    def test_q0(self):
        with mp.workprec(128):
            self.assertLess(abs(q0(0) - mp.pi), mp.mpf(2) ** -120)

    def test_window(self):
        with self.assertRaises(DomainError):
            vertical_distance("0.5", 2, PrecisionConfig(bits=192))

    def test_splitting_law(self):
        with mp.workprec(128):
            self.assertEqual(splitting_law(0, "0.5", 89), 0)
            quarter = splitting_law(mp.mpf("0.125"), "0.5", 1)
            expected = 4 * mp.pi / mp.mpf("0.25") * mp.cosh(mp.mpf("0.125")) * mp.exp(-mp.pi ** 2 / mp.mpf("0.5"))
            self.assertLess(abs(quarter / expected - 1), mp.mpf(2) ** -100)
            self.assertGreater(splitting_law(mp.mpf("0.125"), "0.5", 1, normalization="d"), 0)
        with self.assertRaises(ValueError):
            splitting_law(0, "0.5", 1, normalization="h")

    def test_symmetric_intersection(self):
        """Test the manifolds cross on the line q = pi"""
        delta = vertical_distance("0.5", 0, PrecisionConfig(bits=256))
        self.assertLess(abs(delta), 1e-6)

    def test_series_matches_manifold(self):
        gap = series_vs_manifold("0.5", 0, formal_solution(16), PrecisionConfig(bits=192, manifold_order=30))
        self.assertLess(gap, 0.125)


class TestSplittingScan(unittest.TestCase):
    """Scans at eps = 0.6, 0.5, 0.4 against the exponentially small law"""

    EPSILONS = ("0.6", "0.5", "0.4")
    ALPHA = mp.mpf("89.0334")

    @classmethod
    def setUpClass(cls):
        cfg = PrecisionConfig(bits=256)
        cls.reports = [splitting_scan(eps, cfg, alpha=cls.ALPHA) for eps in cls.EPSILONS]

    def test_report_shape(self):
        report = self.reports[0]
        self.assertEqual(len(report.samples), 33)
        self.assertIn('total_ms', report.timings)
        self.assertFalse(any(r.degraded for r in self.reports))

    def test_exponent(self):
        """Test ln(C eps^2) against 1/eps has slope -pi^2"""
        x = [1 / float(r.epsilon) for r in self.reports]
        y = [float(mp.log(r.fitted_amplitude * r.epsilon ** 2)) for r in self.reports]
        slope = np.polyfit(x, y, 1)[0]
        self.assertLess(abs(slope / -math.pi ** 2 - 1), 0.02)

    def test_implied_alpha_trend(self):
        gaps = [abs(float(r.implied_alpha_eps) / float(self.ALPHA) - 1) for r in self.reports]
        for wider, narrower in zip(gaps, gaps[1:]):
            self.assertLessEqual(narrower, wider)
        self.assertLess(gaps[-1], 0.3)
        self.assertLess(abs(float(self.reports[-1].implied_alpha_d) / float(self.ALPHA) - 1), 0.15)

    def test_zero_spacing(self):
        for r in self.reports:
            self.assertLess(abs(float(r.zero_spacing / (r.epsilon / 2)) - 1), 0.05)

    def test_delta_is_odd(self):
        for r in self.reports:
            deltas = [delta for _, delta in r.samples]
            for delta, mirrored in zip(deltas, reversed(deltas)):
                self.assertLessEqual(abs(delta + mirrored), r.max_abs_delta() / 10)

    def test_scale_within_factor_three(self):
        for r in self.reports:
            self.assertGreater(r.scale_ratio, mp.mpf(1) / 3)
            self.assertLess(r.scale_ratio, 3)
            self.assertGreater(r.law_ratio, 0)


class TestSeriesAgainstManifold(unittest.TestCase):
    """Optimally truncated series against the computed stable manifold"""

    @classmethod
    def setUpClass(cls):
        cls.solution = formal_solution(40)
        cls.cfg = PrecisionConfig(bits=256, manifold_order=40)

    def test_difference_is_exponentially_small(self):
        """Test ln(gap eps^2) against 1/eps has slope -pi^2"""
        epsilons = ("0.5", "0.4", "0.3")
        gaps = [series_vs_manifold(eps, "0.5", self.solution, self.cfg) for eps in epsilons]
        x = [1 / float(eps) for eps in epsilons]
        y = [float(mp.log(gap * mp.mpf(eps) ** 2)) for gap, eps in zip(gaps, epsilons)]
        slope = np.polyfit(x, y, 1)[0]
        self.assertLess(abs(slope / -math.pi ** 2 - 1), 0.1)

    def test_optimal_beats_fixed_truncation(self):
        optimal = series_vs_manifold("0.4", "0.5", self.solution, self.cfg)
        fixed = series_vs_manifold("0.4", "0.5", self.solution, self.cfg, truncation=6)
        self.assertLessEqual(optimal, fixed)

    def test_position_is_second_order_in_eps(self):
        """Test q_d(t) - q_0(t) = O(eps^2) at t = 0.5"""
        A = formal_solution(16).A
        with mp.workprec(128):
            t = mp.mpf("0.5")
            diffs = []
            for eps in (mp.mpf("0.1"), mp.mpf("0.05")):
                diffs.append(abs(xi_minus(A, t, eps, d_of_eps(eps)) - q0(t)))
            order = mp.log(diffs[0] / diffs[1], 2)
        self.assertGreater(order, 1.9)
        self.assertLess(order, 2.1)


if __name__ == '__main__':
    unittest.main()
