"""
Unit tests for the splitting-constant extraction
"""
import math
import unittest
from fractions import Fraction

from mpmath import mp

from algebra.tau_basis import tau
from errors import InsufficientOrderError
from models.polynomial import Parity
from models.series import DSeries
from series.constants import (
    compute_J, decomposition_series, derive_series, extract_constants, gevrey_profile, leading_coefficient_alpha,
)
from series.recurrence import formal_solution

REFERENCE_ALPHA = 89.0334


def template_J(c, last: int = 41) -> DSeries:
    """
    J_n = -c (n-2)! (i/2pi)^(n-1) tau_(n-1) for odd n in [11, last], with the
    real factor rounded to a 60-digit rational.
    """
    terms = {}
    with mp.workprec(256):
        for n in range(11, last + 1, 2):
            k = n - 1
            value = c * mp.factorial(n - 2) * (-1) ** (k // 2 + 1) / (2 * mp.pi) ** k
            terms[n] = tau(k).scale(Fraction(mp.nstr(value, 60)))
    return DSeries.from_terms(last, terms, d_parity=Parity.ODD, u_parity=Parity.EVEN)


class TestDecomposition(unittest.TestCase):
    """A = U + Q G and J = Q1 S(G)"""

    @classmethod
    def setUpClass(cls):
        cls.solution = formal_solution(14)

    def test_fixed_series_shapes(self):
        U, Q, Q1, V1 = decomposition_series()
        self.assertEqual(U.order, 6)
        self.assertTrue(Q.coeffs[0].evaluate(0) == 1)
        self.assertTrue(Q1.coeffs[0].is_zero())
        self.assertTrue(V1.coeffs[0].evaluate(0) == 1)

    def test_J_structure(self):
        J = compute_J(self.solution)
        self.assertEqual(J.order, 17)
        self.assertIs(J.d_parity, Parity.ODD)
        self.assertIs(J.u_parity, Parity.EVEN)
        self.assertGreaterEqual(J.valuation(), 11)
        for n, c in J.nonzero_terms():
            self.assertEqual(n % 2, 1)
            self.assertLessEqual(c.degree, n - 1)

    def test_derive_series_attaches_parts(self):
        sol = derive_series(self.solution)
        self.assertIsNotNone(sol.F)
        self.assertIsNotNone(sol.G)
        self.assertEqual(sol.J, compute_J(self.solution))
        self.assertGreaterEqual(sol.G.valuation(), 8)
        for n in range(7):
            self.assertTrue(sol.F.coeffs[n].is_zero())

    def test_solution_order_too_low(self):
        with self.assertRaises(InsufficientOrderError):
            compute_J(formal_solution(12))

    def test_J_order_too_low(self):
        with self.assertRaises(InsufficientOrderError):
            extract_constants(compute_J(self.solution))


class TestTemplateRecovery(unittest.TestCase):
    """A J built from the leading template alone returns its own constant"""

    @classmethod
    def setUpClass(cls):
        cls.c = mp.mpf(50)
        cls.J = template_J(cls.c)
        cls.estimates = extract_constants(cls.J, 256)

    def test_direct_read_per_order(self):
        for n, value in self.estimates.alpha_direct_seq.items():
            self.assertLess(abs(value - self.c), 1e-9, f"direct read at n={n}")

    def test_direct_read_helper(self):
        self.assertLess(abs(leading_coefficient_alpha(self.J, 21) - self.c), 1e-9)
        with self.assertRaises(ValueError):
            leading_coefficient_alpha(self.J, 10)

    def test_summed_alpha(self):
        """Test alpha = 4 Σ alpha_n recovers the template constant"""
        self.assertLess(abs(self.estimates.alpha.value - self.c) / self.c, 1e-6)

    def test_alpha_terms_decay(self):
        ns = sorted(self.estimates.alpha_seq)
        self.assertEqual(ns[0], 11)
        self.assertLess(abs(self.estimates.alpha_seq[ns[-1]]), abs(self.estimates.alpha_seq[ns[0]]))

    def test_gevrey_profile_bounded(self):
        """Test g_n = c pi^2 for every template order"""
        profile = gevrey_profile(self.J, 128, shift=2)
        self.assertEqual(len(profile), self.J.order + 1)
        self.assertEqual(profile[10], 0)
        tops = [float(profile[n]) for n in range(11, self.J.order + 1, 2)]
        for g in tops:
            self.assertLess(abs(g - float(self.c) * 3.141592653589793 ** 2), 1e-3 * float(self.c))


class TestSplittingConstant(unittest.TestCase):
    """alpha from the order-40 series"""

    @classmethod
    def setUpClass(cls):
        cls.solution = derive_series(formal_solution(40))
        cls.estimates = extract_constants(cls.solution.J, 256)

    def test_alpha_order_40(self):
        alpha = float(self.estimates.alpha.value)
        self.assertGreater(alpha, 0)
        self.assertLess(abs(alpha - REFERENCE_ALPHA), 0.05)
        self.assertLess(float(self.estimates.alpha.error), 0.05)

    def test_splitting_prefactor(self):
        """Test 4 pi alpha = 1118.8267 to within the extrapolation error"""
        self.assertLess(abs(4 * math.pi * float(self.estimates.alpha.value) - 1118.8267), 0.7)

    def test_alpha_terms_decay(self):
        """Test |alpha_n| n^7 stays bounded over the last orders"""
        profile = self.estimates.decay_profile()
        ns = sorted(profile)
        ratio = float(profile[ns[-1]] / profile[ns[-5]])
        self.assertGreater(ratio, 0.5)
        self.assertLess(ratio, 2)

    def test_direct_read_settles(self):
        direct = self.estimates.alpha_direct_seq
        ns = sorted(direct)
        self.assertGreater(float(direct[ns[-1]]), 0)
        self.assertLess(abs(float(direct[ns[-1]] / direct[ns[-2]]) - 1), 0.02)

    def test_gevrey_profile_of_A(self):
        """Test sup_n ||A_n||_n (2pi)^n / n! is finite and stops growing"""
        with mp.workprec(256):
            profile = gevrey_profile(self.solution.A, 256)
            self.assertTrue(all(mp.isfinite(g) for g in profile))
            self.assertLessEqual(max(profile[:41]), mp.mpf("1.05") * max(profile[:31]))

    def test_gevrey_profile_of_J(self):
        """Test ||J_n||_n (2pi)^n / (n-2)! levels off"""
        profile = gevrey_profile(self.solution.J, 256, shift=2)
        before, last = [g for g in profile if g != 0][-2:]
        self.assertGreater(float(last), 0)
        self.assertLess(abs(float(last / before) - 1), 0.05)


if __name__ == '__main__':
    unittest.main()
