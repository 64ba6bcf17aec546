"""
Unit tests for the d-series engine: operators, the recurrence, evaluation
and extrapolation
"""
import math
import unittest
from fractions import Fraction

from mpmath import mp

from algebra.tau_basis import tau
from errors import DomainError, InsufficientOrderError, ParityViolationError, RecurrenceError
from models.polynomial import ONE, U, ZERO, Parity, Polynomial
from models.series import DSeries
from series.constants import decomposition_series
from series.evaluation import eval_series, optimal_truncation, xi_minus, xi_plus
from series.extrapolation import accelerate, richardson_extrapolate
from series.operators import kernel, op_C, op_C1, op_exp, op_exp_neg, op_S, op_S1
from series.recurrence import (
    I_polys, eps_squared_series, formal_solution, partial_sum, residual, solve_step, trig_compose,
)


def poly(*coeffs) -> Polynomial:
    return Polynomial(tuple(Fraction(c) for c in coeffs))


def bounded_series(order: int) -> DSeries:
    """Fixed series with deg Q_n <= n and mixed parities"""
    coeffs = tuple(
        Polynomial(tuple(Fraction((-1) ** (n + k) * (k + 1), n + 2) for k in range(n + 1)))
        for n in range(order + 1)
    )
    return DSeries(coeffs, bounded_degree=True)


class TestDSeries(unittest.TestCase):
    """Truncated arithmetic on series with polynomial coefficients"""

    def test_product_truncates_at_smaller_order(self):
        a = DSeries((ONE, U, ZERO, U))
        b = DSeries((ONE, ONE))
        product = a * b
        self.assertEqual(product.order, 1)
        self.assertEqual(product.coeffs, (ONE, U + 1))

    def test_divide_inverts_product(self):
        Q = bounded_series(8)
        unit = DSeries((ONE, U, poly(1, 0, 1)) + (ZERO,) * 6)
        self.assertEqual((Q * unit).divide(unit), Q)

    def test_divide_needs_unit(self):
        with self.assertRaises(DomainError):
            bounded_series(4).divide(DSeries((U, ONE)))

    def test_parity_claim_checked(self):
        with self.assertRaises(ParityViolationError):
            DSeries((ZERO, ONE), d_parity=Parity.EVEN)
        with self.assertRaises(ParityViolationError):
            DSeries((ONE, U), u_parity=Parity.EVEN)
        with self.assertRaises(ParityViolationError):
            DSeries((U,), bounded_degree=True)

    def test_shift_down(self):
        S = DSeries((ZERO, U, ZERO, poly(0, 1, 0, 1)), d_parity=Parity.ODD)
        shifted = S.shift_down(1)
        self.assertEqual(shifted.coeffs, (U, ZERO, poly(0, 1, 0, 1)))
        self.assertIs(shifted.d_parity, Parity.EVEN)
        with self.assertRaises(DomainError):
            DSeries((ONE, U)).shift_down(1)

    def test_coefficient_beyond_order(self):
        with self.assertRaises(InsufficientOrderError):
            bounded_series(3).coefficient(4)


class TestOperators(unittest.TestCase):
    """f(dD) acting exactly on series"""

    def test_kernel_tables(self):
        self.assertEqual(kernel("cosh_half", 4).taylor, (1, 0, Fraction(1, 8), 0, Fraction(1, 384)))
        self.assertIs(kernel("sinh", 5).parity(), Parity.ODD)
        with self.assertRaises(KeyError):
            kernel("tanh", 3)

    def test_cosh_half_on_u(self):
        """Test C(u d) = tau_1 d + (1/4) tau_3 d^3"""
        Q = DSeries((ZERO, U, ZERO, ZERO))
        result = op_C(Q)
        self.assertEqual(result.coeffs[1], tau(1))
        self.assertEqual(result.coeffs[3], tau(3).scale(Fraction(1, 4)))

    def test_exp_on_u(self):
        """Test the d^n coefficient of exp(dD) u is tau_(n+1)"""
        Q = DSeries((U,) + (ZERO,) * 8)
        result = op_exp(Q)
        for n in range(9):
            self.assertEqual(result.coeffs[n], tau(n + 1))

    def test_exp_inverse(self):
        Q = bounded_series(10)
        self.assertEqual(op_exp_neg(op_exp(Q)), Q)

    def test_cosh_identity(self):
        """Test C1 = 2 S^2 + Id on a fixed series"""
        Q = bounded_series(10)
        self.assertEqual(op_C1(Q), op_S(op_S(Q)).scale(2) + Q)

    def test_product_rules(self):
        Q = bounded_series(8)
        G = DSeries(tuple(poly(*([1] * (n + 1))) for n in range(9)), bounded_degree=True)
        self.assertEqual(op_C(Q * G), op_C(Q) * op_C(G) + op_S(Q) * op_S(G))
        self.assertEqual(op_S(Q * G), op_S(Q) * op_C(G) + op_C(Q) * op_S(G))

    def test_sinh_double(self):
        """Test S1 = 2 S C"""
        Q = bounded_series(10)
        self.assertEqual(op_S1(Q), op_S(op_C(Q)).scale(2))

    def test_full_step_product_rules(self):
        Q = bounded_series(8)
        G = DSeries(tuple(poly(*range(1, n + 2)) for n in range(9)), bounded_degree=True)
        self.assertEqual(op_C1(Q * G), op_C1(Q) * op_C1(G) + op_S1(Q) * op_S1(G))
        self.assertEqual(op_S1(Q * G), op_S1(Q) * op_C1(G) + op_C1(Q) * op_S1(G))


class TestRecurrence(unittest.TestCase):
    """The difference equation and its order-by-order solution"""

    def test_eps_squared_series(self):
        S = eps_squared_series(6)
        self.assertEqual(S.coeffs[2], ONE)
        self.assertEqual(S.coeffs[4], Polynomial.constant(Fraction(1, 12)))
        self.assertEqual(S.coeffs[6], Polynomial.constant(Fraction(1, 360)))

    def test_I_polys(self):
        self.assertEqual(I_polys(1), poly(0, 2))
        for n in range(1, 6):
            self.assertTrue(I_polys(n).is_odd())
        with self.assertRaises(DomainError):
            I_polys(0)

    def test_trig_compose_leading_terms(self):
        """Test cos_w(A) = 1 - (1-u^2)A^2/2 + ... for A = d^2"""
        A = DSeries((ZERO, ZERO, ONE, ZERO, ZERO))
        cos_w = trig_compose(A, "cos_w")
        self.assertEqual(cos_w.coeffs[0], ONE)
        self.assertEqual(cos_w.coeffs[4], poly(Fraction(-1, 2), 0, Fraction(1, 2)))
        self.assertEqual(trig_compose(A, "sinc_w"), A)
        with self.assertRaises(DomainError):
            trig_compose(DSeries((ZERO, ONE, ZERO)), "cos_w")

    def test_first_residual(self):
        """Test the residual of the zero series is (u^3 - u) d^4"""
        R = residual(partial_sum([], 4), 4)
        for n in range(4):
            self.assertTrue(R.coeffs[n].is_zero())
        self.assertEqual(R.coeffs[4], poly(0, -1, 0, 1))

    def test_residual_after_first_step(self):
        R = residual(partial_sum([Polynomial.monomial(1, Fraction(-1, 4))], 6), 6)
        self.assertTrue(all(R.coeffs[n].is_zero() for n in range(6)))
        self.assertEqual(R.coeffs[6], poly(0, Fraction(-23, 24), 0, Fraction(137, 48), 0, Fraction(-91, 48)))

    def test_solve_step(self):
        """Test the first step gives A_1 = -u/4"""
        self.assertEqual(solve_step(poly(0, -1, 0, 1)), Polynomial.monomial(1, Fraction(-1, 4)))
        self.assertEqual(solve_step(ZERO), ZERO)

    def test_solve_step_rejects_bad_rhs(self):
        with self.assertRaises(RecurrenceError):
            solve_step(Polynomial.monomial(2))
        with self.assertRaises(RecurrenceError):
            solve_step(U)

    def test_formal_solution_initial_part(self):
        """Test A_1, A_3, A_5 against the fixed rational values"""
        sol = formal_solution(6)
        self.assertEqual(sol.A_poly(1), Polynomial.monomial(1, Fraction(-1, 4)))
        self.assertEqual(sol.A_poly(3), poly(0, Fraction(-47, 576), 0, Fraction(91, 864)))
        self.assertEqual(sol.A, decomposition_series()[0])
        with self.assertRaises(ValueError):
            sol.A_poly(2)

    def test_formal_solution_shape(self):
        sol = formal_solution(16)
        self.assertEqual(len(sol.odd_polys), 8)
        for k, p in enumerate(sol.odd_polys):
            self.assertTrue(p.is_odd())
            self.assertLessEqual(p.degree, 2 * k + 1)
        self.assertTrue(residual(sol.A, 17).is_zero())
        self.assertTrue(residual(sol.A, 18).coeffs[18].is_zero())
        self.assertFalse(residual(sol.A, 20).coeffs[20].is_zero())

    def test_lower_orders_unchanged(self):
        """Test raising the order leaves the earlier coefficients alone"""
        self.assertEqual(formal_solution(16).odd_polys[:4], formal_solution(8).odd_polys)

    def test_formal_solution_bad_order(self):
        with self.assertRaises(DomainError):
            formal_solution(7)
        with self.assertRaises(DomainError):
            formal_solution(2)


class TestEvaluation(unittest.TestCase):
    """Numeric evaluation with optimal truncation"""

    def test_optimal_truncation_factorial_series(self):
        """Test the least term of Σ n! d^n at d = 0.12 is n = 8"""
        S = DSeries(tuple(Polynomial.constant(math.factorial(n)) for n in range(21)))
        self.assertEqual(optimal_truncation(S, mp.mpf("0.12"), mp.mpf(0)), 8)

    def test_eval_series_fixed_truncation(self):
        S = DSeries((ONE, Polynomial.constant(2), Polynomial.constant(3)))
        self.assertAlmostEqual(float(eval_series(S, "0.5", 0, truncation=1)), 2.0)
        self.assertAlmostEqual(float(eval_series(S, "0.5", 0, truncation=5)), 2.75)

    def test_eval_series_domain(self):
        S = DSeries((ONE, U))
        with self.assertRaises(DomainError):
            eval_series(S, "0.5", 1)
        with self.assertRaises(DomainError):
            eval_series(S, "-0.5", 0, truncation=1)

    def test_branches_meet_at_pi(self):
        with mp.workprec(128):
            A = DSeries.zero(4)
            eps = mp.mpf("0.5")
            d = 2 * mp.asinh(eps / 2)
            self.assertLess(abs(xi_minus(A, 0, eps, d) - mp.pi), mp.mpf(2) ** -120)
            self.assertLess(abs(xi_plus(A, 0, eps, d) - mp.pi), mp.mpf(2) ** -120)


class TestExtrapolation(unittest.TestCase):
    """Richardson acceleration"""

    def test_exact_power_law_removed(self):
        nodes = [2, 4, 8]
        values = [1 + mp.mpf(1) / n ** 2 for n in nodes]
        out, out_nodes = richardson_extrapolate(values, nodes, 2)
        self.assertEqual(out_nodes, [4, 8])
        for v in out:
            self.assertAlmostEqual(float(v), 1.0, places=12)

    def test_accelerate_two_levels(self):
        nodes = list(range(10, 20))
        values = [3 + mp.mpf(5) / n ** 6 for n in nodes]
        result = accelerate(values, nodes, (6, 7))
        self.assertAlmostEqual(float(result.value), 3.0, places=10)
        self.assertEqual(len(result.levels), 3)
        self.assertEqual(result.partial_sums, values)

    def test_too_few_values(self):
        with self.assertRaises(InsufficientOrderError):
            richardson_extrapolate([mp.mpf(1)], [3], 2)
        with self.assertRaises(InsufficientOrderError):
            accelerate([], [], (2,))


if __name__ == '__main__':
    unittest.main()
