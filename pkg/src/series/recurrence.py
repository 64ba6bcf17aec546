"""
Formal separatrix series of the discretized pendulum

All coefficients are exact rational polynomials in u = tanh(dt/eps).
The difference equation is used in its denominator form

    exp(dD)Z / (cosh d + u sinh d) + exp(-dD)Z / (cosh d - u sinh d) - 2Z = f(eps, u, Z)

with eps^2 = 2 cosh d - 2 eliminated in favour of d.
"""
import math
import time
from fractions import Fraction
from functools import lru_cache
from typing import List, Literal, Tuple

import structlog

from errors import DomainError, ParityViolationError, RecurrenceError
from models.polynomial import ONE_MINUS_U2, U, ZERO, Parity, Polynomial, exact_div
from models.results import FormalSolution
from models.series import DSeries
from series.operators import op_C1, op_S1

logger = structlog.get_logger(__name__)

TrigKind = Literal["cos_w", "sinc_w"]

_TWO_U = Polynomial((0, 2))
_TWO_U2_MINUS_ONE = Polynomial((-1, 0, 2))


@lru_cache(maxsize=64)
def eps_squared_series(order: int) -> DSeries:
    """eps^2 = 2 cosh d - 2 = Σ_{k>=1} 2 d^(2k) / (2k)!"""
    terms = {2 * k: Polynomial.constant(Fraction(2, math.factorial(2 * k))) for k in range(1, order // 2 + 1)}
    return DSeries.from_terms(order, terms, d_parity=Parity.EVEN, u_parity=Parity.EVEN, bounded_degree=True)


def _flow_derivative(p: Polynomial) -> Polynomial:
    # d/dτ of sqrt(1-u^2) p(u) along du/dτ = 1-u^2, divided by sqrt(1-u^2)
    return ONE_MINUS_U2 * p.derivative() - U * p


@lru_cache(maxsize=None)
def I_polys(n: int) -> Polynomial:
    """
    I_{2n-1}(u) = 2/(2n)! E^{2n-1}(-2), the d^{2n} part of the second
    central difference of q_0 divided by sqrt(1-u^2).
    """
    if n < 1:
        raise DomainError(f"I-polynomials start at n = 1, got {n}")
    p = Polynomial.constant(-2)
    for _ in range(2 * n - 1):
        p = _flow_derivative(p)
    result = p.scale(Fraction(2, math.factorial(2 * n)))
    if result.evaluate(1) != Fraction(4, math.factorial(2 * n)):
        raise RecurrenceError(f"I_{2 * n - 1}(1) = {result.evaluate(1)}, expected 4/(2n)!")
    if not result.is_odd():
        raise ParityViolationError(f"I_{2 * n - 1} is not odd: {result}")
    return result


def _trig_pair(A: DSeries) -> Tuple[DSeries, DSeries]:
    """cos_w(A) and sinc_w(A) sharing the powers of W = (1-u^2) A^2"""
    if not (A.coeffs[0].is_zero() and (A.order < 1 or A.coeffs[1].is_zero())):
        raise DomainError("trigonometric composition needs A = O(d^2)")
    order = A.order
    W = (A * A).scale(ONE_MINUS_U2)
    cos_sum = DSeries.one(order)
    sin_sum = DSeries.one(order)
    power = DSeries.one(order)
    k = 1
    while True:
        power = power * W
        if power.is_zero():
            break
        sign = -1 if k % 2 else 1
        cos_sum = cos_sum + power.scale(Fraction(sign, math.factorial(2 * k)))
        sin_sum = sin_sum + power.scale(Fraction(sign, math.factorial(2 * k + 1)))
        k += 1
    return cos_sum, A * sin_sum


def trig_compose(A: DSeries, which: TrigKind) -> DSeries:
    """
    cos_w(A) = cos(A sqrt(1-u^2)) and sinc_w(A) = sin(A sqrt(1-u^2)) / sqrt(1-u^2)
    as series in d with polynomial coefficients.

    Raises:
        DomainError: A has a nonzero d^0 or d^1 coefficient
    """
    cos_w, sinc_w = _trig_pair(A)
    if which == "cos_w":
        return cos_w
    if which == "sinc_w":
        return sinc_w
    raise ValueError(f"unknown composition '{which}'")


@lru_cache(maxsize=64)
def _inverse_denominators(order: int) -> Tuple[DSeries, DSeries]:
    """Even and odd parts in d of 1/(cosh d + u sinh d)"""
    denominator = DSeries(tuple(
        Polynomial.constant(Fraction(1, math.factorial(n))) if n % 2 == 0
        else U.scale(Fraction(1, math.factorial(n)))
        for n in range(order + 1)
    ))
    V = DSeries.one(order).divide(denominator)
    even = DSeries(tuple(c if n % 2 == 0 else ZERO for n, c in enumerate(V.coeffs)),
                   d_parity=Parity.EVEN, u_parity=Parity.EVEN)
    odd = DSeries(tuple(c if n % 2 == 1 else ZERO for n, c in enumerate(V.coeffs)),
                  d_parity=Parity.ODD, u_parity=Parity.ODD)
    return even, odd


def _check_solution_shape(Z: DSeries) -> None:
    for n, c in Z.nonzero_terms():
        if n % 2 == 1:
            raise ParityViolationError(f"Z has an odd power d^{n}")
        if not c.is_odd():
            raise ParityViolationError(f"Z coefficient of d^{n} is not odd in u: {c}")


def forcing(Z: DSeries, order: int) -> DSeries:
    """f(eps, u, Z) with eps^2 and the I-polynomials expanded in d"""
    Z = Z.pad(order)
    cos_w, sinc_w = _trig_pair(Z)
    inner = cos_w.scale(_TWO_U) + sinc_w.scale(_TWO_U2_MINUS_ONE)
    f = eps_squared_series(order) * inner
    I_terms = {2 * n: I_polys(n) for n in range(1, order // 2 + 1)}
    return f - DSeries.from_terms(order, I_terms, d_parity=Parity.EVEN, u_parity=Parity.ODD)


def residual(Z: DSeries, order: int) -> DSeries:
    """
    Residual of the difference equation for a trial series Z through d^order.

    Since exp(±dD) = C1 ± S1 and the two denominators are exchanged by
    d -> -d, the left side equals 2(C1 Z Ve + S1 Z Vo) - 2Z.
    """
    _check_solution_shape(Z)
    Z = Z.pad(order)
    Ve, Vo = _inverse_denominators(order)
    lhs = (op_C1(Z) * Ve + op_S1(Z) * Vo).scale(2) - Z.scale(2)
    return lhs - forcing(Z, order)


_DOUBLE_ROOT = ONE_MINUS_U2 * ONE_MINUS_U2


def solve_step(R: Polynomial) -> Polynomial:
    """
    Unique odd solution vanishing at 0 of the linear step equation:
    A(u) = -∫_0^u [∫_1^t R(s) ds] / (1-t^2)^2 dt.

    Raises:
        RecurrenceError: R is not odd or R(1) != 0
    """
    if R.is_zero():
        return ZERO
    if not R.is_odd():
        raise RecurrenceError(f"step right-hand side is not odd: {R}")
    if R.evaluate(1) != 0:
        raise RecurrenceError(f"step right-hand side does not vanish at u = 1: {R}")

    inner = R.integrate_from(1)
    quotient = exact_div(inner, _DOUBLE_ROOT)
    A = -quotient.integrate_from(0)

    if not A.is_odd() or A.evaluate(0) != 0:
        raise ParityViolationError(f"step solution is not odd: {A}")
    if A.degree > R.degree - 2:
        raise ParityViolationError(f"step solution degree {A.degree} exceeds {R.degree - 2}")
    return A


def partial_sum(polys: List[Polynomial], order: int) -> DSeries:
    """Σ polys[k] d^(2k+2) as an order-limited series"""
    terms = {2 * k + 2: p for k, p in enumerate(polys)}
    return DSeries.from_terms(order, terms, d_parity=Parity.EVEN, u_parity=Parity.ODD, bounded_degree=True)


def formal_solution(order: int) -> FormalSolution:
    """
    Build A_1, A_3, ... up to d^order.

    Each step computes the residual of the current partial sum through its
    first possibly nonzero coefficient d^(2n+4), checks everything below
    vanishes, and solves for A_{2n+1}.

    Raises:
        DomainError: order odd or below 4
        RecurrenceError: a lower residual coefficient does not vanish
    """
    if order < 4 or order % 2:
        raise DomainError(f"series order must be even and >= 4, got {order}")

    started = time.time()
    polys: List[Polynomial] = []
    n = 0
    while 2 * n + 2 <= order:
        step_started = time.time()
        target = 2 * n + 4
        R = residual(partial_sum(polys, target), target)
        for j in range(target):
            if not R.coeffs[j].is_zero():
                raise RecurrenceError(f"residual coefficient d^{j} does not vanish at step {n}")

        A_next = solve_step(R.coeffs[target])
        if A_next.degree > 2 * n + 1:
            raise ParityViolationError(f"A_{2 * n + 1} has degree {A_next.degree}")
        polys.append(A_next)

        logger.debug("formal_solution_step", index=2 * n + 1, degree=A_next.degree,
                     elapsed_ms=round((time.time() - step_started) * 1000, 2))
        n += 1

    elapsed_ms = (time.time() - started) * 1000
    logger.info("formal_solution_built", order=order, terms=len(polys), elapsed_ms=round(elapsed_ms, 1))
    return FormalSolution(order=order, A=partial_sum(polys, order), odd_polys=tuple(polys), elapsed_ms=elapsed_ms)
