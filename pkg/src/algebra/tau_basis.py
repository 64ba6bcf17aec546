"""
The operator D = (1 - u^2) d/du and the tau basis it generates

tau_0 = 1, tau_1 = u, tau_{n+1} = D tau_n / n. tau_n has degree n and
leading coefficient (-1)^(n-1) for n >= 1, so every polynomial has a unique
expansion in tau_0 .. tau_deg.
"""
from fractions import Fraction
from typing import List

from mpmath import mp

from cache.lru_cache import TauCache
from errors import DomainError
from models.polynomial import ONE, ONE_MINUS_U2, U, Polynomial, TauExpansion

DEFAULT_NORM_BITS = 256


def apply_D(p: Polynomial) -> Polynomial:
    """(1 - u^2) p'"""
    return ONE_MINUS_U2 * p.derivative()


def _next_tau(prev: Polynomial, n: int) -> Polynomial:
    return apply_D(prev).scale(Fraction(1, n))


tau_cache = TauCache(seed=(ONE, U), step=_next_tau)


def tau(n: int) -> Polynomial:
    return tau_cache.get(n)


def to_tau(p: Polynomial) -> TauExpansion:
    """Triangular change of basis, solved from the top degree down"""
    if p.is_zero():
        return TauExpansion()
    basis = tau_cache.snapshot(p.degree)
    rest = list(p.coeffs)
    coeffs: List[Fraction] = [Fraction(0)] * (p.degree + 1)
    for k in range(p.degree, -1, -1):
        c = rest[k]
        if c == 0:
            continue
        a = c / basis[k].coeffs[k]
        coeffs[k] = a
        for j, b in enumerate(basis[k].coeffs):
            if b:
                rest[j] -= a * b
    return TauExpansion(tuple(coeffs))


def from_tau(e: TauExpansion) -> Polynomial:
    if not e.coeffs:
        return Polynomial()
    basis = tau_cache.snapshot(len(e.coeffs) - 1)
    acc = [Fraction(0)] * len(e.coeffs)
    for k, a in e.nonzero():
        for j, b in enumerate(basis[k].coeffs):
            acc[j] += a * b
    return Polynomial(tuple(acc))


def norm(p: Polynomial, n: int, precision: int = DEFAULT_NORM_BITS):
    """
    Weighted tau-norm ||p||_n = Σ |a_i| (pi/2)^(n-i).

    Args:
        p: polynomial of degree at most n
        n: norm index
        precision: working precision in bits

    Returns:
        mpf value of the norm

    Raises:
        DomainError: deg p > n
    """
    if p.degree > n:
        raise DomainError(f"norm index {n} below polynomial degree {p.degree}")
    expansion = to_tau(p)
    with mp.workprec(precision):
        half_pi = mp.pi / 2
        total = mp.mpf(0)
        for i, a in expansion.nonzero():
            total += abs(mp.mpf(a.numerator) / a.denominator) * half_pi ** (n - i)
        return +total
