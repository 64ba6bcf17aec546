"""
Numeric evaluation of polynomial d-series
"""
from typing import List, Tuple, Union

from mpmath import mp

from errors import DomainError
from models.series import DSeries

Truncation = Union[int, str]
OPTIMAL = "optimal"


def series_terms(S: DSeries, d, u) -> List:
    """S_n(u) d^n for every n, as mpf"""
    if abs(u) >= 1:
        raise DomainError(f"|u| must be below 1, got {mp.nstr(u, 8)}")
    if d <= 0:
        raise DomainError(f"d must be positive, got {mp.nstr(d, 8)}")
    return [c.evaluate(u) * d ** n if not c.is_zero() else mp.mpf(0) for n, c in enumerate(S.coeffs)]


def optimal_truncation(S: DSeries, d, u) -> int:
    """Index of the smallest nonzero term; the least-term rule for Gevrey series"""
    terms = series_terms(S, d, u)
    nonzero = [(abs(t), n) for n, t in enumerate(terms) if t != 0]
    if not nonzero:
        return 0
    return min(nonzero)[1]


def eval_series(S: DSeries, d, u, truncation: Truncation = OPTIMAL):
    """
    Σ_{n <= K} S_n(u) d^n by Horner in d.

    Args:
        S: series to evaluate
        d: positive big-float
        u: big-float with |u| < 1
        truncation: last included power K, or "optimal" for the least-term index

    Raises:
        DomainError: |u| >= 1 or d <= 0
    """
    d = mp.mpf(d)
    u = mp.mpf(u)
    if truncation == OPTIMAL:
        last = optimal_truncation(S, d, u)
    else:
        last = min(int(truncation), S.order)
        if abs(u) >= 1:
            raise DomainError(f"|u| must be below 1, got {mp.nstr(u, 8)}")
        if d <= 0:
            raise DomainError(f"d must be positive, got {mp.nstr(d, 8)}")
    acc = mp.mpf(0)
    for n in range(last, -1, -1):
        acc = acc * d + S.coeffs[n].evaluate(u)
    return acc


def separatrix_angle(t, eps, d):
    """q_0 in the scaled time: 4 arctan(exp(-d t / eps))"""
    return 4 * mp.atan(mp.exp(-d * t / eps))


def xi_minus(A: DSeries, t, eps, d, truncation: Truncation = OPTIMAL):
    """sqrt(1 - u^2) A(d, u) + q_0d(t) with u = tanh(d t / eps)"""
    u = mp.tanh(d * t / eps)
    return mp.sqrt(1 - u * u) * eval_series(A, d, u, truncation) + separatrix_angle(t, eps, d)


def xi_plus(A: DSeries, t, eps, d, truncation: Truncation = OPTIMAL):
    """Unstable-side branch through the reversibility xi_+(t) = 2pi - xi_-(-t)"""
    return 2 * mp.pi - xi_minus(A, -t, eps, d, truncation)


def discrete_momentum(xi, t, eps) -> Tuple:
    """(xi(t), (xi(t) - xi(t - eps)) / eps) for a position function xi"""
    q = xi(t)
    return q, (q - xi(t - eps)) / eps
