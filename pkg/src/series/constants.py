"""
Splitting constants from the tail of the formal series

A = U + F, F = Q G and J = Q1 S(G). The coefficients of E = S(J/d) split as

    -E_n = alpha_n (n-1)! (i/2pi)^(n-1) tau_n
         + beta_{n-2} (n-3)! (i/2pi)^(n-3) tau_{n-2}
         + gamma_{n-4} (n-5)! (i/2pi)^(n-5) tau_{n-4} + lower

for odd n >= 11, and J_n ~ -alpha (n-2)! (i/2pi)^(n-1) tau_{n-1}. With this
sign alpha > 0, and the measured splitting is +C sin(2 pi t / eps) with C > 0.
"""
import math
import time
from dataclasses import replace
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Tuple

import structlog
from mpmath import mp

from algebra.tau_basis import DEFAULT_NORM_BITS, norm, to_tau
from errors import InsufficientOrderError, ParityViolationError, RecurrenceError
from models.polynomial import Parity, Polynomial
from models.results import ConstantEstimates, FormalSolution
from models.series import DSeries
from series.extrapolation import accelerate
from series.operators import op_S

logger = structlog.get_logger(__name__)

MIN_SOLUTION_ORDER = 14
MIN_J_ORDER = 25
ALPHA_FIRST = 11
BETA_FIRST = 9
GAMMA_FIRST = 7

# Leading error exponents of the partial sums (alpha_n = O(n^-7), beta_n = O(n^-5), gamma_n = O(n^-3))
SUM_POWERS = {"alpha": (6, 7), "beta": (4, 5), "gamma": (2, 3)}
DIRECT_POWERS = (6, 7)

F_ = Fraction


def _poly(terms: Dict[int, Fraction]) -> Polynomial:
    width = max(terms) + 1
    return Polynomial(tuple(terms.get(k, F_(0)) for k in range(width)))


def _series(order: int, terms: Dict[int, Polynomial]) -> DSeries:
    return DSeries.from_terms(order, terms, d_parity=Parity.EVEN, bounded_degree=True)


@lru_cache(maxsize=1)
def decomposition_series() -> Tuple[DSeries, DSeries, DSeries, DSeries]:
    """
    The fixed rational series U, Q, Q1, V1 of the decomposition.

    U is the initial part A_1 d^2 + A_3 d^4 + A_5 d^6 of the formal solution;
    Q and Q1 factor F = A - U and J; V1 is the companion normalizer of Q1.
    """
    U = DSeries.from_terms(6, {
        2: _poly({1: F_(-1, 4)}),
        4: _poly({3: F_(91, 864), 1: F_(-47, 576)}),
        6: _poly({5: F_(-319, 2880), 3: F_(185, 1152), 1: F_(-3703, 69120)}),
    }, d_parity=Parity.EVEN, u_parity=Parity.ODD, bounded_degree=True)

    Q = _series(6, {
        0: _poly({0: F_(1)}),
        2: _poly({0: F_(1, 4), 2: F_(-1, 4)}),
        4: _poly({4: F_(91, 432), 2: F_(-13, 48), 0: F_(13, 216)}),
        6: _poly({6: F_(-319, 960), 4: F_(1079, 1728), 2: F_(-937, 2880), 0: F_(287, 8640)}),
    })

    one_minus_u2 = _poly({0: F_(1), 2: F_(-1)})
    Q1 = _series(8, {
        2: _poly({2: F_(1), 0: F_(-1)}),
        4: _poly({0: F_(1, 4), 4: F_(-1, 4)}),
        6: one_minus_u2 * _poly({4: F_(4, 9), 2: F_(1), 0: F_(1)}).scale(F_(-5, 48)),
        8: one_minus_u2 * _poly({6: F_(-367, 2160), 4: F_(185, 432), 2: F_(-997, 4320)}),
    })

    V1 = _series(6, {
        0: _poly({0: F_(1)}),
        2: one_minus_u2,
        4: _poly({4: F_(-71, 432), 2: F_(-1, 12), 0: F_(107, 432)}),
        6: _poly({6: F_(1351, 2160), 4: F_(-193, 144), 2: F_(49, 60), 0: F_(-11, 108)}),
    })
    return U, Q, Q1, V1


def _derive(sol: FormalSolution) -> Tuple[DSeries, DSeries, DSeries]:
    if sol.order < MIN_SOLUTION_ORDER:
        raise InsufficientOrderError("J needs the formal solution beyond its initial part", MIN_SOLUTION_ORDER)

    U, Q, Q1, _ = decomposition_series()
    # J_{N+3} only involves G through d^N: Q1 = O(d^2) and S raises the power by at least one
    top = sol.order + 3
    A = sol.A.pad(top)
    for n in range(U.order + 1):
        if A.coeffs[n] != U.coeffs[n]:
            raise RecurrenceError(f"formal solution differs from the initial part at d^{n}")

    F = A - U.pad(top)
    G = F.divide(Q.pad(top))
    if G.valuation() is not None and G.valuation() < 8:
        raise ParityViolationError(f"G starts at d^{G.valuation()}, expected d^8")

    raw_J = Q1.pad(top) * op_S(G)
    J = DSeries(raw_J.coeffs, d_parity=Parity.ODD, u_parity=Parity.EVEN)
    for n, c in J.nonzero_terms():
        if c.degree > n - 1:
            raise ParityViolationError(f"J_{n} has degree {c.degree} > {n - 1}")
    valuation = J.valuation()
    if valuation is not None and valuation < 11:
        raise ParityViolationError(f"J starts at d^{valuation}, expected d^11")
    return F.truncate(sol.order), G.truncate(sol.order), J


def compute_J(sol: FormalSolution) -> DSeries:
    """
    J = Q1 S(G) with G = (A - U)/Q, computed through d^(order+3).

    Raises:
        InsufficientOrderError: solution order below 14
        ParityViolationError: J is not even in u and odd in d, starts below d^11,
            or has a coefficient of degree >= its index
    """
    return _derive(sol)[2]


def derive_series(sol: FormalSolution) -> FormalSolution:
    """The solution with F, G and J attached"""
    F, G, J = _derive(sol)
    return replace(sol, F=F, G=G, J=J)


def _tau_scale(k: int, factorial_arg: int):
    """1 / (-(factorial_arg)! (i/2pi)^k) for even k"""
    return -(2 * mp.pi) ** k * (-1) ** (k // 2) / mp.factorial(factorial_arg)


def _as_mpf(c: Fraction):
    return mp.mpf(c.numerator) / c.denominator


def extract_constants(J: DSeries, precision: int = DEFAULT_NORM_BITS) -> ConstantEstimates:
    """
    Read alpha_n, beta_n, gamma_n from E = S(J/d) and sum them.

    The sums are alpha = 4 Σ alpha_n (and likewise for beta, gamma), the
    normalization under which a J built from the leading template alone
    returns its own constant. An independent estimate reads alpha from the
    top tau-coefficient of each J_n.

    Args:
        J: odd-in-d series starting at d^11
        precision: working precision in bits

    Returns:
        ConstantEstimates with the raw sequences and accelerated sums

    Raises:
        InsufficientOrderError: J known to fewer than 25 orders
    """
    if J.order < MIN_J_ORDER:
        raise InsufficientOrderError(f"J has order {J.order}", MIN_J_ORDER)

    started = time.time()
    J_over_d = J.shift_down(1)
    if J.order % 2 == 1:
        # J/d is even in d, so its next coefficient vanishes
        J_over_d = J_over_d.pad(J.order)
    E = op_S(J_over_d)

    with mp.workprec(precision):
        alpha_seq: Dict[int, object] = {}
        beta_seq: Dict[int, object] = {}
        gamma_seq: Dict[int, object] = {}
        for n in range(ALPHA_FIRST, E.order + 1, 2):
            expansion = to_tau(E.coeffs[n])
            alpha_seq[n] = _as_mpf(expansion.coefficient(n)) * _tau_scale(n - 1, n - 1)
            if n - 2 >= BETA_FIRST:
                beta_seq[n - 2] = _as_mpf(expansion.coefficient(n - 2)) * _tau_scale(n - 3, n - 3)
            if n - 4 >= GAMMA_FIRST:
                gamma_seq[n - 4] = _as_mpf(expansion.coefficient(n - 4)) * _tau_scale(n - 5, n - 5)

        direct_seq: Dict[int, object] = {}
        for n in range(ALPHA_FIRST, J.order + 1, 2):
            top = to_tau(J.coeffs[n]).coefficient(n - 1)
            direct_seq[n] = _as_mpf(top) * _tau_scale(n - 1, n - 2)

        alpha = _summed(alpha_seq, SUM_POWERS["alpha"])
        beta = _summed(beta_seq, SUM_POWERS["beta"])
        gamma = _summed(gamma_seq, SUM_POWERS["gamma"])
        direct = accelerate(list(direct_seq.values()), list(direct_seq), DIRECT_POWERS)

    logger.info("constants_extracted", alpha=mp.nstr(alpha.value, 10), error=mp.nstr(alpha.error, 3),
                alpha_direct=mp.nstr(direct.value, 10), terms=len(alpha_seq),
                elapsed_ms=round((time.time() - started) * 1000, 1))
    return ConstantEstimates(
        precision=precision,
        alpha_seq=alpha_seq,
        beta_seq=beta_seq,
        gamma_seq=gamma_seq,
        alpha=alpha,
        beta=beta,
        gamma=gamma,
        alpha_direct_seq=direct_seq,
        alpha_direct=direct,
    )


def _summed(seq: Dict[int, object], powers: Tuple[int, int]):
    nodes = list(seq)
    partial: List = []
    running = mp.mpf(0)
    for n in nodes:
        running += seq[n]
        partial.append(4 * running)
    return accelerate(partial, nodes, powers)


def leading_coefficient_alpha(J: DSeries, n: int, precision: int = DEFAULT_NORM_BITS):
    """alpha read from the top tau-coefficient of J_n for one odd n >= 11"""
    if n % 2 == 0 or n < ALPHA_FIRST:
        raise ValueError(f"leading coefficient read needs odd n >= {ALPHA_FIRST}, got {n}")
    with mp.workprec(precision):
        top = to_tau(J.coefficient(n)).coefficient(n - 1)
        return _as_mpf(top) * _tau_scale(n - 1, n - 2)


def gevrey_profile(S: DSeries, precision: int = DEFAULT_NORM_BITS, shift: int = 0) -> List:
    """
    g_n = ||S_n||_n (2pi)^n / (n - shift)!; bounded for a Gevrey-1 series
    of type 2pi when shift = 0.
    """
    profile = []
    with mp.workprec(precision):
        two_pi = 2 * mp.pi
        for n, c in enumerate(S.coeffs):
            if c.is_zero() or n < shift:
                profile.append(mp.mpf(0))
                continue
            profile.append(norm(c, n, precision) * two_pi ** n / math.factorial(n - shift))
    return profile
