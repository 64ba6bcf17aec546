"""
The discretized pendulum

    p' = p + eps sin q
    q' = q + eps p'

Every function expects to run inside an mp.workprec block set by the caller.
"""
from typing import Tuple

from mpmath import mp

from errors import DomainError, ManifoldError
from models.dynamics import FixedPointData, FixedPointLabel, PhasePoint

FIXED_POINT_Q = {FixedPointLabel.A: 0, FixedPointLabel.B: 2}   # multiples of pi


def _check_eps(eps) -> None:
    if not eps > 0:
        raise DomainError(f"epsilon must be positive, got {eps}")


def map_forward(z: PhasePoint, eps) -> PhasePoint:
    """One step; p is updated first and the new p moves q"""
    p = z.p + eps * mp.sin(z.q)
    return PhasePoint(z.q + eps * p, p)


def map_backward(z: PhasePoint, eps) -> PhasePoint:
    """Explicit inverse of map_forward"""
    q = z.q - eps * z.p
    return PhasePoint(q, z.p - eps * mp.sin(q))


def d_of_eps(eps):
    """d = 2 arcsinh(eps/2), the logarithm of the saddle multiplier"""
    _check_eps(eps)
    eps = mp.mpf(eps)
    return 2 * mp.log(eps / 2 + mp.sqrt(1 + eps * eps / 4))


def eps_of_d(d):
    return 2 * mp.sinh(mp.mpf(d) / 2)


def jacobian(z: PhasePoint, eps):
    """Derivative of map_forward in (q, p) coordinates"""
    c = mp.cos(z.q)
    return mp.matrix([[1 + eps * eps * c, eps], [eps * c, 1]])


def fixed_point(label: FixedPointLabel) -> PhasePoint:
    return PhasePoint(FIXED_POINT_Q[label] * mp.pi, mp.mpf(0))


def _unit_eigenvector(eps, lam) -> Tuple:
    # (J - lam I) v = 0 for v = (eps, lam - 1 - eps^2); q-component positive
    q, p = mp.mpf(eps), lam - 1 - eps * eps
    length = mp.sqrt(q * q + p * p)
    return q / length, p / length


def fixed_point_data(eps, which: FixedPointLabel) -> FixedPointData:
    """
    Jacobian, multipliers and unit eigenvectors at saddle A or B.

    Raises:
        ManifoldError: the multipliers disagree with e^(±d) at working precision
    """
    _check_eps(eps)
    eps = mp.mpf(eps)
    point = fixed_point(which)
    J = jacobian(point, eps)
    trace = J[0, 0] + J[1, 1]
    root = mp.sqrt(trace * trace - 4)
    lam_stable, lam_unstable = (trace - root) / 2, (trace + root) / 2

    d = d_of_eps(eps)
    tolerance = mp.mpf(2) ** (-mp.prec + 8)
    if abs(lam_unstable / mp.exp(d) - 1) > tolerance or abs(lam_stable / mp.exp(-d) - 1) > tolerance:
        raise ManifoldError(f"saddle multipliers at {which.value} disagree with e^(±d)")

    return FixedPointData(
        label=which,
        point=point,
        jacobian=J,
        eigenvalues=(lam_stable, lam_unstable),
        eigenvectors=(_unit_eigenvector(eps, lam_stable), _unit_eigenvector(eps, lam_unstable)),
    )


def energy(z: PhasePoint):
    """Pendulum energy p^2/2 + cos q; equals 1 at the saddles"""
    return z.p * z.p / 2 + mp.cos(z.q)


def modified_energy(z: PhasePoint, eps):
    """First-order modified energy of the scheme, conserved to O(eps^3) per step"""
    return energy(z) + eps / 2 * z.p * mp.sin(z.q)


def separatrix_momentum(q):
    """p on the continuous-time separatrix through q"""
    return -2 * mp.sin(q / 2)
