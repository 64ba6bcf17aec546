"""
Invariant manifolds of the saddles by the parameterization method

sigma(s) = z* + Σ c_k s^k is solved order by order from Φ(sigma(s)) = sigma(lam s).
With X the q-deviation, sin(q* + X) = sin X because q* is a multiple of 2pi,
and sin X, cos X are carried as Taylor series through
    k S_k = Σ j x_j C_{k-j},   k C_k = -Σ j x_j S_{k-j}.
"""
import time
from dataclasses import dataclass
from typing import List

import structlog
from mpmath import mp

from errors import DomainError, ManifoldError
from models.config import PrecisionConfig
from models.dynamics import ManifoldBranch, ManifoldSeries, PhasePoint
from dynamics.standard_map import (
    fixed_point_data, map_backward, map_forward, modified_energy,
)

logger = structlog.get_logger(__name__)

MAX_ORBIT_STEPS = 100000


def manifold_series(eps, which: ManifoldBranch, cfg: PrecisionConfig) -> ManifoldSeries:
    """
    Taylor parameterization of one branch through order cfg.manifold_order.

    Args:
        eps: step size, positive
        which: unstable manifold of B or stable manifold of A
        cfg: working precision, order and seed margin

    Raises:
        ManifoldError: a homological system (J - lam^k I) is numerically singular
    """
    started = time.time()
    with mp.workprec(cfg.bits):
        eps = mp.mpf(eps)
        data = fixed_point_data(eps, which.fixed_point)
        index = 1 if which.is_unstable else 0
        lam = data.eigenvalues[index]
        lam_inv = data.eigenvalues[1 - index]
        J = data.jacobian
        eps2 = eps * eps
        singular = mp.mpf(2) ** (-cfg.bits // 2)

        xs = [mp.mpf(0)]
        sin_coeffs = [mp.mpf(0)]
        cos_coeffs = [mp.mpf(1)]
        coeffs = []
        for k in range(1, cfg.manifold_order + 1):
            N_k = mp.fsum(j * xs[j] * cos_coeffs[k - j] for j in range(1, k)) / k
            if k == 1:
                x_k, p_k = data.eigenvectors[index]
            else:
                lam_k = lam ** k
                det = (lam_k - lam) * (lam_k - lam_inv)
                if abs(det) < singular:
                    raise ManifoldError(f"homological equation singular at order {k}")
                lhs = J - lam_k * mp.eye(2)
                solution = mp.lu_solve(lhs, mp.matrix([-eps2 * N_k, -eps * N_k]))
                x_k, p_k = solution[0], solution[1]
            xs.append(x_k)
            sin_coeffs.append(x_k + N_k)
            cos_coeffs.append(-mp.fsum(j * xs[j] * sin_coeffs[k - j] for j in range(1, k + 1)) / k)
            coeffs.append((x_k, p_k))

        # sigma is odd in s, so every even coefficient vanishes; size the seed on the last nonzero one
        last = max((k for k, c in enumerate(coeffs, start=1) if c[0] != 0 or c[1] != 0), default=0)
        if last == 0:
            raise ManifoldError("parameterization has no nonzero coefficient")
        top = max(abs(coeffs[last - 1][0]), abs(coeffs[last - 1][1]))
        target = mp.mpf(2) ** (-cfg.bits + cfg.seed_margin_bits)
        seed = (target / top) ** (mp.mpf(1) / last)

        ms = ManifoldSeries(
            branch=which,
            fixed_point=data.point,
            multiplier=lam,
            coeffs=tuple(coeffs),
            epsilon=eps,
            bits=cfg.bits,
            seed=seed,
        )
    logger.debug("manifold_built", which=which.value, order=cfg.manifold_order,
                 seed=mp.nstr(seed, 6), elapsed_ms=round((time.time() - started) * 1000, 1))
    return ms


def evaluate(ms: ManifoldSeries, s) -> PhasePoint:
    """sigma(s)"""
    q_poly = [c[0] for c in reversed(ms.coeffs)] + [0]
    p_poly = [c[1] for c in reversed(ms.coeffs)] + [0]
    return PhasePoint(ms.fixed_point.q + mp.polyval(q_poly, s), ms.fixed_point.p + mp.polyval(p_poly, s))


def conjugacy_residual(ms: ManifoldSeries, s):
    """max-norm of sigma(lam s) - Φ(sigma(s))"""
    with mp.workprec(ms.bits):
        s = mp.mpf(s)
        lhs = evaluate(ms, ms.multiplier * s)
        rhs = map_forward(evaluate(ms, s), ms.epsilon)
        return max(abs(lhs.q - rhs.q), abs(lhs.p - rhs.p))


@dataclass
class ManifoldCrossing:
    """Point of a manifold branch with a prescribed q"""
    point: PhasePoint
    parameter: object
    iterations: int


def _branch_direction(ms: ManifoldSeries):
    # Primary branch: q decreases from B (s < 0) and increases from A (s > 0)
    sign = -1 if ms.branch.is_unstable else 1
    step = map_forward if ms.branch.is_unstable else map_backward
    growth = ms.multiplier if ms.branch.is_unstable else 1 / ms.multiplier
    return sign, step, growth


def _past(ms: ManifoldSeries, q, q_target) -> bool:
    """True once the orbit has reached q_target moving away from its saddle"""
    return q <= q_target if ms.branch.is_unstable else q >= q_target


def _check_target(q_target) -> None:
    if not 0 < q_target < 2 * mp.pi:
        raise DomainError(f"target q must lie strictly between the saddles, got {mp.nstr(q_target, 8)}")


def locate(ms: ManifoldSeries, q_target, eps, cfg: PrecisionConfig) -> ManifoldCrossing:
    """
    Point of the branch with first coordinate q_target.

    Seeds at s0 where the series truncation is below the working precision,
    iterates away from the saddle until the orbit passes q_target, then
    bisects the parameter over one fundamental domain [s0/g, s0], g being the
    expansion factor of the iteration.

    Raises:
        DomainError: q_target outside (0, 2pi)
        ManifoldError: the orbit leaves the primary branch or the bracket is not monotone
    """
    with mp.workprec(cfg.bits):
        q_target = mp.mpf(q_target)
        eps = mp.mpf(eps)
        _check_target(q_target)
        sign, step, growth = _branch_direction(ms)
        s0 = sign * ms.seed

        def advance(s, count: int) -> PhasePoint:
            z = evaluate(ms, s)
            for _ in range(count):
                z = step(z, eps)
            return z

        z = evaluate(ms, s0)
        m = 0
        if _past(ms, z.q, q_target):
            low, high = mp.mpf(0), s0
        else:
            while not _past(ms, z.q, q_target):
                z = step(z, eps)
                m += 1
                if m > MAX_ORBIT_STEPS or not 0 < z.q < 2 * mp.pi or z.p > 0:
                    raise ManifoldError(f"orbit left the primary branch after {m} steps")
            low, high = s0 / growth, s0

        def offset(s):
            if s == 0:
                return ms.fixed_point.q - q_target
            return advance(s, m).q - q_target

        if offset(low) * offset(high) > 0:
            raise ManifoldError("target q is not bracketed by the fundamental domain")

        try:
            s_final = mp.findroot(offset, (low, high), solver='bisect', maxsteps=cfg.bits + 32)
        except ValueError as e:
            raise ManifoldError(f"bisection did not converge: {e}") from e
        point = advance(s_final, m)
        return ManifoldCrossing(point=point, parameter=s_final, iterations=m)


def p_on_manifold_at_q(ms: ManifoldSeries, q_target, eps, cfg: PrecisionConfig):
    """p-coordinate of the branch point above q_target"""
    return locate(ms, q_target, eps, cfg).point.p


def manifold_orbit(ms: ManifoldSeries, q_stop, eps, cfg: PrecisionConfig) -> List[PhasePoint]:
    """Orbit from the seed point until it passes q_stop"""
    with mp.workprec(cfg.bits):
        eps = mp.mpf(eps)
        q_stop = mp.mpf(q_stop)
        _check_target(q_stop)
        sign, step, _ = _branch_direction(ms)
        z = evaluate(ms, sign * ms.seed)
        orbit = [z]
        while not _past(ms, z.q, q_stop):
            z = step(z, eps)
            if len(orbit) > MAX_ORBIT_STEPS:
                raise ManifoldError("orbit did not reach the stopping q")
            orbit.append(z)
        return orbit


def energy_drift(ms: ManifoldSeries, q_stop, eps, cfg: PrecisionConfig):
    """max |H~ - 1| along the branch orbit up to q_stop, H~ the modified energy"""
    with mp.workprec(cfg.bits):
        orbit = manifold_orbit(ms, q_stop, eps, cfg)
        return max(abs(modified_energy(z, mp.mpf(eps)) - 1) for z in orbit)
