"""
Vertical splitting of the manifolds and its exponentially small law

At the point of the unstable manifold of B and of the stable manifold of A
with first coordinate q_0(t) = 4 arctan(e^-t), the momenta differ by

    (4 pi alpha / eps^2) cosh(t) sin(2 pi t / eps) e^(-pi^2/eps) + O(eps^-1 e^(-pi^2/eps))
"""
import math
import time
from typing import List, Literal, Optional, Tuple

import structlog
from mpmath import mp

from errors import DomainError, PrecisionGuardError
from models.config import PrecisionConfig
from models.dynamics import ManifoldBranch, ManifoldSeries, SplittingReport
from models.results import FormalSolution
from series.evaluation import OPTIMAL, Truncation, discrete_momentum, optimal_truncation, xi_minus, xi_plus
from dynamics.manifolds import manifold_series, p_on_manifold_at_q
from dynamics.standard_map import d_of_eps

logger = structlog.get_logger(__name__)

T_WINDOW = mp.mpf(4) / 3
SAMPLES_PER_PERIOD = 16
FIT_WARNING_RATIO = 0.2

Normalization = Literal["eps", "d"]


def required_bits(eps) -> int:
    """Bits keeping the splitting signal 64 bits above evaluation noise"""
    eps = float(eps)
    return math.ceil(3.5 * (math.pi ** 2 / eps) / math.log(2) + 64)


def precision_guard(eps, cfg: PrecisionConfig) -> None:
    """
    Raises:
        PrecisionGuardError: cfg.bits below the requirement at eps
    """
    needed = required_bits(eps)
    if cfg.bits < needed:
        logger.warning("precision_guard_refused", epsilon=str(eps), required=needed, available=cfg.bits)
        raise PrecisionGuardError(str(eps), needed, cfg.bits)


def q0(t):
    """Separatrix angle 4 arctan(e^-t)"""
    return 4 * mp.atan(mp.exp(-t))


def _check_window(t) -> None:
    if abs(t) > T_WINDOW:
        raise DomainError(f"|t| must not exceed 4/3, got {mp.nstr(t, 8)}")


def build_manifolds(eps, cfg: PrecisionConfig) -> Tuple[ManifoldSeries, ManifoldSeries]:
    """(unstable manifold of B, stable manifold of A)"""
    return (manifold_series(eps, ManifoldBranch.UNSTABLE_AT_B, cfg),
            manifold_series(eps, ManifoldBranch.STABLE_AT_A, cfg))


def vertical_distance(eps, t, cfg: PrecisionConfig,
                      manifolds: Optional[Tuple[ManifoldSeries, ManifoldSeries]] = None):
    """
    p_unstable(q_0(t)) - p_stable(q_0(t)).

    Raises:
        DomainError: |t| > 4/3
    """
    with mp.workprec(cfg.bits):
        t = mp.mpf(t)
        _check_window(t)
        unstable, stable = manifolds or build_manifolds(eps, cfg)
        target = q0(t)
        return p_on_manifold_at_q(unstable, target, eps, cfg) - p_on_manifold_at_q(stable, target, eps, cfg)


def splitting_law(t, eps, alpha, normalization: Normalization = "eps"):
    """
    Leading splitting law.

    "eps": (4 pi alpha / eps^2) cosh(t) sin(2 pi t / eps) e^(-pi^2/eps)
    "d":   (4 pi alpha / d^2) cosh(d t / eps) sin(2 pi t / eps) e^(-pi^2/d)
    """
    eps = mp.mpf(eps)
    t = mp.mpf(t)
    oscillation = mp.sin(2 * mp.pi * t / eps)
    if normalization == "eps":
        return 4 * mp.pi * alpha / eps ** 2 * mp.cosh(t) * oscillation * mp.exp(-mp.pi ** 2 / eps)
    if normalization == "d":
        d = d_of_eps(eps)
        return 4 * mp.pi * alpha / d ** 2 * mp.cosh(d * t / eps) * oscillation * mp.exp(-mp.pi ** 2 / d)
    raise ValueError(f"unknown normalization '{normalization}'")


def law_amplitude(eps, alpha):
    """Envelope (4 pi alpha / eps^2) e^(-pi^2/eps) of the leading law"""
    eps = mp.mpf(eps)
    return 4 * mp.pi * alpha / eps ** 2 * mp.exp(-mp.pi ** 2 / eps)


def _zeros(ts: List, ys: List) -> List:
    """Zeros of a sampled function by linear interpolation between sign changes"""
    zeros = []
    for i in range(len(ts)):
        if ys[i] == 0:
            zeros.append(ts[i])
        elif i + 1 < len(ts) and ys[i + 1] != 0 and (ys[i] > 0) != (ys[i + 1] > 0):
            zeros.append(ts[i] - ys[i] * (ts[i + 1] - ts[i]) / (ys[i + 1] - ys[i]))
    return zeros


def splitting_scan(eps, cfg: PrecisionConfig, alpha=None, periods: int = 2) -> SplittingReport:
    """
    Sample Delta(t)/cosh(t) over [-eps, eps], fit C sin(2 pi t/eps + phi) by linear
    least squares in the (sin, cos) components, and derive the implied alpha.

    Args:
        eps: step size
        cfg: precision settings; must pass the precision guard
        alpha: series value of alpha used for the predicted amplitude, optional
        periods: number of oscillation periods covered by the window

    Raises:
        PrecisionGuardError: cfg.bits too low for eps
    """
    precision_guard(eps, cfg)
    started = time.time()
    with mp.workprec(cfg.bits):
        eps = mp.mpf(eps)
        d = d_of_eps(eps)
        manifolds = build_manifolds(eps, cfg)
        built = time.time()

        count = SAMPLES_PER_PERIOD * periods + 1
        ts = [-eps * periods / 2 + eps * periods * i / (count - 1) for i in range(count)]
        deltas = [vertical_distance(eps, t, cfg, manifolds) for t in ts]
        ys = [delta / mp.cosh(t) for t, delta in zip(ts, deltas)]
        sampled = time.time()

        omega = 2 * mp.pi / eps
        design = mp.matrix([[mp.sin(omega * t), mp.cos(omega * t)] for t in ts])
        solution, residual_norm = mp.qr_solve(design, mp.matrix(ys))
        a, b = solution[0], solution[1]
        amplitude = mp.sqrt(a * a + b * b)
        phase = mp.atan2(b, a)
        fitted = [a * mp.sin(omega * t) + b * mp.cos(omega * t) for t in ts]
        residuals = [y - f for y, f in zip(ys, fitted)]
        rms = residual_norm / mp.sqrt(count)

        report = SplittingReport(
            epsilon=eps,
            d=d,
            bits=cfg.bits,
            samples=list(zip(ts, deltas)),
            fitted_amplitude=amplitude,
            fitted_phase=phase,
            implied_alpha_eps=amplitude * eps ** 2 * mp.exp(mp.pi ** 2 / eps) / (4 * mp.pi),
            implied_alpha_d=amplitude * d ** 2 * mp.exp(mp.pi ** 2 / d) / (4 * mp.pi),
            fit_residual=rms,
            fit_residuals=residuals,
        )

        if amplitude == 0 or rms / amplitude > FIT_WARNING_RATIO:
            report.warnings.append(
                f"degraded fit: rms residual {mp.nstr(rms, 4)} vs amplitude {mp.nstr(amplitude, 4)}")

        zeros = _zeros(ts, deltas)
        if len(zeros) >= 2:
            report.zero_spacing = (zeros[-1] - zeros[0]) / (len(zeros) - 1)
        if zeros:
            nearest = min(zeros, key=abs)
            report.crossing_q = q0(nearest)

        if alpha is not None:
            report.predicted_amplitude = law_amplitude(eps, alpha)
            report.law_ratio = amplitude / report.predicted_amplitude
            report.scale_ratio = report.max_abs_delta() / report.predicted_amplitude

    finished = time.time()
    report.timings = {
        'manifolds_ms': (built - started) * 1000,
        'sampling_ms': (sampled - built) * 1000,
        'total_ms': (finished - started) * 1000,
    }
    logger.info("splitting_scan_done", epsilon=mp.nstr(eps, 6), amplitude=mp.nstr(amplitude, 8),
                implied_alpha=mp.nstr(report.implied_alpha_eps, 8), warnings=len(report.warnings))
    return report


def _series_position(sol: FormalSolution, branch: ManifoldBranch, eps, d, truncation: int):
    xi = xi_plus if branch.is_unstable else xi_minus

    def position(s):
        return xi(sol.A, s, eps, d, truncation)
    return position


def series_momentum_at_q(sol: FormalSolution, q_target, eps, branch: ManifoldBranch = ManifoldBranch.STABLE_AT_A,
                         truncation: Truncation = OPTIMAL):
    """
    Momentum (xi(t') - xi(t' - eps)) / eps predicted by the formal series at the
    time t' where xi(t') = q_target.
    """
    eps = mp.mpf(eps)
    d = d_of_eps(eps)
    q_target = mp.mpf(q_target)
    # Scaled time of the continuous separatrix through q_target; the same on both branches
    guess = -mp.log(mp.tan(q_target / 4)) * eps / d
    if truncation == OPTIMAL:
        u = mp.tanh(d * (-guess if branch.is_unstable else guess) / eps)
        if u == 0:
            u = mp.mpf(2) ** (-mp.prec // 2)
        truncation = optimal_truncation(sol.A, d, u)
    position = _series_position(sol, branch, eps, d, int(truncation))
    t_star = mp.findroot(lambda s: position(s) - q_target, guess)
    return discrete_momentum(position, t_star, eps)[1]


def series_vs_manifold(eps, t, sol: FormalSolution, cfg: PrecisionConfig,
                       manifold: Optional[ManifoldSeries] = None, truncation: Truncation = OPTIMAL,
                       branch: ManifoldBranch = ManifoldBranch.STABLE_AT_A):
    """
    |p predicted by the formal series - p of the computed manifold| at q_0(t).

    Raises:
        DomainError: |t| > 4/3
    """
    with mp.workprec(cfg.bits):
        t = mp.mpf(t)
        _check_window(t)
        eps = mp.mpf(eps)
        target = q0(t)
        if manifold is None:
            manifold = manifold_series(eps, branch, cfg)
        p_series = series_momentum_at_q(sol, target, eps, branch, truncation)
        p_numeric = p_on_manifold_at_q(manifold, target, eps, cfg)
        return abs(p_series - p_numeric)
