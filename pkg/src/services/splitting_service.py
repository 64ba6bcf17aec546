"""
Splitting Lab Service
Ties the series engine, the dynamics engine and the invariant suite together
"""
import time
import threading
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

import structlog
from mpmath import mp

from algebra import tau_basis
from dynamics.splitting import law_amplitude, splitting_scan
from errors import SplittingLabError
from models.config import PrecisionConfig, RunConfig
from models.polynomial import Polynomial
from models.results import ConstantEstimates, FormalSolution, PropertyCheck
from series import operators
from series.constants import derive_series, extract_constants
from series.recurrence import formal_solution
from services.validation import ValidationSettings, run_validation

logger = structlog.get_logger(__name__)

REFERENCE_ALPHA = mp.mpf("89.0334")
# Largest relative gaps |implied - series| / |series| accepted at the smallest epsilon
IMPLIED_EPS_TOLERANCE = 0.3
IMPLIED_D_TOLERANCE = 0.15
# Measured amplitude and max|Delta| must lie within this factor of the law envelope
SCALE_FACTOR = 3


def _within_factor(ratio) -> bool:
    return ratio is not None and 1 / mp.mpf(SCALE_FACTOR) <= ratio <= SCALE_FACTOR


def assess(entries: List[Dict[str, Any]], alpha) -> Tuple[List[Dict[str, Any]], str]:
    """
    Rows of implied alpha against the series alpha, and the verdict.

    'consistent' requires all of: the eps-normalized gap never grows as epsilon
    decreases, the gaps at the smallest epsilon stay within the eps/d tolerances,
    and every fitted amplitude and max|Delta| lies within SCALE_FACTOR of
    (4 pi alpha / eps^2) e^(-pi^2/eps). 'insufficient' when no epsilon produced
    a report.
    """
    rows = []
    for entry in entries:
        if 'error' in entry:
            rows.append({'epsilon': entry['epsilon'], 'error': entry['error']})
            continue
        report = entry['report']
        with mp.workprec(report.bits):
            envelope = law_amplitude(report.epsilon, alpha)
            rows.append({
                'epsilon': entry['epsilon'],
                'implied_alpha_eps': report.implied_alpha_eps,
                'implied_alpha_d': report.implied_alpha_d,
                'relative_gap': abs(report.implied_alpha_eps - alpha) / abs(alpha),
                'relative_gap_d': abs(report.implied_alpha_d - alpha) / abs(alpha),
                'law_ratio': report.fitted_amplitude / envelope,
                'scale_ratio': report.max_abs_delta() / envelope,
                'degraded': report.degraded,
            })

    measured = [row for row in rows if 'relative_gap' in row]
    if not measured:
        return rows, 'insufficient'
    gaps = [row['relative_gap'] for row in measured]
    last = measured[-1]
    consistent = (
        all(b <= a for a, b in zip(gaps, gaps[1:]))
        and last['relative_gap'] <= IMPLIED_EPS_TOLERANCE
        and last['relative_gap_d'] <= IMPLIED_D_TOLERANCE
        and all(_within_factor(row['law_ratio']) and _within_factor(row['scale_ratio']) for row in measured)
    )
    return rows, 'consistent' if consistent else 'inconsistent'


def scan_one(epsilon: str, bits: int, manifold_order: int, alpha: Optional[str] = None) -> Dict[str, Any]:
    """
    Splitting scan at one epsilon, as a plain dict.

    Module-level so a process pool can pickle it; library errors come back as
    {'epsilon': ..., 'error': ...} instead of propagating.
    """
    cfg = PrecisionConfig(bits=bits, manifold_order=manifold_order)
    try:
        with mp.workprec(bits):
            series_alpha = mp.mpf(alpha) if alpha is not None else None
            report = splitting_scan(epsilon, cfg, alpha=series_alpha)
        return {'epsilon': epsilon, 'report': report}
    except SplittingLabError as e:
        logger.warning("splitting_scan_failed", epsilon=epsilon, error=str(e))
        return {'epsilon': epsilon, 'error': str(e)}


class SplittingLabService:
    """
    Main service behind the CLI commands
    Keeps per-command metrics behind a lock, as every command may fan out to workers
    """

    def __init__(self, config: RunConfig):
        self.config = config
        self.precision = config.precision()

        self.command_metrics = {
            'total_commands': 0,
            'successful_commands': 0,
            'failed_commands': 0,
            'epsilons_scanned': 0,
            'epsilons_failed': 0,
            'stage_ms': {},
        }
        self._metrics_lock = threading.Lock()

        # Cached results shared between commands of one service
        self._solution: Optional[FormalSolution] = None
        self._estimates: Optional[ConstantEstimates] = None

    def _record(self, stage: str, started: float, ok: bool = True) -> None:
        with self._metrics_lock:
            self.command_metrics['total_commands'] += 1
            self.command_metrics['successful_commands' if ok else 'failed_commands'] += 1
            self.command_metrics['stage_ms'][stage] = (time.time() - started) * 1000

    # Series engine

    def run_series(self, order: Optional[int] = None) -> FormalSolution:
        """Exact formal solution through d^order"""
        order = order or self.config.series_order
        if self._solution is not None and self._solution.order == order:
            return self._solution
        started = time.time()
        try:
            self._solution = formal_solution(order)
        except SplittingLabError:
            self._record('series', started, ok=False)
            raise
        self._record('series', started)
        return self._solution

    def run_alpha(self) -> Tuple[FormalSolution, ConstantEstimates]:
        """Solution with F, G, J attached and the constants read from J"""
        if self._estimates is not None and self._solution is not None and self._solution.J is not None:
            return self._solution, self._estimates
        sol = self.run_series()
        started = time.time()
        try:
            sol = derive_series(sol)
            estimates = extract_constants(sol.J, self.precision.bits)
        except SplittingLabError:
            self._record('alpha', started, ok=False)
            raise
        self._solution, self._estimates = sol, estimates
        self._record('alpha', started)
        return sol, estimates

    def run_tau(self, count: Optional[int] = None) -> List[Polynomial]:
        """tau_0 .. tau_count"""
        count = count or self.config.series_order
        started = time.time()
        basis = list(tau_basis.tau_cache.snapshot(count))
        self._record('tau', started)
        return basis

    # Dynamics engine

    def run_splitting(self, alpha=None) -> List[Dict[str, Any]]:
        """
        One splitting scan per configured epsilon.

        Returns:
            Entries {'epsilon', 'report'} or {'epsilon', 'error'}, ordered by
            decreasing epsilon whatever the completion order of the workers.
        """
        started = time.time()
        epsilons = sorted(self.config.epsilon_list, key=float, reverse=True)
        alpha_text = mp.nstr(alpha, 30) if alpha is not None else None
        args = [(eps, self.precision.bits, self.precision.manifold_order, alpha_text) for eps in epsilons]

        if self.config.workers > 1 and len(args) > 1:
            with ProcessPoolExecutor(max_workers=self.config.workers) as pool:
                futures = [pool.submit(scan_one, *a) for a in args]
                results = [f.result() for f in futures]
        else:
            results = [scan_one(*a) for a in args]

        failed = sum(1 for r in results if 'error' in r)
        with self._metrics_lock:
            self.command_metrics['epsilons_scanned'] += len(results) - failed
            self.command_metrics['epsilons_failed'] += failed
        self._record('splitting', started, ok=failed < len(results) or not results)
        return results

    def compare(self) -> Dict[str, Any]:
        """
        Implied alpha per epsilon against the series alpha and the reference value.

        Epsilons run in decreasing order; see assess for the verdict.
        """
        _, estimates = self.run_alpha()
        alpha = estimates.alpha.value
        scans = self.run_splitting(alpha)

        rows, verdict = assess(scans, alpha)
        logger.info("compare_done", verdict=verdict, epsilons=len(rows), alpha=mp.nstr(alpha, 10))
        return {
            'series_alpha': alpha,
            'series_alpha_error': estimates.alpha.error,
            'reference_alpha': REFERENCE_ALPHA,
            'rows': rows,
            'verdict': verdict,
        }

    def validate(self, settings: Optional[ValidationSettings] = None) -> List[PropertyCheck]:
        started = time.time()
        settings = settings or ValidationSettings(precision=self.precision)
        checks = run_validation(settings)
        self._record('validate', started, ok=all(c.passed for c in checks))
        return checks

    # Introspection

    def get_service_stats(self) -> Dict[str, Any]:
        """Command metrics plus the cache statistics of the series engine"""
        with self._metrics_lock:
            service_stats = dict(self.command_metrics)
            service_stats['stage_ms'] = dict(self.command_metrics['stage_ms'])

        total = service_stats['total_commands']
        service_stats['success_rate'] = service_stats['successful_commands'] / total if total > 0 else 0.0

        return {
            'service_metrics': service_stats,
            'cache_stats': operators.cache_stats() + [tau_basis.tau_cache.get_stats()],
            'timestamp': time.time(),
        }

    def health_check(self) -> Dict[str, Any]:
        """Cheap self-test: the first series coefficient and the first tau polynomials"""
        try:
            series_healthy = formal_solution(4).A_poly(1) == Polynomial.monomial(1, Fraction(-1, 4))
            tau_healthy = tau_basis.tau(2) == Polynomial((1, 0, -1))
            return {
                'healthy': series_healthy and tau_healthy,
                'series': series_healthy,
                'tau': tau_healthy,
                'timestamp': time.time(),
            }
        except SplittingLabError as e:
            return {
                'healthy': False,
                'error': str(e),
                'timestamp': time.time(),
            }
