"""
Invariant suite
Exact operator identities, residual vanishing, tau-basis properties and the
dynamical invariants of the map and its manifolds, each reported pass/fail.
"""
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Tuple

import numpy as np
import structlog
from mpmath import mp

from algebra import tau_basis
from algebra.tau_basis import apply_D, from_tau, norm, to_tau
from dynamics.manifolds import conjugacy_residual, energy_drift, manifold_series
from dynamics.standard_map import fixed_point_data, map_backward, map_forward
from errors import SplittingLabError
from models.config import PrecisionConfig
from models.dynamics import FixedPointLabel, ManifoldBranch, PhasePoint
from models.polynomial import Polynomial
from models.results import PropertyCheck
from models.series import DSeries
from series.operators import op_C, op_C1, op_dD, op_half_step_remainder, op_J, op_S, op_S1
from series.recurrence import formal_solution, residual

logger = structlog.get_logger(__name__)

Outcome = Tuple[bool, str]


@dataclass(frozen=True)
class ValidationSettings:
    """Sizes and seeds of the property checks"""
    seed: int = 20240917
    series_count: int = 20
    series_order: int = 16
    residual_orders: Tuple[int, ...] = (8, 16, 24)
    tau_max: int = 10
    tau_points: int = 5
    round_trip_degree: int = 60
    round_trip_count: int = 10
    epsilon: str = "0.5"
    map_points: int = 5
    precision: PrecisionConfig = field(default_factory=PrecisionConfig)


def random_polynomial(rng: np.random.Generator, degree: int) -> Polynomial:
    """Polynomial with small random rational coefficients"""
    numerators = rng.integers(-6, 7, size=degree + 1)
    denominators = rng.integers(1, 5, size=degree + 1)
    return Polynomial(tuple(Fraction(int(a), int(b)) for a, b in zip(numerators, denominators)))


def random_q_series(rng: np.random.Generator, order: int) -> DSeries:
    """Random series whose d^n coefficient has degree at most n"""
    return DSeries(tuple(random_polynomial(rng, n) for n in range(order + 1)), bounded_degree=True)


class InvariantSuite:
    """
    Runs every property and collects PropertyCheck records.

    A property that raises a library error counts as failed with the error
    message as detail.
    """

    def __init__(self, settings: ValidationSettings = None):
        self.settings = settings or ValidationSettings()
        self.rng = np.random.default_rng(self.settings.seed)

    def properties(self) -> List[Tuple[str, Callable[[], Outcome]]]:
        return [
            ("operator_cosh_identity", self.check_cosh_identity),
            ("operator_product_rule_cosh", self.check_product_rule_cosh),
            ("operator_product_rule_sinh", self.check_product_rule_sinh),
            ("operator_sinh_double", self.check_sinh_double),
            ("operator_full_product_rule_cosh", self.check_full_product_rule_cosh),
            ("operator_full_product_rule_sinh", self.check_full_product_rule_sinh),
            ("operator_half_step_split", self.check_half_step_split),
            ("residual_vanishing", self.check_residual_vanishing),
            ("tau_identity", self.check_tau_identity),
            ("tau_index_raise", self.check_tau_index_raise),
            ("tau_round_trip", self.check_tau_round_trip),
            ("tau_norm_bounds", self.check_norm_bounds),
            ("symplecticity", self.check_symplecticity),
            ("inverse_round_trip", self.check_inverse_round_trip),
            ("saddle_multipliers", self.check_saddle_multipliers),
            ("conjugacy_residual_scaling", self.check_conjugacy_scaling),
            ("modified_energy_drift", self.check_energy_drift),
        ]

    def run(self) -> List[PropertyCheck]:
        results = []
        for name, check in self.properties():
            started = time.time()
            try:
                passed, detail = check()
            except SplittingLabError as e:
                passed, detail = False, f"{type(e).__name__}: {e}"
            elapsed_ms = (time.time() - started) * 1000
            logger.info("validation_property", name=name, passed=passed, elapsed_ms=round(elapsed_ms, 1))
            results.append(PropertyCheck(name=name, passed=passed, detail=detail, elapsed_ms=elapsed_ms))
        return results

    # Operator identities, exact

    def _series_pairs(self):
        order = self.settings.series_order
        for _ in range(self.settings.series_count):
            yield random_q_series(self.rng, order), random_q_series(self.rng, order)

    def check_cosh_identity(self) -> Outcome:
        """C1 = 2 S^2 + Id"""
        for k, (Q, _) in enumerate(self._series_pairs()):
            if op_C1(Q) != op_S(op_S(Q)).scale(2) + Q:
                return False, f"series #{k} breaks C1 = 2S^2 + Id"
        return True, f"{self.settings.series_count} series to order {self.settings.series_order}"

    def check_product_rule_cosh(self) -> Outcome:
        """C(QG) = C(Q)C(G) + S(Q)S(G)"""
        for k, (Q, G) in enumerate(self._series_pairs()):
            if op_C(Q * G) != op_C(Q) * op_C(G) + op_S(Q) * op_S(G):
                return False, f"pair #{k} breaks the cosh product rule"
        return True, f"{self.settings.series_count} pairs to order {self.settings.series_order}"

    def check_product_rule_sinh(self) -> Outcome:
        """S(QG) = S(Q)C(G) + C(Q)S(G)"""
        for k, (Q, G) in enumerate(self._series_pairs()):
            if op_S(Q * G) != op_S(Q) * op_C(G) + op_C(Q) * op_S(G):
                return False, f"pair #{k} breaks the sinh product rule"
        return True, f"{self.settings.series_count} pairs to order {self.settings.series_order}"

    def check_sinh_double(self) -> Outcome:
        """S1 = 2 S C"""
        for k, (Q, _) in enumerate(self._series_pairs()):
            if op_S1(Q) != op_S(op_C(Q)).scale(2):
                return False, f"series #{k} breaks S1 = 2SC"
        return True, f"{self.settings.series_count} series to order {self.settings.series_order}"

    def check_full_product_rule_cosh(self) -> Outcome:
        """C1(QG) = C1(Q)C1(G) + S1(Q)S1(G)"""
        for k, (Q, G) in enumerate(self._series_pairs()):
            if op_C1(Q * G) != op_C1(Q) * op_C1(G) + op_S1(Q) * op_S1(G):
                return False, f"pair #{k} breaks the full-step cosh product rule"
        return True, f"{self.settings.series_count} pairs to order {self.settings.series_order}"

    def check_full_product_rule_sinh(self) -> Outcome:
        for k, (Q, G) in enumerate(self._series_pairs()):
            if op_S1(Q * G) != op_S1(Q) * op_C1(G) + op_C1(Q) * op_S1(G):
                return False, f"pair #{k} breaks the full-step sinh product rule"
        return True, f"{self.settings.series_count} pairs to order {self.settings.series_order}"

    def check_half_step_split(self) -> Outcome:
        """Q = 2 J(Q) + F(dD) dD Q"""
        for k, (Q, _) in enumerate(self._series_pairs()):
            if Q != op_J(Q).scale(2) + op_half_step_remainder(op_dD(Q)):
                return False, f"series #{k} breaks Q = 2J(Q) + F(dD)dDQ"
        return True, f"{self.settings.series_count} series to order {self.settings.series_order}"

    def check_residual_vanishing(self) -> Outcome:
        for order in self.settings.residual_orders:
            sol = formal_solution(order)
            R = residual(sol.A, order + 1)
            if not R.is_zero():
                return False, f"residual of the order-{order} solution starts at d^{R.valuation()}"
        return True, f"orders {list(self.settings.residual_orders)}"

    # Tau basis

    def check_tau_identity(self) -> Outcome:
        """tau_n(tanh z) against the Taylor coefficients of tanh at z"""
        bits = self.settings.precision.bits
        with mp.workprec(bits):
            tolerance = mp.mpf(10) ** (-(mp.dps // 4))
            points = self.rng.uniform(-2.0, 2.0, size=self.settings.tau_points)
            for z in points:
                z = mp.mpf(float(z))
                taylor = mp.taylor(mp.tanh, z, self.settings.tau_max - 1)
                u = mp.tanh(z)
                for n in range(1, self.settings.tau_max + 1):
                    expected = taylor[n - 1]
                    got = tau_basis.tau(n).evaluate(u)
                    if abs(got - expected) > tolerance * max(1, abs(expected)):
                        return False, f"tau_{n}(tanh({mp.nstr(z, 6)})) off by {mp.nstr(abs(got - expected), 3)}"
        return True, f"n <= {self.settings.tau_max} at {self.settings.tau_points} points"

    def check_tau_index_raise(self) -> Outcome:
        """D tau_n = n tau_(n+1)"""
        for n in range(1, self.settings.tau_max * 4):
            if apply_D(tau_basis.tau(n)) != tau_basis.tau(n + 1).scale(n):
                return False, f"D tau_{n} != {n} tau_{n + 1}"
        return True, f"n < {self.settings.tau_max * 4}"

    def check_tau_round_trip(self) -> Outcome:
        for _ in range(self.settings.round_trip_count):
            degree = int(self.rng.integers(0, self.settings.round_trip_degree + 1))
            p = random_polynomial(self.rng, degree)
            if from_tau(to_tau(p)) != p:
                return False, f"round trip changed a degree-{degree} polynomial"
        return True, f"{self.settings.round_trip_count} polynomials up to degree {self.settings.round_trip_degree}"

    def check_norm_bounds(self) -> Outcome:
        """||Dp||_(n+1) <= n ||p||_n, and ||p||_n <= ||Dp||_(n+1) without a tau_0 part"""
        bits = self.settings.precision.bits
        # comparisons run at the default precision of the returned norms
        slack = mp.mpf(2) ** -40
        for n in range(1, self.settings.series_order + 1):
            p = random_polynomial(self.rng, n)
            lifted = norm(apply_D(p), n + 1, bits)
            if lifted > n * norm(p, n, bits) * (1 + slack):
                return False, f"||Dp||_{n + 1} exceeds {n}||p||_{n}"
            head = to_tau(p).coefficient(0)
            q = p - head
            if not q.is_zero() and norm(q, n, bits) > norm(apply_D(q), n + 1, bits) * (1 + slack):
                return False, f"||p||_{n} exceeds ||Dp||_{n + 1} for p without a tau_0 part"
        return True, f"n <= {self.settings.series_order}"

    # Map and manifolds

    def _random_points(self) -> List[PhasePoint]:
        qs = self.rng.uniform(0.0, 6.28, size=self.settings.map_points)
        ps = self.rng.uniform(-2.0, 2.0, size=self.settings.map_points)
        return [PhasePoint(mp.mpf(float(q)), mp.mpf(float(p))) for q, p in zip(qs, ps)]

    def check_symplecticity(self) -> Outcome:
        """det of the numerically differentiated map equals 1"""
        bits = self.settings.precision.bits
        with mp.workprec(bits):
            eps = mp.mpf(self.settings.epsilon)
            tolerance = mp.mpf(2) ** (-bits // 2)
            for z in self._random_points():
                dq_dq = mp.diff(lambda x: map_forward(PhasePoint(x, z.p), eps).q, z.q)
                dq_dp = mp.diff(lambda y: map_forward(PhasePoint(z.q, y), eps).q, z.p)
                dp_dq = mp.diff(lambda x: map_forward(PhasePoint(x, z.p), eps).p, z.q)
                dp_dp = mp.diff(lambda y: map_forward(PhasePoint(z.q, y), eps).p, z.p)
                det = dq_dq * dp_dp - dq_dp * dp_dq
                if abs(det - 1) > tolerance:
                    return False, f"Jacobian determinant {mp.nstr(det, 12)} at q={mp.nstr(z.q, 6)}"
        return True, f"{self.settings.map_points} points at eps={self.settings.epsilon}"

    def check_inverse_round_trip(self) -> Outcome:
        bits = self.settings.precision.bits
        with mp.workprec(bits):
            eps = mp.mpf(self.settings.epsilon)
            tolerance = mp.mpf(2) ** (-(bits - 8))
            for z in self._random_points():
                back = map_backward(map_forward(z, eps), eps)
                scale = max(1, abs(z.q), abs(z.p))
                if max(abs(back.q - z.q), abs(back.p - z.p)) > tolerance * scale:
                    return False, f"inverse map misses ({mp.nstr(z.q, 6)}, {mp.nstr(z.p, 6)})"
        return True, f"{self.settings.map_points} points at eps={self.settings.epsilon}"

    def check_saddle_multipliers(self) -> Outcome:
        """lam lam^-1 = 1, lam + lam^-1 = 2 + eps^2, and (J - lam I) v = 0"""
        bits = self.settings.precision.bits
        with mp.workprec(bits):
            eps = mp.mpf(self.settings.epsilon)
            tolerance = mp.mpf(2) ** (-(bits - 8))
            for label in FixedPointLabel:
                data = fixed_point_data(eps, label)
                lam_s, lam_u = data.eigenvalues
                if abs(lam_s * lam_u - 1) > tolerance or abs(lam_s + lam_u - 2 - eps * eps) > tolerance:
                    return False, f"multipliers at {label.value} violate the saddle identities"
                for lam, (vq, vp) in zip(data.eigenvalues, data.eigenvectors):
                    J = data.jacobian
                    rq = (J[0, 0] - lam) * vq + J[0, 1] * vp
                    rp = J[1, 0] * vq + (J[1, 1] - lam) * vp
                    if max(abs(rq), abs(rp)) > tolerance * 8:
                        return False, f"eigenvector at {label.value} is not annihilated by J - lam I"
        return True, f"eps={self.settings.epsilon}"

    def check_conjugacy_scaling(self) -> Outcome:
        """Doubling s multiplies the conjugacy residual by about 2^k, k the first odd power above M"""
        cfg = self.settings.precision
        expected = cfg.manifold_order + 1 if cfg.manifold_order % 2 == 0 else cfg.manifold_order + 2
        with mp.workprec(cfg.bits):
            for branch in ManifoldBranch:
                ms = manifold_series(self.settings.epsilon, branch, cfg)
                small = conjugacy_residual(ms, 4 * ms.seed)
                large = conjugacy_residual(ms, 8 * ms.seed)
                if small == 0:
                    return False, f"{branch.value}: residual vanished at 4 s0"
                slope = mp.log(large / small, 2)
                if abs(slope - expected) > 2:
                    return False, f"{branch.value}: residual grows like s^{mp.nstr(slope, 4)}, expected s^{expected}"
        return True, f"order {cfg.manifold_order}, both branches"

    def check_energy_drift(self) -> Outcome:
        """|H~ - 1| <= 10 eps^2 along both branches up to q = pi"""
        cfg = self.settings.precision
        with mp.workprec(cfg.bits):
            eps = mp.mpf(self.settings.epsilon)
            bound = 10 * eps * eps
            for branch in ManifoldBranch:
                ms = manifold_series(eps, branch, cfg)
                drift = energy_drift(ms, mp.pi, eps, cfg)
                if drift > bound:
                    return False, f"{branch.value}: drift {mp.nstr(drift, 6)} above {mp.nstr(bound, 4)}"
        return True, f"eps={self.settings.epsilon}"


def run_validation(settings: ValidationSettings = None) -> List[PropertyCheck]:
    return InvariantSuite(settings).run()
