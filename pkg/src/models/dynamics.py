"""
Phase-space records of the discretized pendulum map
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple


class FixedPointLabel(Enum):
    """The two saddles joined by the separatrix"""
    A = "A"   # (0, 0)
    B = "B"   # (2pi, 0)


class ManifoldBranch(Enum):
    """Invariant manifolds on the primary heteroclinic branch"""
    UNSTABLE_AT_B = "unstable-at-B"
    STABLE_AT_A = "stable-at-A"

    @property
    def fixed_point(self) -> FixedPointLabel:
        return FixedPointLabel.B if self is ManifoldBranch.UNSTABLE_AT_B else FixedPointLabel.A

    @property
    def is_unstable(self) -> bool:
        return self is ManifoldBranch.UNSTABLE_AT_B


@dataclass(frozen=True)
class PhasePoint:
    """(q, p) as big-floats"""
    q: Any
    p: Any


@dataclass(frozen=True)
class FixedPointData:
    """Linearization of the map at a saddle"""
    label: FixedPointLabel
    point: PhasePoint
    jacobian: Any                 # mp.matrix 2x2
    eigenvalues: Tuple[Any, Any]  # (e^-d, e^d)
    eigenvectors: Tuple[Tuple[Any, Any], Tuple[Any, Any]]

    @property
    def trace(self):
        return self.jacobian[0, 0] + self.jacobian[1, 1]

    @property
    def determinant(self):
        j = self.jacobian
        return j[0, 0] * j[1, 1] - j[0, 1] * j[1, 0]


@dataclass(frozen=True)
class ManifoldSeries:
    """
    Taylor parameterization sigma(s) = fixed_point + Σ_{k>=1} c_k s^k
    conjugating the map to s -> multiplier * s.
    """
    branch: ManifoldBranch
    fixed_point: PhasePoint
    multiplier: Any
    coeffs: Tuple[Tuple[Any, Any], ...]   # c_1 .. c_M
    epsilon: Any
    bits: int
    seed: Any = None

    @property
    def order(self) -> int:
        return len(self.coeffs)


@dataclass
class SplittingReport:
    """Measured vertical distance between the manifolds at one epsilon"""
    epsilon: Any
    d: Any
    bits: int
    samples: List[Tuple[Any, Any]] = field(default_factory=list)
    fitted_amplitude: Any = None
    fitted_phase: Any = None
    implied_alpha_eps: Any = None
    implied_alpha_d: Any = None
    zero_spacing: Any = None
    crossing_q: Any = None
    fit_residual: Any = None
    fit_residuals: List[Any] = field(default_factory=list)
    predicted_amplitude: Any = None
    law_ratio: Any = None
    scale_ratio: Any = None
    warnings: List[str] = field(default_factory=list)
    timings: Dict[str, float] = field(default_factory=dict)

    @property
    def degraded(self) -> bool:
        return bool(self.warnings)

    def max_abs_delta(self) -> Optional[Any]:
        """max |Delta| over the sample grid"""
        if not self.samples:
            return None
        return max(abs(delta) for _, delta in self.samples)
