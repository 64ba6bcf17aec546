"""
Result records of the series engine
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from models.polynomial import Polynomial
from models.series import DSeries


@dataclass(frozen=True)
class FormalSolution:
    """
    The formal separatrix series A = Σ A_{2n-1}(u) d^{2n} and the series
    derived from it for the constant extraction.
    """
    order: int
    A: DSeries
    odd_polys: Tuple[Polynomial, ...]
    F: Optional[DSeries] = None
    G: Optional[DSeries] = None
    J: Optional[DSeries] = None
    elapsed_ms: float = 0.0

    def A_poly(self, k: int) -> Polynomial:
        """A_k for odd k"""
        if k % 2 == 0 or k < 1:
            raise ValueError(f"A_k is defined for odd k, got {k}")
        return self.odd_polys[(k - 1) // 2]


@dataclass
class ExtrapolatedValue:
    """A partial-sum sequence and its accelerated limit"""
    value: Any
    error: Any
    partial_sums: List[Any] = field(default_factory=list)
    levels: List[List[Any]] = field(default_factory=list)


@dataclass
class ConstantEstimates:
    """
    alpha_n, beta_n, gamma_n read from the tau-expansion of S(J/d), indexed by n,
    with their extrapolated sums and the independent leading-coefficient read.
    """
    precision: int
    alpha_seq: Dict[int, Any]
    beta_seq: Dict[int, Any]
    gamma_seq: Dict[int, Any]
    alpha: ExtrapolatedValue
    beta: ExtrapolatedValue
    gamma: ExtrapolatedValue
    alpha_direct_seq: Dict[int, Any] = field(default_factory=dict)
    alpha_direct: Optional[ExtrapolatedValue] = None

    def decay_profile(self, exponent: int = 7) -> Dict[int, Any]:
        """|alpha_n| n^exponent, bounded when alpha_n = O(n^-exponent)"""
        return {n: abs(a) * n ** exponent for n, a in self.alpha_seq.items()}


@dataclass
class PropertyCheck:
    """Outcome of one invariant of the validation suite"""
    name: str
    passed: bool
    detail: str = ""
    elapsed_ms: float = 0.0
