"""
Truncated power series in d with polynomial coefficients
"""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional, Tuple, Union

from errors import DomainError, InsufficientOrderError, ParityViolationError
from models.polynomial import ONE, ZERO, Parity, Polynomial, Scalar, combine_parity


def _merge_parity(a: Optional[Parity], b: Optional[Parity]) -> Optional[Parity]:
    return a if a is b else None


@dataclass(frozen=True)
class DSeries:
    """
    Σ_{n=0}^{order} coeffs[n](u) d^n

    d_parity and u_parity are claims checked on construction; bounded_degree
    claims deg coeffs[n] <= n for every n.
    """
    coeffs: Tuple[Polynomial, ...]
    d_parity: Optional[Parity] = None
    u_parity: Optional[Parity] = None
    bounded_degree: bool = False

    def __post_init__(self):
        if not self.coeffs:
            raise InsufficientOrderError("a series needs at least the d^0 coefficient", 0)
        object.__setattr__(self, "coeffs", tuple(self.coeffs))
        for n, c in enumerate(self.coeffs):
            if self.d_parity is not None and not c.is_zero():
                if (n % 2 == 0) != (self.d_parity is Parity.EVEN):
                    raise ParityViolationError(f"d^{n} coefficient nonzero in a {self.d_parity.value} series")
            if not c.has_parity(self.u_parity):
                raise ParityViolationError(f"d^{n} coefficient {c} is not {self.u_parity.value} in u")
            if self.bounded_degree and c.degree > n:
                raise ParityViolationError(f"d^{n} coefficient has degree {c.degree} > {n}")

    # Construction

    @classmethod
    def zero(cls, order: int, **flags) -> "DSeries":
        return cls((ZERO,) * (order + 1), **flags)

    @classmethod
    def one(cls, order: int) -> "DSeries":
        return cls((ONE,) + (ZERO,) * order, d_parity=Parity.EVEN, u_parity=Parity.EVEN, bounded_degree=True)

    @classmethod
    def from_terms(cls, order: int, terms: dict, **flags) -> "DSeries":
        """Series from {power: Polynomial}; powers above order are dropped"""
        coeffs = [ZERO] * (order + 1)
        for n, poly in terms.items():
            if n <= order:
                coeffs[n] = poly
        return cls(tuple(coeffs), **flags)

    # Queries

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def coefficient(self, n: int) -> Polynomial:
        if n > self.order:
            raise InsufficientOrderError(f"coefficient d^{n} beyond series order {self.order}", n)
        return self.coeffs[n] if n >= 0 else ZERO

    def valuation(self) -> Optional[int]:
        """Lowest power with a nonzero coefficient, None for the zero series"""
        for n, c in enumerate(self.coeffs):
            if not c.is_zero():
                return n
        return None

    def nonzero_terms(self) -> Iterator[Tuple[int, Polynomial]]:
        return ((n, c) for n, c in enumerate(self.coeffs) if not c.is_zero())

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def _flags(self) -> dict:
        return dict(d_parity=self.d_parity, u_parity=self.u_parity, bounded_degree=self.bounded_degree)

    # Truncation and shifts

    def truncate(self, order: int) -> "DSeries":
        if order > self.order:
            raise InsufficientOrderError(f"cannot truncate order {self.order} up to {order}", order)
        return DSeries(self.coeffs[: order + 1], **self._flags())

    def pad(self, order: int) -> "DSeries":
        """Extend with zero coefficients; only valid for series known to end at self.order"""
        if order <= self.order:
            return self.truncate(order)
        return DSeries(self.coeffs + (ZERO,) * (order - self.order), **self._flags())

    def shift_down(self, k: int) -> "DSeries":
        """Divide by d^k; the k lowest coefficients must vanish"""
        if any(not c.is_zero() for c in self.coeffs[:k]):
            raise DomainError(f"series is not divisible by d^{k}")
        d_parity = self.d_parity if k % 2 == 0 or self.d_parity is None else (
            Parity.ODD if self.d_parity is Parity.EVEN else Parity.EVEN)
        return DSeries(self.coeffs[k:], d_parity=d_parity, u_parity=self.u_parity)

    # Arithmetic, truncated at the smaller order

    def __add__(self, other: "DSeries") -> "DSeries":
        order = min(self.order, other.order)
        return DSeries(
            tuple(self.coeffs[n] + other.coeffs[n] for n in range(order + 1)),
            d_parity=_merge_parity(self.d_parity, other.d_parity),
            u_parity=_merge_parity(self.u_parity, other.u_parity),
            bounded_degree=self.bounded_degree and other.bounded_degree,
        )

    def __neg__(self) -> "DSeries":
        return DSeries(tuple(-c for c in self.coeffs), **self._flags())

    def __sub__(self, other: "DSeries") -> "DSeries":
        return self + (-other)

    def scale(self, c: Union[Scalar, Polynomial]) -> "DSeries":
        """Multiply every coefficient by a rational or a fixed polynomial in u"""
        if isinstance(c, Polynomial):
            u_parity = combine_parity(self.u_parity, c.parity()) if not c.is_zero() else self.u_parity
            return DSeries(tuple(a * c for a in self.coeffs), d_parity=self.d_parity, u_parity=u_parity)
        return DSeries(tuple(a.scale(c) for a in self.coeffs), **self._flags())

    def __mul__(self, other: Union["DSeries", Scalar]) -> "DSeries":
        if not isinstance(other, DSeries):
            return self.scale(other)
        order = min(self.order, other.order)
        out = [ZERO] * (order + 1)
        right = [(m, b) for m, b in other.nonzero_terms() if m <= order]
        for n, a in self.nonzero_terms():
            if n > order:
                break
            for m, b in right:
                if n + m > order:
                    break
                out[n + m] = out[n + m] + a * b
        return DSeries(
            tuple(out),
            d_parity=combine_parity(self.d_parity, other.d_parity),
            u_parity=combine_parity(self.u_parity, other.u_parity),
            bounded_degree=self.bounded_degree and other.bounded_degree,
        )

    __rmul__ = __mul__

    def divide(self, other: "DSeries") -> "DSeries":
        """
        self / other for a unit series other (d^0 coefficient a nonzero constant).

        Raises:
            DomainError: other's d^0 coefficient is not a nonzero constant
        """
        head = other.coeffs[0]
        if head.is_zero() or head.degree > 0:
            raise DomainError(f"divisor is not a unit series (d^0 coefficient {head})")
        inv_head = 1 / head.coeffs[0]
        order = min(self.order, other.order)
        tail = [(m, b) for m, b in other.nonzero_terms() if 0 < m <= order]
        quotient = [ZERO] * (order + 1)
        for n in range(order + 1):
            acc = self.coeffs[n]
            for m, b in tail:
                if m > n:
                    break
                if not quotient[n - m].is_zero():
                    acc = acc - b * quotient[n - m]
            quotient[n] = acc.scale(inv_head)
        return DSeries(
            tuple(quotient),
            d_parity=self.d_parity if other.d_parity is Parity.EVEN else None,
            u_parity=self.u_parity if other.u_parity is Parity.EVEN else None,
            bounded_degree=self.bounded_degree and other.bounded_degree,
        )

    def __truediv__(self, other: "DSeries") -> "DSeries":
        return self.divide(other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DSeries):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __str__(self) -> str:
        terms = [f"({c})*d^{n}" for n, c in self.nonzero_terms()]
        return " + ".join(terms) if terms else "0"


@dataclass(frozen=True)
class OperatorKernel:
    """
    Taylor coefficients f_0, f_1, ... of an analytic f(z), defining the
    operator f(dD): coefficient n of f(dD)Q is Σ_i f_i D^i Q_{n-i}.
    """
    name: str
    taylor: Tuple[Fraction, ...] = field(default_factory=tuple)

    @property
    def order(self) -> int:
        return len(self.taylor) - 1

    def coefficient(self, i: int) -> Fraction:
        return self.taylor[i] if i < len(self.taylor) else Fraction(0)

    def parity(self) -> Optional[Parity]:
        if all(c == 0 for c in self.taylor[1::2]):
            return Parity.EVEN
        if all(c == 0 for c in self.taylor[0::2]):
            return Parity.ODD
        return None