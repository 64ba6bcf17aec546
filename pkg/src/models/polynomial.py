"""
Exact polynomials in u over the rationals
Dense coefficient storage, canonical form without trailing zeros
"""
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from mpmath import mp

from errors import NonZeroRemainderError

Scalar = Union[int, Fraction]


class Parity(Enum):
    """Parity of a polynomial in u, or of a series in d"""
    EVEN = "even"
    ODD = "odd"

    def combine(self, other: "Parity") -> "Parity":
        """Parity of a product"""
        return Parity.EVEN if self is other else Parity.ODD


def combine_parity(a: Optional[Parity], b: Optional[Parity]) -> Optional[Parity]:
    if a is None or b is None:
        return None
    return a.combine(b)


def _as_fraction(value: Scalar) -> Fraction:
    return value if isinstance(value, Fraction) else Fraction(value)


def _integer_form(coeffs: Sequence[Fraction]) -> Tuple[List[int], int]:
    """Scale coefficients to a common denominator"""
    den = math.lcm(*(c.denominator for c in coeffs))
    return [c.numerator * (den // c.denominator) for c in coeffs], den


@dataclass(frozen=True)
class Polynomial:
    """
    p(u) = Σ coeffs[i] u^i with exact rational coefficients.
    The zero polynomial has no coefficients and degree -1.
    """
    coeffs: Tuple[Fraction, ...] = field(default_factory=tuple)

    def __post_init__(self):
        values = [_as_fraction(c) for c in self.coeffs]
        while values and values[-1] == 0:
            values.pop()
        object.__setattr__(self, "coeffs", tuple(values))

    @classmethod
    def constant(cls, c: Scalar) -> "Polynomial":
        return cls((c,))

    @classmethod
    def monomial(cls, k: int, c: Scalar = 1) -> "Polynomial":
        if k < 0:
            raise ValueError(f"monomial power must be non-negative, got {k}")
        return cls((0,) * k + (c,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def coefficient(self, k: int) -> Fraction:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return Fraction(0)

    def leading_coefficient(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    # Parity queries. The zero polynomial is both even and odd.

    def is_even(self) -> bool:
        return all(c == 0 for c in self.coeffs[1::2])

    def is_odd(self) -> bool:
        return all(c == 0 for c in self.coeffs[0::2])

    def parity(self) -> Optional[Parity]:
        """EVEN or ODD when the polynomial has one, None for mixed or zero"""
        if self.is_zero():
            return None
        if self.is_even():
            return Parity.EVEN
        if self.is_odd():
            return Parity.ODD
        return None

    def has_parity(self, parity: Optional[Parity]) -> bool:
        if parity is None:
            return True
        return self.is_even() if parity is Parity.EVEN else self.is_odd()

    # Ring operations

    def __add__(self, other: Union["Polynomial", Scalar]) -> "Polynomial":
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Polynomial(tuple(self.coefficient(i) + other.coefficient(i) for i in range(n)))

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial(tuple(-c for c in self.coeffs))

    def __sub__(self, other: Union["Polynomial", Scalar]) -> "Polynomial":
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(other)
        return self + (-other)

    def __rsub__(self, other: Scalar) -> "Polynomial":
        return Polynomial.constant(other) - self

    def scale(self, c: Scalar) -> "Polynomial":
        c = _as_fraction(c)
        if c == 0:
            return ZERO
        return Polynomial(tuple(c * a for a in self.coeffs))

    def __mul__(self, other: Union["Polynomial", Scalar]) -> "Polynomial":
        if not isinstance(other, Polynomial):
            return self.scale(other)
        if self.is_zero() or other.is_zero():
            return ZERO
        # Integer convolution over a common denominator, one reduction per coefficient
        a, den_a = _integer_form(self.coeffs)
        b, den_b = _integer_form(other.coeffs)
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x == 0:
                continue
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
        den = den_a * den_b
        return Polynomial(tuple(Fraction(v, den) for v in out))

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Polynomial":
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        result = ONE
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # Calculus

    def derivative(self) -> "Polynomial":
        return Polynomial(tuple(i * c for i, c in enumerate(self.coeffs) if i > 0))

    def antiderivative(self) -> "Polynomial":
        """Antiderivative with zero constant term"""
        return Polynomial((Fraction(0),) + tuple(c / (i + 1) for i, c in enumerate(self.coeffs)))

    def integrate_from(self, a: Scalar) -> "Polynomial":
        """P with P' = self and P(a) = 0"""
        prim = self.antiderivative()
        return prim - prim.evaluate(_as_fraction(a))

    def evaluate(self, x):
        """Horner evaluation; exact for rationals, mpf arithmetic for mpf arguments"""
        if isinstance(x, (int, Fraction)):
            acc = Fraction(0)
            for c in reversed(self.coeffs):
                acc = acc * x + c
            return acc
        if not self.coeffs:
            return mp.mpf(0)
        return mp.polyval(self.to_mpf_coeffs(reverse=True), x)

    def to_mpf_coeffs(self, reverse: bool = False) -> List:
        """Coefficients as mpf at the current working precision"""
        values = [mp.mpf(c.numerator) / c.denominator for c in self.coeffs]
        return values[::-1] if reverse else values

    # Division

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        terms = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            mono = "" if k == 0 else ("u" if k == 1 else f"u^{k}")
            if mono and abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}{'*' if mono else ''}{mono}"
            sign = "-" if c < 0 else "+"
            terms.append((sign, body))
        first_sign, first_body = terms[0]
        text = ("-" if first_sign == "-" else "") + first_body
        for sign, body in terms[1:]:
            text += f" {sign} {body}"
        return text


ZERO = Polynomial()
ONE = Polynomial.constant(1)
U = Polynomial.monomial(1)
ONE_MINUS_U2 = Polynomial((1, 0, -1))


def exact_div(p: Polynomial, q: Polynomial) -> Polynomial:
    """
    Synthetic division of p by q that must leave no remainder.

    Raises:
        ZeroDivisionError: q is the zero polynomial
        NonZeroRemainderError: q does not divide p
    """
    if q.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if p.is_zero():
        return ZERO
    if p.degree < q.degree:
        raise NonZeroRemainderError(f"deg {p.degree} < deg {q.degree}: ({p}) / ({q})")

    remainder = list(p.coeffs)
    lead = q.leading_coefficient()
    quotient = [Fraction(0)] * (p.degree - q.degree + 1)
    for k in range(len(quotient) - 1, -1, -1):
        c = remainder[k + q.degree] / lead
        quotient[k] = c
        if c:
            for j, b in enumerate(q.coeffs):
                remainder[k + j] -= c * b

    if any(remainder[: q.degree]):
        raise NonZeroRemainderError(f"({p}) is not divisible by ({q})")
    return Polynomial(tuple(quotient))


@dataclass(frozen=True)
class TauExpansion:
    """Coefficients a_k of p = Σ a_k τ_k"""
    coeffs: Tuple[Fraction, ...] = field(default_factory=tuple)

    def __post_init__(self):
        values = [_as_fraction(c) for c in self.coeffs]
        while values and values[-1] == 0:
            values.pop()
        object.__setattr__(self, "coeffs", tuple(values))

    def coefficient(self, k: int) -> Fraction:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return Fraction(0)

    def nonzero(self) -> Iterable[Tuple[int, Fraction]]:
        return ((k, c) for k, c in enumerate(self.coeffs) if c != 0)
