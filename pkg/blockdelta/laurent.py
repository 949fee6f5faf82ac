"""
Exact Laurent polynomials and single-pole rational functions in z = e(iθ)
"""

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Dict, Iterator, Mapping, Optional, Tuple, Union

import numpy as np

from .errors import InvariantViolation

Scalar = Union[int, Fraction]


class LaurentPoly:
    """
    Finitely supported map exponent -> nonzero Fraction.

    Instances are immutable; arithmetic returns new polynomials.
    """

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Optional[Mapping[int, Scalar]] = None):
        self._coeffs: Dict[int, Fraction] = {
            int(e): Fraction(c) for e, c in sorted((coeffs or {}).items()) if c != 0
        }

    @classmethod
    def monomial(cls, coeff: Scalar, exponent: int = 0) -> "LaurentPoly":
        return cls({exponent: coeff})

    @classmethod
    def two_minus(cls, sigma: int) -> "LaurentPoly":
        """The denominator 2 - z^sigma."""
        return cls({0: 2, sigma: -1})

    def __getstate__(self):
        return (self._coeffs,)

    def __setstate__(self, state):
        self._coeffs = state[0]

    def items(self) -> Iterator[Tuple[int, Fraction]]:
        return iter(self._coeffs.items())

    @property
    def coefficients(self) -> Dict[int, Fraction]:
        return dict(self._coeffs)

    def __getitem__(self, exponent: int) -> Fraction:
        return self._coeffs.get(exponent, Fraction(0))

    def is_zero(self) -> bool:
        return not self._coeffs

    @property
    def min_exponent(self) -> int:
        return min(self._coeffs) if self._coeffs else 0

    @property
    def max_exponent(self) -> int:
        return max(self._coeffs) if self._coeffs else 0

    @property
    def span(self) -> int:
        return self.max_exponent - self.min_exponent if self._coeffs else 0

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.monomial(other)
        result = dict(self._coeffs)
        for e, c in other._coeffs.items():
            result[e] = result.get(e, 0) + c
        return LaurentPoly(result)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({e: -c for e, c in self._coeffs.items()})

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other if isinstance(other, LaurentPoly) else LaurentPoly.monomial(-other))

    def __mul__(self, other: Union["LaurentPoly", Scalar]) -> "LaurentPoly":
        if isinstance(other, (int, Rational)):
            return LaurentPoly({e: c * other for e, c in self._coeffs.items()})
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        result: Dict[int, Fraction] = {}
        for e1, c1 in self._coeffs.items():
            for e2, c2 in other._coeffs.items():
                result[e1 + e2] = result.get(e1 + e2, 0) + c1 * c2
        return LaurentPoly(result)

    __rmul__ = __mul__

    def __truediv__(self, scalar: Scalar) -> "LaurentPoly":
        return LaurentPoly({e: c / scalar for e, c in self._coeffs.items()})

    def shift(self, exponent: int) -> "LaurentPoly":
        """Multiply by z^exponent."""
        return LaurentPoly({e + exponent: c for e, c in self._coeffs.items()})

    def reflect(self) -> "LaurentPoly":
        """Substitute z -> 1/z."""
        return LaurentPoly({-e: c for e, c in self._coeffs.items()})

    def at_one(self) -> Fraction:
        return sum(self._coeffs.values(), Fraction(0))

    def moment(self, order: int) -> Fraction:
        """Sum of e^order * c_e over the support."""
        return sum((Fraction(e) ** order * c for e, c in self._coeffs.items()), Fraction(0))

    def evaluate(self, theta):
        """Value at z = exp(i*theta); theta may be a float or a numpy array."""
        theta = np.asarray(theta, dtype=float)
        result = np.zeros(theta.shape, dtype=complex)
        for e, c in self._coeffs.items():
            result += float(c) * np.exp(1j * e * theta)
        return result if result.shape else complex(result)

    def divide_two_minus(self, sigma: int) -> Optional["LaurentPoly"]:
        """
        Exact quotient by 2 - z^sigma, or None when it does not divide.

        For sigma = +1 the quotient coefficients satisfy q_e = (c_e + q_{e-1}) / 2,
        which is the same recurrence as the power series expansion; the
        division is exact when the recurrence ends at zero.
        """
        if sigma == -1:
            quotient = self.reflect().divide_two_minus(1)
            return quotient.reflect() if quotient is not None else None
        if not self._coeffs:
            return LaurentPoly()
        carry = Fraction(0)
        quotient: Dict[int, Fraction] = {}
        for e in range(self.min_exponent, self.max_exponent):
            carry = (self[e] + carry) / 2
            quotient[e] = carry
        if self[self.max_exponent] + carry != 0:
            return None
        return LaurentPoly(quotient)

    def __eq__(self, other) -> bool:
        if isinstance(other, LaurentPoly):
            return self._coeffs == other._coeffs
        if isinstance(other, (int, Rational)):
            return self._coeffs == LaurentPoly.monomial(other)._coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(tuple(self._coeffs.items()))

    def __repr__(self) -> str:
        if not self._coeffs:
            return "LaurentPoly(0)"
        terms = " + ".join(f"{c}*z^{e}" if e else f"{c}" for e, c in self._coeffs.items())
        return f"LaurentPoly({terms})"


@dataclass(frozen=True)
class RationalCF:
    """
    numerator / (2 - z^sigma)^d with d in {0, 1}.

    Polynomial entries (d = 0) always carry sigma = +1 so equal values
    compare equal.
    """

    numerator: LaurentPoly
    d: int = 0
    sigma: int = 1

    def __post_init__(self):
        if self.d not in (0, 1) or self.sigma not in (1, -1):
            raise InvariantViolation(f"unsupported denominator (2 - z^{self.sigma})^{self.d}")
        if self.d == 0 and self.sigma != 1:
            object.__setattr__(self, "sigma", 1)

    @classmethod
    def polynomial(cls, poly: Union[LaurentPoly, Scalar]) -> "RationalCF":
        if not isinstance(poly, LaurentPoly):
            poly = LaurentPoly.monomial(poly)
        return cls(poly)

    @property
    def denominator(self) -> LaurentPoly:
        return LaurentPoly.two_minus(self.sigma) if self.d else LaurentPoly.monomial(1)

    def normalized(self) -> "RationalCF":
        """Divide 2 - z^sigma out of the numerator when possible."""
        if self.d == 0:
            return self
        quotient = self.numerator.divide_two_minus(self.sigma)
        return RationalCF(quotient) if quotient is not None else self

    def _lift(self, sigma: int) -> LaurentPoly:
        if self.d == 1:
            if self.sigma != sigma:
                raise InvariantViolation("cannot combine denominators 2 - z and 2 - 1/z")
            return self.numerator
        return self.numerator * LaurentPoly.two_minus(sigma)

    def __add__(self, other: "RationalCF") -> "RationalCF":
        if self.d == 0 and other.d == 0:
            return RationalCF(self.numerator + other.numerator)
        sigma = self.sigma if self.d else other.sigma
        return RationalCF(self._lift(sigma) + other._lift(sigma), 1, sigma)

    def __neg__(self) -> "RationalCF":
        return RationalCF(-self.numerator, self.d, self.sigma)

    def reflect(self) -> "RationalCF":
        """Substitute z -> 1/z, which mirrors the coefficient sequence."""
        return RationalCF(self.numerator.reflect(), self.d, -self.sigma if self.d else 1)

    def __sub__(self, other: "RationalCF") -> "RationalCF":
        return self + (-other)

    def __mul__(self, factor: Union[LaurentPoly, Scalar]) -> "RationalCF":
        return RationalCF(self.numerator * factor, self.d, self.sigma)

    __rmul__ = __mul__

    def __truediv__(self, scalar: Scalar) -> "RationalCF":
        return RationalCF(self.numerator / scalar, self.d, self.sigma)

    def scale(self, coeff: Scalar, exponent: int = 0) -> "RationalCF":
        """Multiply by the monomial coeff * z^exponent."""
        return RationalCF(self.numerator.shift(exponent) * coeff, self.d, self.sigma)

    def at_one(self) -> Fraction:
        return self.numerator.at_one()

    def evaluate(self, theta):
        value = self.numerator.evaluate(theta)
        if self.d:
            value = value / self.denominator.evaluate(theta)
        return value

    def moment(self, order: int) -> Fraction:
        """
        Exact raw moment sum_k k^order * c_k of the coefficient sequence.

        Args:
            order: 0, 1 or 2

        Returns:
            Fraction: The moment, including the infinite geometric tail when d = 1
        """
        if order not in (0, 1, 2):
            raise ValueError(f"order must be 0, 1 or 2, got {order}")
        if self.d == 0:
            return self.numerator.moment(order)
        n0 = self.numerator.moment(0)
        n1 = self.numerator.moment(1)
        n2 = self.numerator.moment(2) - n1
        first = n1 + self.sigma * n0
        if order == 0:
            return n0
        if order == 1:
            return first
        return n2 + 2 * self.sigma * n1 + (3 - self.sigma) * n0 + first

    def coefficients(self, epsilon: Optional[Fraction] = None, kmax: int = 0) -> Tuple[Dict[int, Fraction], Fraction]:
        """
        Power series coefficients with a certified tail.

        Args:
            epsilon: Tail tolerance, required when d = 1
            kmax: Extract at least every |k| <= kmax

        Returns:
            (coefficients, tail): nonzero coefficients by exponent and the exact
            remaining mass value_at_one - sum(coefficients)
        """
        if self.d == 0:
            return self.numerator.coefficients, Fraction(0)
        if epsilon is None or epsilon <= 0:
            raise ValueError(f"epsilon must be positive for a rational entry, got {epsilon}")
        numerator = self.numerator if self.sigma == 1 else self.numerator.reflect()
        stop = max(numerator.max_exponent, kmax)
        total = numerator.at_one()
        coeffs: Dict[int, Fraction] = {}
        carry = Fraction(0)
        k = numerator.min_exponent
        collected = Fraction(0)
        while True:
            carry = (numerator[k] + carry) / 2
            if carry:
                coeffs[k] = carry
                collected += carry
            if k >= stop and total - collected <= epsilon:
                break
            k += 1
        if self.sigma == -1:
            coeffs = {-e: c for e, c in coeffs.items()}
        return dict(sorted(coeffs.items())), total - collected
