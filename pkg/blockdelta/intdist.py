"""
Exact finitely supported distributions on the integers
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Optional

from .errors import InvariantViolation


@dataclass(frozen=True)
class IntDist:
    """
    Rational probabilities on Z with a certified bound on the missing mass.

    Attributes:
        support: k -> probability, nonzero entries only, k ascending
        tail_bound: Probability mass not listed in ``support``
        w: Pattern label used when serialising
        t: Shift label used when serialising
    """

    support: Dict[int, Fraction]
    tail_bound: Fraction = Fraction(0)
    w: Optional[str] = None
    t: Optional[int] = None

    def __post_init__(self):
        cleaned = {int(k): Fraction(p) for k, p in sorted(self.support.items()) if p != 0}
        negative = [k for k, p in cleaned.items() if p < 0]
        if negative:
            raise InvariantViolation(f"negative probabilities at k={negative}")
        if self.tail_bound < 0:
            raise InvariantViolation(f"negative tail bound {self.tail_bound}")
        object.__setattr__(self, "support", cleaned)
        object.__setattr__(self, "tail_bound", Fraction(self.tail_bound))

    @classmethod
    def point_mass(cls, k: int = 0, **labels) -> "IntDist":
        return cls({k: Fraction(1)}, **labels)

    @classmethod
    def average(cls, parts: Iterable["IntDist"], **labels) -> "IntDist":
        """Uniform mixture of the given distributions."""
        parts = list(parts)
        merged: Dict[int, Fraction] = {}
        for part in parts:
            for k, p in part.support.items():
                merged[k] = merged.get(k, Fraction(0)) + p
        size = len(parts)
        return cls(
            {k: p / size for k, p in merged.items()},
            sum((part.tail_bound for part in parts), Fraction(0)) / size,
            **labels,
        )

    def __getitem__(self, k: int) -> Fraction:
        return self.support.get(k, Fraction(0))

    @property
    def is_exact(self) -> bool:
        return self.tail_bound == 0

    def mass(self) -> Fraction:
        return sum(self.support.values(), Fraction(0))

    def moment(self, order: int) -> Fraction:
        return sum((Fraction(k) ** order * p for k, p in self.support.items()), Fraction(0))

    def mean(self) -> Fraction:
        return self.moment(1)

    def upper_sum(self, start: int = 0) -> Fraction:
        """Listed mass on k >= start."""
        return sum((p for k, p in self.support.items() if k >= start), Fraction(0))

    def reflected(self) -> "IntDist":
        return IntDist({-k: p for k, p in self.support.items()}, self.tail_bound, self.w, self.t)

    def restricted(self, kmax: int) -> "IntDist":
        """Keep |k| <= kmax and move the rest into the tail bound."""
        kept = {k: p for k, p in self.support.items() if abs(k) <= kmax}
        dropped = sum((p for k, p in self.support.items() if abs(k) > kmax), Fraction(0))
        return IntDist(kept, self.tail_bound + dropped, self.w, self.t)

    def same_values(self, other: "IntDist") -> bool:
        return self.support == other.support and self.tail_bound == other.tail_bound

    def to_dict(self) -> dict:
        return {
            "w": self.w,
            "t": self.t,
            "support": [[k, f"{p.numerator}/{p.denominator}"] for k, p in self.support.items()],
            "tail_bound": f"{self.tail_bound.numerator}/{self.tail_bound.denominator}",
        }

    @classmethod
    def from_counts(cls, counts: Mapping[int, int], total: int, **labels) -> "IntDist":
        listed = {k: Fraction(c, total) for k, c in counts.items()}
        return cls(listed, 1 - sum(listed.values(), Fraction(0)), **labels)
