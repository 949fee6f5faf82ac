"""
Exact characteristic functions of the conditional distributions of d_t

For n in the residue class j modulo 2^(l-1), the distribution of d_t(n) has
characteristic function gamma_{t,j}, stored exactly as a ``RationalCF`` in
z = e(iθ). The vectors Gamma_t = (gamma_{t,j})_j satisfy

    Gamma_{2t}   = A_{2t} Gamma_t
    Gamma_{2t+1} = B_{2t+1} Gamma_t + C_{2t+1} Gamma_{t+1}

with monomial matrices A_t and their even/odd row masks B_t, C_t.
"""

import logging
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import linalg
from .descent import PairDescent
from .direct import phi
from .errors import InvariantViolation, ResourceLimitError
from .intdist import IntDist
from .laurent import LaurentPoly, RationalCF
from .words import Pattern

logger = logging.getLogger(__name__)

DEFAULT_LENGTH_CAP = 12
DEFAULT_TAIL_EPSILON = Fraction(1, 10 ** 12)
HALF = Fraction(1, 2)

_length_cap = DEFAULT_LENGTH_CAP


def set_length_cap(cap: int) -> None:
    """Change the largest pattern length accepted by the engine."""
    global _length_cap
    if cap < 2:
        raise ValueError(f"length cap must be at least 2, got {cap}")
    if cap > DEFAULT_LENGTH_CAP:
        logger.warning(
            "pattern length cap raised to %d; Gamma vectors hold 2^%d entries and memory grows accordingly",
            cap,
            cap - 1,
        )
    _length_cap = cap


def check_length(w: Pattern) -> None:
    if w.length > _length_cap:
        raise ResourceLimitError(
            f"pattern length {w.length} exceeds the cap of {_length_cap} (use --allow-large to lift it)"
        )


Entry = Tuple[int, Fraction, int]


@dataclass(frozen=True)
class CFMatrix:
    """
    Square matrix whose nonzero entries are monomials c * z^e.

    Attributes:
        rows: For each row, the tuple of (column, c, e) entries
    """

    rows: Tuple[Tuple[Entry, ...], ...]

    @property
    def size(self) -> int:
        return len(self.rows)

    def entry(self, j: int, k: int) -> Optional[Tuple[Fraction, int]]:
        for col, c, e in self.rows[j]:
            if col == k:
                return c, e
        return None

    def masked(self, parity: int) -> "CFMatrix":
        """Zero out every row whose index does not have the given parity."""
        return CFMatrix(tuple(row if j % 2 == parity else () for j, row in enumerate(self.rows)))

    def __add__(self, other: "CFMatrix") -> "CFMatrix":
        rows = []
        for mine, theirs in zip(self.rows, other.rows):
            if mine and theirs:
                raise ValueError("only matrices with disjoint nonzero rows can be added")
            rows.append(mine or theirs)
        return CFMatrix(tuple(rows))

    def moment_matrix(self, order: int = 0) -> List[List[Fraction]]:
        """
        Entries c * e^order as exact rationals.

        Order 0 is the matrix at z = 1; order 1 is -i times the first
        θ-derivative at 0; order 2 is minus the second derivative at 0.
        """
        result = [[Fraction(0)] * self.size for _ in range(self.size)]
        for j, row in enumerate(self.rows):
            for col, c, e in row:
                result[j][col] += c * Fraction(e) ** order
        return result

    def at_one(self) -> List[List[Fraction]]:
        return self.moment_matrix(0)

    def row_moments(self, order: int) -> List[Fraction]:
        """The vector moment_matrix(order) * 1."""
        return [sum((c * Fraction(e) ** order for _, c, e in row), Fraction(0)) for row in self.rows]

    def evaluate(self, theta: float) -> np.ndarray:
        result = np.zeros((self.size, self.size), dtype=complex)
        for j, row in enumerate(self.rows):
            for col, c, e in row:
                result[j, col] += float(c) * np.exp(1j * e * theta)
        return result

    def apply(self, vector: "CFVector") -> "CFVector":
        entries = []
        for row in self.rows:
            acc = RationalCF.polynomial(0)
            for col, c, e in row:
                acc = acc + vector.entries[col].scale(c, e)
            entries.append(acc)
        return CFVector(tuple(entries))


@dataclass(frozen=True)
class CFVector:
    """The vector Gamma_t of 2^(l-1) characteristic functions."""

    entries: Tuple[RationalCF, ...]

    @classmethod
    def ones(cls, size: int) -> "CFVector":
        return cls(tuple(RationalCF.polynomial(1) for _ in range(size)))

    def __add__(self, other: "CFVector") -> "CFVector":
        return CFVector(tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, j: int) -> RationalCF:
        return self.entries[j]

    def normalized(self) -> "CFVector":
        return CFVector(tuple(entry.normalized() for entry in self.entries))

    def average(self) -> RationalCF:
        total = RationalCF.polynomial(0)
        for entry in self.entries:
            total = total + entry
        return (total / len(self.entries)).normalized()

    def at_one(self) -> List[Fraction]:
        return [entry.at_one() for entry in self.entries]

    def moments(self, order: int) -> List[Fraction]:
        return [entry.moment(order) for entry in self.entries]

    def evaluate(self, theta) -> np.ndarray:
        """Entry values at z = e(iθ); shape (size,) or (size, len(theta))."""
        return np.array([entry.evaluate(theta) for entry in self.entries])

    def max_span(self) -> int:
        return max(entry.numerator.span for entry in self.entries)


@lru_cache(maxsize=None)
def _build_A(w: Pattern, residue: int) -> CFMatrix:
    size = 1 << (w.length - 1)
    half = size >> 1
    rows = tuple(
        (
            (j >> 1, HALF, phi(w, residue, j)),
            ((j >> 1) + half, HALF, phi(w, residue, j + size)),
        )
        for j in range(size)
    )
    return CFMatrix(rows)


def build_A(w: Pattern, t: int) -> CFMatrix:
    """
    The matrix A_t, which depends only on t mod 2^l.

    Row j has z^phi(t, j) / 2 in column j // 2 and
    z^phi(t, j + 2^(l-1)) / 2 in column j // 2 + 2^(l-2).
    """
    check_length(w)
    return _build_A(w, t % (1 << w.length))


def build_B(w: Pattern, t: int) -> CFMatrix:
    return build_A(w, t).masked(0)


def build_C(w: Pattern, t: int) -> CFMatrix:
    return build_A(w, t).masked(1)


def _bit_reverse(j: int, width: int) -> int:
    result = 0
    for _ in range(width):
        result = (result << 1) | (j & 1)
        j >>= 1
    return result


@lru_cache(maxsize=None)
def gamma1(w: Pattern) -> CFVector:
    """
    Solve (I - C_1) Gamma_1 = B_1 * 1 exactly.

    Ordering the unknowns by the bit reversal of their l-1 digit index makes
    the system lower triangular; only the last unknown can depend on itself,
    with pivot 1/2 for non-constant w and 1 - z^(±1)/2 for 0^l and 1^l.

    Raises:
        InvariantViolation: If the system is not triangular in that order
    """
    check_length(w)
    size = 1 << (w.length - 1)
    B, C = build_B(w, 1), build_C(w, 1)
    solved: Dict[int, RationalCF] = {}
    for j in sorted(range(size), key=lambda k: _bit_reverse(k, w.length - 1)):
        rhs = RationalCF(sum((LaurentPoly.monomial(c, e) for _, c, e in B.rows[j]), LaurentPoly()))
        diagonal = None
        for col, c, e in C.rows[j]:
            if col == j:
                diagonal = (c, e)
                continue
            if col not in solved:
                raise InvariantViolation(f"Gamma_1 system for {w} is not triangular at row {j}")
            rhs = rhs + solved[col].scale(c, e)
        if diagonal is None:
            solved[j] = rhs
        elif diagonal[1] == 0:
            solved[j] = rhs / (1 - diagonal[0])
        elif diagonal[0] == HALF and rhs.d == 0:
            solved[j] = RationalCF(rhs.numerator * 2, 1, diagonal[1]).normalized()
        else:
            raise InvariantViolation(f"unexpected pivot 1 - {diagonal[0]}z^{diagonal[1]} for {w}")
    vector = CFVector(tuple(solved[j] for j in range(size)))
    logger.debug("Gamma_1 for %s: %s", w, vector)
    return vector


def _span_limit(w: Pattern, t: int) -> int:
    return 4 * ((t + 1).bit_length() + w.length) + 16


def _checked(w: Pattern, t: int, vector: CFVector) -> CFVector:
    vector = vector.normalized()
    if vector.max_span() > _span_limit(w, t):
        raise ResourceLimitError(
            f"numerator span {vector.max_span()} for {w} at t={t} exceeds {_span_limit(w, t)}"
        )
    return vector


def _pair_descent(w: Pattern, memo=None) -> PairDescent:
    size = 1 << (w.length - 1)

    def odd_row(s, pair):
        return _checked(w, 2 * s + 1, build_B(w, 2 * s + 1).apply(pair[0]) + build_C(w, 2 * s + 1).apply(pair[1]))

    def step_even(s, pair):
        return _checked(w, 2 * s, build_A(w, 2 * s).apply(pair[0])), odd_row(s, pair)

    def step_odd(s, pair):
        return odd_row(s, pair), _checked(w, 2 * s + 2, build_A(w, 2 * s + 2).apply(pair[1]))

    return PairDescent((CFVector.ones(size), gamma1(w)), step_even, step_odd, memo)


_descents: Dict[Pattern, PairDescent] = {}
_descents_lock = threading.Lock()


def descent_for(w: Pattern, memo=None) -> PairDescent:
    """The shared Gamma pair descent of w, created on first use."""
    check_length(w)
    descent = _descents.get(w)
    if descent is None:
        with _descents_lock:
            descent = _descents.setdefault(w, _pair_descent(w, memo))
    return descent


def memo_tables() -> Dict[Pattern, dict]:
    """Snapshot of every Gamma memo, for persisting between runs."""
    return {w: descent.memo for w, descent in _descents.items()}


def gamma_pair(w: Pattern, t: int) -> Tuple[CFVector, CFVector]:
    """
    The pair (Gamma_t, Gamma_{t+1}).

    Args:
        w: The pattern
        t: Nonnegative shift

    Returns:
        tuple: Two CFVectors with 2^(l-1) entries each
    """
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    return descent_for(w)(t)


def gamma_vec(w: Pattern, t: int) -> CFVector:
    return gamma_pair(w, t)[0]


@lru_cache(maxsize=4096)
def gamma(w: Pattern, t: int) -> RationalCF:
    """The characteristic function gamma_t of d_t, the average of Gamma_t."""
    return gamma_vec(w, t).average()


def _tail_epsilon(w: Pattern, epsilon: Optional[Fraction]) -> Optional[Fraction]:
    if epsilon is None:
        return DEFAULT_TAIL_EPSILON if w.is_constant else None
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    return epsilon


def dist_conditional(w: Pattern, t: int, j: int, epsilon: Optional[Fraction] = None, kmax: int = 0) -> IntDist:
    """
    The conditional distribution delta_{t,j} read off Gamma_t.

    Args:
        w: The pattern
        t: Nonnegative shift
        j: Residue class, 0 <= j < 2^(l-1)
        epsilon: Tail tolerance for constant patterns
        kmax: Extract at least every |k| <= kmax

    Returns:
        IntDist: Exact probabilities with the certified missing mass
    """
    vector = gamma_vec(w, t)
    if not 0 <= j < len(vector):
        raise ValueError(f"residue j must lie in [0, {len(vector)}), got {j}")
    coeffs, tail = vector[j].coefficients(_tail_epsilon(w, epsilon), kmax)
    return IntDist(coeffs, tail, w=str(w), t=t)


def dist(w: Pattern, t: int, epsilon: Optional[Fraction] = None, kmax: int = 0) -> IntDist:
    """
    The distribution delta_t of d_t, the uniform average of the conditional ones.

    Example:
        >>> dist(Pattern.parse("11"), 0).support
        {0: Fraction(1, 1)}
    """
    size = 1 << (w.length - 1)
    return IntDist.average(
        (dist_conditional(w, t, j, epsilon, kmax) for j in range(size)),
        w=str(w),
        t=t,
    )


def eval_cf(w: Pattern, t: int, theta):
    """gamma_t(θ) in floating point; θ may be a scalar or a numpy array."""
    return gamma(w, t).evaluate(theta)


def snake_product(w: Pattern, bits: Sequence[int]) -> List[List[Fraction]]:
    """
    The product tau(b_0) ... tau(b_{h-1}) at z = 1 with tau(0) = B, tau(1) = C.

    For h >= l - 1 every entry of the row numbered [b_{l-2} ... b_0]_2 is
    1/2^h and all other rows vanish.
    """
    B, C = build_B(w, 0).at_one(), build_C(w, 0).at_one()
    product = linalg.identity(1 << (w.length - 1))
    for bit in bits:
        product = linalg.matmul(product, C if bit else B)
    return product


def matrix_power_at_one(w: Pattern, power: int) -> List[List[Fraction]]:
    A = build_A(w, 0).at_one()
    result = linalg.identity(len(A))
    for _ in range(power):
        result = linalg.matmul(result, A)
    return result


def all_entries_equal(vector: CFVector) -> bool:
    first = vector.entries[0]
    return all(entry == first for entry in vector.entries[1:])


def symmetry_holds(w: Pattern, t: int) -> bool:
    """gamma^{w̄}_t(z) == gamma^w_t(1/z) as exact rational functions."""
    return gamma(w.negate(), t) == gamma(w, t).reflect()


def conditional_symmetry_mismatches(w: Pattern, t: int) -> List[int]:
    """
    Residues j where gamma^w_{t,j}(z) != gamma^{w̄}_{t,j'}(1/z), j' = -(j+t+1) mod 2^(l-1).

    An empty list means the refined reflection identity holds at t.
    """
    mine, theirs = gamma_vec(w, t), gamma_vec(w.negate(), t)
    size = len(mine)
    return [j for j in range(size) if mine[j] != theirs[(-(j + t + 1)) % size].reflect()]


def clear_caches() -> None:
    """Forget every memoized matrix, Gamma vector and descent."""
    with _descents_lock:
        _descents.clear()
    _build_A.cache_clear()
    gamma1.cache_clear()
    gamma.cache_clear()
