"""
Exact first and second moments of the distributions of d_t
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Tuple

from . import linalg
from .cfengine import build_A, check_length, gamma1
from .descent import PairDescent
from .words import DigitString, Pattern, blocks01, prefix_suffix_set

logger = logging.getLogger(__name__)

Q_CASES = ("generic", "i", "ii", "iii", "iv")


@dataclass(frozen=True)
class MomentVec:
    """The conditional means m_{t,j}, j = 0 .. 2^(l-1) - 1."""

    entries: Tuple[Fraction, ...]

    def __getitem__(self, j: int) -> Fraction:
        return self.entries[j]

    def __len__(self) -> int:
        return len(self.entries)

    def total(self) -> Fraction:
        return sum(self.entries, Fraction(0))

    def sup_norm(self) -> Fraction:
        return max(abs(m) for m in self.entries)


@dataclass(frozen=True)
class VarData:
    """
    Second-moment data at one shift t.

    Attributes:
        V: Conditional second moments v_{t,j}
        M: Conditional means m_{t,j}
        v: Variance v_t of d_t (the average of V, since the mean is 0)
        q: Increment q_t of the variance recursion
        u: Conditional variances v_{t,j} - m_{t,j}^2
        interval_width: Width of the certified interval around v (always 0,
            the base case is exact for every pattern)
    """

    w: Pattern
    t: int
    V: Tuple[Fraction, ...]
    M: Tuple[Fraction, ...]
    v: Fraction
    q: Fraction
    u: Tuple[Fraction, ...]
    interval_width: Fraction = Fraction(0)

    def spread(self) -> Fraction:
        """max_j v_{t,j} - min_j v_{t,j}."""
        return max(self.V) - min(self.V)


def _border_weight(x: DigitString, w: Pattern) -> int:
    return sum(1 << (len(p) - 1) for p in prefix_suffix_set(x, w))


@lru_cache(maxsize=None)
def _mean_vec(w: Pattern, residue: int) -> MomentVec:
    width = w.length - 1
    size = 1 << width
    entries = []
    for j in range(size):
        x = DigitString.from_int(j, width)
        y = DigitString.from_int((j + residue) % size, width)
        entries.append(Fraction(_border_weight(y, w) - _border_weight(x, w), size))
    return MomentVec(tuple(entries))


def mean_vec(w: Pattern, t: int) -> MomentVec:
    """
    Conditional means from the prefix-suffix closed form.

    m_{t,j} = 2^-(l-1) * (sum_{p in P(y)} 2^(|p|-1) - sum_{p in P(x)} 2^(|p|-1))
    where x and y are the (l-1)-digit words of j and j + t.

    Args:
        w: The pattern
        t: Nonnegative shift

    Returns:
        MomentVec: The exact means, periodic in t with period 2^(l-1)
    """
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    return _mean_vec(w, t % (1 << (w.length - 1)))


def _at_one(w: Pattern) -> Tuple[List[List[Fraction]], List[List[Fraction]], List[List[Fraction]]]:
    A = build_A(w, 0)
    return A.at_one(), A.masked(0).at_one(), A.masked(1).at_one()


def _affine_steps(w: Pattern, drift):
    """Step functions for X_{2t} = A X_t + drift(2t), X_{2t+1} = B X_t + C X_{t+1} + drift(2t+1)."""
    A, B, C = _at_one(w)

    def combine(matrix, x, shift):
        return tuple(a + b for a, b in zip(linalg.matvec(matrix, x), drift(shift)))

    def odd(s, pair):
        low = linalg.matvec(B, pair[0])
        return tuple(a + b for a, b in zip(low, combine(C, pair[1], 2 * s + 1)))

    def step_even(s, pair):
        return combine(A, pair[0], 2 * s), odd(s, pair)

    def step_odd(s, pair):
        return odd(s, pair), combine(A, pair[1], 2 * s + 2)

    return step_even, step_odd


def _identity_minus_c(w: Pattern) -> List[List[Fraction]]:
    C = build_A(w, 1).masked(1).at_one()
    size = len(C)
    return [[Fraction(int(i == j)) - C[i][j] for j in range(size)] for i in range(size)]


def drift_vector(w: Pattern, t: int) -> Tuple[Fraction, ...]:
    """U_t = -i A_t'(0) 1, entries in {-1/2, 0, 1/2}."""
    return tuple(build_A(w, t).row_moments(1))


_mean_descents: Dict[Pattern, PairDescent] = {}


def _mean_descent(w: Pattern) -> PairDescent:
    descent = _mean_descents.get(w)
    if descent is None:
        check_length(w)
        size = 1 << (w.length - 1)
        first = tuple(linalg.solve(_identity_minus_c(w), drift_vector(w, 1)))
        steps = _affine_steps(w, lambda t: drift_vector(w, t))
        descent = _mean_descents.setdefault(w, PairDescent(((Fraction(0),) * size, first), *steps))
    return descent


def mean_vec_rec(w: Pattern, t: int) -> MomentVec:
    """
    Conditional means from M_{2t} = A M_t + U_{2t}, M_{2t+1} = B M_t + C M_{t+1} + U_{2t+1}.

    M_1 solves (I - C_1(0)) M_1 = U_1 exactly.
    """
    return MomentVec(_mean_descent(w)[t])


@lru_cache(maxsize=None)
def _q_vec(w: Pattern, residue: int) -> Tuple[Fraction, ...]:
    A = build_A(w, residue)
    first = A.moment_matrix(1)
    second = A.row_moments(2)
    low, high = mean_vec(w, residue >> 1), mean_vec(w, (residue >> 1) + 1)
    entries = []
    for j, row in enumerate(first):
        source = high if residue & 1 and j & 1 else low
        entries.append(2 * sum((c * m for c, m in zip(row, source.entries) if c), Fraction(0)) + second[j])
    return tuple(entries)


def q_vec(w: Pattern, t: int) -> Tuple[Fraction, ...]:
    """
    The vector Q_t, periodic in t with period 2^l.

    Q_{2s} = 2 A'_{2s} M_s + A''_{2s} 1 and
    Q_{2s+1} = 2 (B'_{2s+1} M_s + C'_{2s+1} M_{s+1}) + A''_{2s+1} 1,
    where X' has entries c*e and X'' has entries c*e^2.
    """
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    return _q_vec(w, t % (1 << w.length))


def q_scalar(w: Pattern, t: int) -> Fraction:
    """q_t, the average of the entries of Q_t."""
    entries = q_vec(w, t)
    return sum(entries, Fraction(0)) / len(entries)


def q_case(w: Pattern, t: int) -> str:
    """
    Classify (w, t) into the exceptional cases of the lower bound on q_t.

    Returns:
        str: "i" for t = 0 mod 2^l; "ii"/"iii" for w in {01^(l-1), 10^(l-1)}
        with t = 2^(l-1) resp. 2^(l-1) ± 1; "iv" for
        w in {001^(l-2), 010^(l-2), 101^(l-2), 110^(l-2)} with t = ±2^(l-2);
        "generic" otherwise. Residues are mod 2^l and checked in that order.
    """
    ell = w.length
    modulus = 1 << ell
    residue = t % modulus
    text = str(w)
    if residue == 0:
        return "i"
    half = 1 << (ell - 1)
    if text in ("0" + "1" * (ell - 1), "1" + "0" * (ell - 1)):
        if residue == half:
            return "ii"
        if residue in (half - 1, half + 1):
            return "iii"
    quarter = 1 << (ell - 2)
    pairs = {"00" + "1" * (ell - 2), "01" + "0" * (ell - 2), "10" + "1" * (ell - 2), "11" + "0" * (ell - 2)}
    if text in pairs and residue in (quarter, modulus - quarter):
        return "iv"
    return "generic"


def q_lower_bound(w: Pattern, t: int) -> Fraction:
    """
    The lower bound on q_t implied by its case (equality in cases i-iii).
    """
    ell = w.length
    case = q_case(w, t)
    if case == "i":
        return Fraction(0)
    if case == "ii":
        return Fraction(1, 1 << (ell - 1)) * (Fraction(1, 1 << (ell - 2)) - 1)
    if case in ("iii", "iv"):
        return Fraction(1, 1 << (2 * ell - 2))
    return Fraction(1, 1 << (ell + 1))


def q_upper_bound(w: Pattern) -> Fraction:
    return Fraction(3, 1 << (w.length - 1))


def second_moments_at_one(w: Pattern) -> Tuple[Fraction, ...]:
    """V_1 from the linear system (I - C_1(0)) V_1 = Q_1."""
    return tuple(linalg.solve(_identity_minus_c(w), q_vec(w, 1)))


_var_descents: Dict[Pattern, PairDescent] = {}
_scalar_descents: Dict[Pattern, PairDescent] = {}


def _var_descent(w: Pattern) -> PairDescent:
    descent = _var_descents.get(w)
    if descent is None:
        size = 1 << (w.length - 1)
        first = tuple(gamma1(w).moments(2))
        steps = _affine_steps(w, lambda t: q_vec(w, t))
        descent = _var_descents.setdefault(w, PairDescent(((Fraction(0),) * size, first), *steps))
    return descent


def _scalar_descent(w: Pattern) -> PairDescent:
    descent = _scalar_descents.get(w)
    if descent is None:
        check_length(w)

        def odd(s, pair):
            return (pair[0] + pair[1]) / 2 + q_scalar(w, 2 * s + 1)

        def step_even(s, pair):
            return pair[0] + q_scalar(w, 2 * s), odd(s, pair)

        def step_odd(s, pair):
            return odd(s, pair), pair[1] + q_scalar(w, 2 * s + 2)

        base = (Fraction(0), 2 * q_scalar(w, 1))
        descent = _scalar_descents.setdefault(w, PairDescent(base, step_even, step_odd))
    return descent


def var_vec(w: Pattern, t: int) -> VarData:
    """
    Second moments V_t by the pair descent, with V_1 from the exact second
    moments of Gamma_1.

    Args:
        w: The pattern
        t: Nonnegative shift

    Returns:
        VarData: Exact vectors and scalars at t
    """
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    V = _var_descent(w)[t]
    M = mean_vec(w, t).entries
    return VarData(
        w=w,
        t=t,
        V=V,
        M=M,
        v=sum(V, Fraction(0)) / len(V),
        q=q_scalar(w, t),
        u=tuple(v - m * m for v, m in zip(V, M)),
    )


def variance(w: Pattern, t: int) -> Fraction:
    """
    The variance v_t of d_t by v_{2t} = v_t + q_{2t}, v_{2t+1} = (v_t + v_{t+1})/2 + q_{2t+1}.

    Example:
        >>> variance(Pattern.parse("01"), 1)
        Fraction(1, 2)
    """
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    return _scalar_descent(w)[t]


def variance_bounds(w: Pattern, t: int) -> Tuple[Fraction, Fraction]:
    """(m * N, M * N) with N = occ_01(t), m = 1/4^(l-1), M = 3(l+2)/2^(l-2)."""
    ell, blocks = w.length, blocks01(t)
    return Fraction(blocks, 1 << (2 * ell - 2)), Fraction(3 * (ell + 2) * blocks, 1 << (ell - 2))


def variance_table(w: Pattern, ts: Iterable[int]) -> List[Dict[str, object]]:
    """Rows (t, v_t, q_t, occ_01(t), lower_bound, upper_bound) for CSV export."""
    rows = []
    for t in ts:
        lower, upper = variance_bounds(w, t)
        rows.append(
            {
                "t": t,
                "v_t": variance(w, t),
                "q_t": q_scalar(w, t),
                "occ01": blocks01(t),
                "lower_bound": lower,
                "upper_bound": upper,
            }
        )
    return rows


def block_append_sum(w: Pattern, t: int, k: int) -> Fraction:
    """sum_{h=1..k} q_{2^h t}, which equals v_{2^k t} - v_t."""
    return sum((q_scalar(w, t << h) for h in range(1, k + 1)), Fraction(0))


def clear_caches() -> None:
    _mean_vec.cache_clear()
    _q_vec.cache_clear()
    _mean_descents.clear()
    _var_descents.clear()
    _scalar_descents.clear()
