"""
Direct evaluation of d_t(n) and the brute-force density oracle
"""

import logging
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np

from .errors import ResourceLimitError
from .intdist import IntDist
from .words import DigitString, Pattern, count_occurrences, occ

logger = logging.getLogger(__name__)

# Largest enumeration exponent scanned number by number.
SCAN_LIMIT_BITS = 26
# Below this exponent "auto" scans; above it the progression classes are enumerated.
AUTO_SCAN_BITS = 16
# Window arithmetic is done in int64.
MAX_CLASS_BITS = 62
BLOCK_BITS = 18

STRATEGIES = ("auto", "scan", "classes")


def d(w: Pattern, t: int, n: int) -> int:
    """
    The difference d_t(n) = occ_w(n + t) - occ_w(n).

    For w = 0^l the length correction -|(n+t)_2| + |(n)_2| is added, with
    the empty expansion for n = 0.

    Args:
        w: The pattern
        t: Nonnegative shift
        n: Nonnegative integer

    Returns:
        int: The difference
    """
    if t < 0 or n < 0:
        raise ValueError(f"t and n must be nonnegative, got t={t}, n={n}")
    value = occ(w, n + t) - occ(w, n)
    if w.is_zeros:
        value -= (n + t).bit_length() - n.bit_length()
    return value


def d_window(w: Pattern, u: DigitString, x: DigitString, z: DigitString) -> int:
    """
    Evaluate |uz|_w - |ux|_w on a fixed digit window.

    When [z] = [x] + t with no carry out of x, this equals d(w, t, [vux])
    for every prefix v.

    Raises:
        ValueError: If |u| != len(w) - 1 or |x| != |z|
    """
    if len(u) != w.length - 1:
        raise ValueError(f"u must have length {w.length - 1}, got {len(u)}")
    if len(x) != len(z):
        raise ValueError(f"x and z must have equal length, got {len(x)} and {len(z)}")
    return count_occurrences(u + z, w) - count_occurrences(u + x, w)


def phi(w: Pattern, t: int, n: int) -> int:
    """
    The increment in d_t(n) = d_{t'}(n // 2) + phi(t, n).

    Returns +1 if t == W - n != 0, -1 if t != W - n == 0 (all mod 2^l),
    0 otherwise.
    """
    modulus = 1 << w.length
    shift = t % modulus
    gap = (w.value - n) % modulus
    if shift == gap and shift != 0:
        return 1
    if shift != gap and gap == 0:
        return -1
    return 0


def exact_lambda(w: Pattern, t: int, kmax: int = 0) -> int:
    """
    Smallest enumeration exponent for which the oracle is exact.

    Non-constant patterns need h(t) + 2l - 2 bits, independent of kmax.
    Constant patterns are exact on |k| <= kmax from
    h(t) + l + kmax + max(l, h(t) + 1) bits.

    Args:
        w: The pattern
        t: Nonnegative shift
        kmax: Largest |k| that must be exact (constant patterns only)

    Returns:
        int: The exponent lambda
    """
    if t < 0 or kmax < 0:
        raise ValueError(f"t and kmax must be nonnegative, got t={t}, kmax={kmax}")
    ell, h = w.length, t.bit_length()
    if t == 0:
        return ell - 1
    if not w.is_constant:
        return h + 2 * ell - 2
    return h + ell + kmax + max(ell, h + 1)


Tally = Dict[int, Counter]


@dataclass
class OracleResult:
    """
    Exact counts of d_t(n) over n in [0, 2^lambda).

    Attributes:
        w: The pattern
        t: The shift
        lam: Enumeration exponent
        counts: k -> number of n with d_t(n) = k
        exact: Whether counts / 2^lam are exact densities (on |k| <= kmax for
            constant patterns)
        kmax: Exactness range for constant patterns, None otherwise
        residue_counts: j -> (k -> count) restricted to n = j mod 2^(l-1)
    """

    w: Pattern
    t: int
    lam: int
    counts: Dict[int, int]
    exact: bool
    kmax: Optional[int] = None
    residue_counts: Dict[int, Dict[int, int]] = field(default_factory=dict)

    def total(self) -> int:
        return sum(self.counts.values())

    def density(self, k: int) -> Fraction:
        return Fraction(self.counts.get(k, 0), 1 << self.lam)

    def conditional_density(self, j: int, k: int) -> Fraction:
        return Fraction(self.residue_counts.get(j, {}).get(k, 0), 1 << (self.lam - self.w.length + 1))

    def conditional_mean(self, j: int) -> Fraction:
        """Average of d_t over the residue class n = j (mod 2^(l-1))."""
        row = self.residue_counts.get(j, {})
        return Fraction(sum(k * c for k, c in row.items()), 1 << (self.lam - self.w.length + 1))

    def to_int_dist(self) -> IntDist:
        """Densities on the exact range; everything else goes into the tail bound."""
        counts = self.counts
        if self.kmax is not None:
            counts = {k: c for k, c in counts.items() if abs(k) <= self.kmax}
        return IntDist.from_counts(counts, 1 << self.lam, w=str(self.w), t=self.t)

    def to_dict(self) -> dict:
        return {
            "w": str(self.w),
            "t": self.t,
            "lambda": self.lam,
            "exact": self.exact,
            "counts": [[k, self.counts[k]] for k in sorted(self.counts)],
        }


def _occ_array(n: np.ndarray, ell: int, target: int, nbits: int) -> np.ndarray:
    mask = (1 << ell) - 1
    total = np.zeros(n.shape, dtype=np.int64)
    for i in range(nbits):
        shifted = n >> i
        total += ((shifted & mask) == target) & (shifted != 0)
    return total


def _bitlen_array(n: np.ndarray, nbits: int) -> np.ndarray:
    total = np.zeros(n.shape, dtype=np.int64)
    for i in range(nbits):
        total += (n >> i) != 0
    return total


def _window_array(prefix: np.ndarray, tail: np.ndarray, width: int, ell: int, target: int) -> np.ndarray:
    """Occurrences of w in the words u·v, u of length l-1 and v of ``width`` digits."""
    mask = (1 << ell) - 1
    joined = (prefix << width) | tail
    total = np.zeros(joined.shape, dtype=np.int64)
    for i in range(width):
        total += ((joined >> i) & mask) == target
    return total


def _tally(residues: np.ndarray, values: np.ndarray, weight: int = 1) -> Tally:
    tally: Tally = {}
    if residues.size == 0:
        return tally
    pairs, counts = np.unique(np.stack([residues, values]), axis=1, return_counts=True)
    for (j, k), c in zip(pairs.T.tolist(), counts.tolist()):
        tally.setdefault(j, Counter())[k] += c * weight
    return tally


def _merge(into: Tally, part: Tally) -> Tally:
    for j, row in part.items():
        into.setdefault(j, Counter()).update(row)
    return into


def _scan_block(task: Tuple[int, int, bool, int, int, int, int]) -> Tally:
    """Count d over [start, stop) with the carry-closure rule at bit lam - l + 1."""
    ell, target, zeros, t, lam, start, stop = task
    n = np.arange(start, stop, dtype=np.int64)
    low = lam - ell + 1
    low_mask = (1 << low) - 1
    escaping = (n & low_mask) + t > low_mask
    lifted = ((n >> low) << (low + 1)) | (n & low_mask)
    n_eff = np.where(escaping, lifted, n)
    nbits = (int(n_eff.max()) + t).bit_length() + 1
    shifted = n_eff + t
    values = _occ_array(shifted, ell, target, nbits) - _occ_array(n_eff, ell, target, nbits)
    if zeros:
        values -= _bitlen_array(shifted, nbits) - _bitlen_array(n_eff, nbits)
    residues = n & ((1 << (ell - 1)) - 1)
    return _tally(residues, values)


def _scan(w: Pattern, t: int, lam: int, workers: int) -> Tally:
    size = 1 << lam
    step = min(size, 1 << BLOCK_BITS)
    tasks = [
        (w.length, w.value, w.is_zeros, t, lam, start, min(start + step, size))
        for start in range(0, size, step)
    ]
    logger.debug("scanning %s t=%d lambda=%d in %d blocks", w, t, lam, len(tasks))
    tally: Tally = {}
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            for part in ex.map(_scan_block, tasks):
                _merge(tally, part)
    else:
        for task in tasks:
            _merge(tally, _scan_block(task))
    return tally


def _classes(w: Pattern, t: int, lam: int) -> Tally:
    """
    Enumerate the progression classes of n that share one value of d_t.

    Every n < 2^lam falls in exactly one class: a window u·x where adding t
    to x causes no carry out of x, a window u·0·1^s·y where the carry out
    of y runs through 1^s and stops at the 0, or (for the longest runs) the
    carry-closed remainder u·1^s·y evaluated as u·0·1^s·y. Windows have
    equal length on both sides, so the 0^l length correction cancels.
    """
    ell, target, h = w.length, w.value, t.bit_length()
    res_mask = (1 << (ell - 1)) - 1
    s_max = lam - ell - h
    u = np.arange(1 << (ell - 1), dtype=np.int64)
    tally: Tally = {}

    x = np.arange(0, (1 << h) - t, dtype=np.int64)
    prefix, low = [a.ravel() for a in np.meshgrid(u, x, indexing="ij")]
    values = _window_array(prefix, low + t, h, ell, target) - _window_array(prefix, low, h, ell, target)
    _merge(tally, _tally(((prefix << h) | low) & res_mask, values, 1 << (lam - (ell - 1 + h))))

    y = np.arange((1 << h) - t, 1 << h, dtype=np.int64)
    prefix, low = [a.ravel() for a in np.meshgrid(u, y, indexing="ij")]
    for s in range(0, s_max + 2):
        width = s + 1 + h
        before = (((1 << s) - 1) << h) | low
        after = (1 << (s + h)) | (low + t - (1 << h))
        values = _window_array(prefix, after, width, ell, target) - _window_array(prefix, before, width, ell, target)
        if s <= s_max:
            residues = ((prefix << width) | before) & res_mask
            weight = 1 << (lam - (ell + s + h))
        else:
            residues = ((prefix << (s + h)) | (((1 << s) - 1) << h) | low) & res_mask
            weight = 1
        _merge(tally, _tally(residues, values, weight))
    return tally


def empirical_dist(
    w: Pattern,
    t: int,
    lam: Optional[int] = None,
    *,
    kmax: int = 0,
    strategy: str = "auto",
    workers: int = 1,
) -> OracleResult:
    """
    Exact counts of d_t(n) for n in [0, 2^lam).

    Args:
        w: The pattern
        t: Nonnegative shift
        lam: Enumeration exponent; defaults to ``exact_lambda(w, t, kmax)``
        kmax: Exactness range requested for constant patterns
        strategy: ``"scan"`` evaluates every n, ``"classes"`` enumerates the
            progression classes, ``"auto"`` picks by size
        workers: Process count for scanning

    Returns:
        OracleResult: Counts summing to 2^lam

    Raises:
        ValueError: If lam < l - 1 or the strategy is unknown
        ResourceLimitError: If lam exceeds the scan or window limits
    """
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}, expected one of {STRATEGIES}")
    ell, h = w.length, t.bit_length()
    needed = exact_lambda(w, t, kmax)
    if lam is None:
        lam = needed
    if lam < ell - 1:
        raise ValueError(f"lambda must be at least {ell - 1}, got {lam}")
    if strategy == "auto":
        strategy = "scan" if lam <= AUTO_SCAN_BITS or lam < ell - 1 + h else "classes"
    if strategy == "classes" and lam < ell - 1 + h:
        raise ValueError(f"class enumeration needs lambda >= {ell - 1 + h}, got {lam}")
    if strategy == "scan" and lam > SCAN_LIMIT_BITS:
        raise ResourceLimitError(f"lambda={lam} exceeds the scan limit of {SCAN_LIMIT_BITS} bits")
    if lam + 2 > MAX_CLASS_BITS:
        raise ResourceLimitError(f"lambda={lam} exceeds the {MAX_CLASS_BITS}-bit window limit")

    logger.info("oracle %s t=%d lambda=%d strategy=%s", w, t, lam, strategy)
    tally = _scan(w, t, lam, workers) if strategy == "scan" else _classes(w, t, lam)

    counts: Counter = Counter()
    for row in tally.values():
        counts.update(row)
    return OracleResult(
        w=w,
        t=t,
        lam=lam,
        counts={k: counts[k] for k in sorted(counts)},
        exact=lam >= needed,
        kmax=kmax if w.is_constant else None,
        residue_counts={j: {k: row[k] for k in sorted(row)} for j, row in sorted(tally.items())},
    )


def oracle_sweep(w: Pattern, ts: Iterable[int], kmax: int = 0, workers: int = 1) -> List[OracleResult]:
    """Exact oracle results for several shifts, in the order given."""
    ts = list(ts)
    if workers > 1 and len(ts) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(_oracle_job, [(w, t, kmax) for t in ts]))
    return [_oracle_job((w, t, kmax)) for t in ts]


def _oracle_job(job: Tuple[Pattern, int, int]) -> OracleResult:
    w, t, kmax = job
    return empirical_dist(w, t, kmax=kmax)
