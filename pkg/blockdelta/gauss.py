"""
Gaussian comparison of delta_t and grid checks of the analytic bounds

The local limit statement compares delta_t(k) with the Gaussian main term
(2 pi v_t)^(-1/2) exp(-k^2 / (2 v_t)). The bounds behind it (variance
bounds, the cubic approximation of gamma_t near 0 and the decay of gamma_t
away from 0) are checked here exactly where possible and on uniform grids
otherwise. Grid checks are evidence, not proofs.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple, Union

import numpy as np

from . import cfengine, moments
from .words import Pattern, blocks01

logger = logging.getLogger(__name__)

GRID_SLACK = 1e-9
DEFAULT_GRID_SIZE = 2001
COMPARE_TAIL_EPSILON = Fraction(1, 10 ** 12)

Real = Union[int, float, Fraction]


def order3_constant(a: float, b: float, theta0: float) -> float:
    """
    Constant K(a, b, θ₀) bounding the order >= 3 part of exp(iaθ + bθ²) on |θ| <= θ₀.

    Example:
        >>> order3_constant(0, 0, 1.0)
        0.0
    """
    a, b = abs(a), abs(b)
    return a * b + b * b * theta0 / 2 + (a + b * theta0) ** 3 / 6 * math.exp(a * theta0 + b * theta0 * theta0)


def order3_remainder(a: float, b: float, theta):
    """|exp(iaθ + bθ²) - (1 + iaθ + (b - a²/2)θ²)|, vectorised over θ."""
    theta = np.asarray(theta, dtype=float)
    full = np.exp(1j * a * theta + b * theta ** 2)
    head = 1 + 1j * a * theta + (b - a * a / 2) * theta ** 2
    result = np.abs(full - head)
    return result if result.shape else float(result)


@dataclass(frozen=True)
class Constants:
    """
    Explicit constants of the variance bounds and the two characteristic
    function bounds for patterns of length ell.

    Attributes:
        ell: Pattern length
        m: Lower variance constant 1/4^(l-1)
        M: Upper variance constant 3(l+2)/2^(l-2)
        L: Decay constant pi^2/(2^(l+2)(l+3)) as stated for the decay bound
        L_certified: The decay constant 1/(2^(l+2) pi^2 (l+3)) implied by the
            norm bound (1 - θ²/(2^(l+2) pi²))^(N/(l+3))
        C: Splitting constant max(sqrt(1/(2L)), sqrt(1/m))
    """

    ell: int
    m: Fraction
    M: Fraction
    L: float
    L_certified: float
    C: float

    @classmethod
    def for_length(cls, ell: int) -> "Constants":
        if ell < 2:
            raise ValueError(f"pattern length must be at least 2, got {ell}")
        m = Fraction(1, 1 << (2 * ell - 2))
        M = Fraction(3 * (ell + 2) * 4, 1 << ell)
        L = math.pi ** 2 / ((1 << (ell + 2)) * (ell + 3))
        certified = 1 / ((1 << (ell + 2)) * math.pi ** 2 * (ell + 3))
        C = max(math.sqrt(1 / (2 * L)), math.sqrt(1 / float(m)))
        return cls(ell=ell, m=m, M=M, L=L, L_certified=certified, C=C)

    @classmethod
    def for_pattern(cls, w: Pattern) -> "Constants":
        return cls.for_length(w.length)

    def K2(self, theta0: float) -> float:
        return order3_constant(3, 19, theta0)

    def K1(self, theta0: float) -> float:
        """Constant of the entrywise normal approximation, (4l - 1) K(3, 19, θ₀)."""
        return (4 * self.ell - 1) * self.K2(theta0)

    def K(self, theta0: float) -> float:
        """Constant of the cubic bound on |gamma_t - exp(-v_t θ²/2)|, 4l K(3, 19, θ₀)."""
        return 4 * self.ell * self.K2(theta0)

    def theta0(self, blocks: float) -> float:
        """Split point C sqrt(log N / N)."""
        if blocks < 2:
            raise ValueError(f"the split point needs N >= 2, got {blocks}")
        return self.C * math.sqrt(math.log(blocks) / blocks)


def gaussian_main(k, v: Real):
    """
    The Gaussian main term (2 pi v)^(-1/2) exp(-k^2 / (2 v)).

    Args:
        k: Integer or array of integers
        v: Positive variance

    Returns:
        float or numpy.ndarray

    Raises:
        ValueError: If v <= 0
    """
    if v <= 0:
        raise ValueError(f"variance must be positive, got {v}")
    v = float(v)
    k = np.asarray(k, dtype=float)
    result = np.exp(-k * k / (2 * v)) / math.sqrt(2 * math.pi * v)
    return result if result.shape else float(result)


@dataclass(frozen=True)
class GaussRow:
    k: int
    delta: Fraction
    gaussian: float
    abs_error: float

    @property
    def delta_float(self) -> float:
        return float(self.delta)


@dataclass(frozen=True)
class ErrorBudget:
    """
    Itemised bound on |delta_t(k) - gaussian_main(k, v_t)|, uniform in k.

    Attributes:
        theta0: Split point of the inversion integral
        gaussian_tail: Mass of the Gaussian characteristic function beyond θ₀
        approximation: Cubic approximation error on [-θ₀, θ₀]
        cf_tail: Decay of gamma_t on θ₀ <= |θ| <= pi
    """

    N: float
    v: float
    theta0: float
    gaussian_tail: float
    approximation: float
    cf_tail: float

    @property
    def total(self) -> float:
        return self.gaussian_tail + self.approximation + self.cf_tail

    def to_dict(self) -> Dict[str, float]:
        return {
            "N": self.N,
            "v": self.v,
            "theta0": self.theta0,
            "gaussian_tail": self.gaussian_tail,
            "approximation": self.approximation,
            "cf_tail": self.cf_tail,
            "total": self.total,
        }


def budget_for(ell: int, blocks: float, v: Real) -> ErrorBudget:
    """
    The three error terms for a pattern length, a block count N and a variance.

    Passing the lower bound m N for v gives a bound valid for every t with
    N blocks, since every term decreases in v.

    Raises:
        ValueError: If θ₀ > pi or v <= 0
    """
    if v <= 0:
        raise ValueError(f"variance must be positive, got {v}")
    constants = Constants.for_length(ell)
    theta0 = constants.theta0(blocks)
    if theta0 > math.pi:
        raise ValueError(f"split point θ₀ = {theta0:.6g} exceeds pi; N = {blocks} is too small")
    v = float(v)
    L = constants.L
    return ErrorBudget(
        N=float(blocks),
        v=v,
        theta0=theta0,
        gaussian_tail=math.exp(-v * theta0 ** 2 / 2) / (math.pi * theta0 * v),
        approximation=constants.K(theta0) * blocks * theta0 ** 4 / (4 * math.pi),
        cf_tail=math.exp(-L * blocks * theta0 ** 2) / (math.pi * L * blocks * theta0) / 2,
    )


def error_budget(w: Pattern, t: int) -> ErrorBudget:
    """
    The itemised error budget at (w, t) with the exact variance v_t.

    Raises:
        ValueError: If occ_01(t) < 2 or θ₀ > pi
    """
    return budget_for(w.length, blocks01(t), moments.variance(w, t))


@dataclass(frozen=True)
class GaussReport:
    """
    delta_t(k) against the Gaussian main term over a range of k.

    Attributes:
        N: occ_01(t)
        v: The exact variance v_t
        rows: One GaussRow per k
        max_error: Largest abs_error over rows
        bound: Total of the error budget, inf where it does not apply
        tail_bound: Certified mass of delta_t outside the tabulated support
        budget: The budget behind ``bound``, if any
    """

    w: Pattern
    t: int
    N: int
    v: Fraction
    rows: Tuple[GaussRow, ...]
    max_error: float
    bound: float
    tail_bound: Fraction = Fraction(0)
    budget: Optional[ErrorBudget] = field(default=None, compare=False)

    def csv_rows(self) -> List[Dict[str, object]]:
        return [
            {
                "k": row.k,
                "delta_exact": row.delta,
                "delta_float": row.delta_float,
                "gaussian": row.gaussian,
                "abs_error": row.abs_error,
            }
            for row in self.rows
        ]

    def summary(self, with_budget: bool = False) -> Dict[str, object]:
        result: Dict[str, object] = {
            "w": str(self.w),
            "t": self.t,
            "N": self.N,
            "v": self.v,
            "max_error": self.max_error,
            "bound": self.bound,
            "tail_bound": self.tail_bound,
            "within_bound": self.max_error <= self.bound,
        }
        if with_budget and self.budget is not None:
            result["budget"] = self.budget.to_dict()
        return result


def compare(
    w: Pattern,
    t: int,
    krange: Optional[Iterable[int]] = None,
    epsilon: Optional[Fraction] = None,
) -> GaussReport:
    """
    Tabulate delta_t(k) against gaussian_main(k, v_t).

    Args:
        w: The pattern
        t: Positive shift
        krange: Values of k; defaults to the full support, or for constant w to
            the support extracted with tail mass below ``epsilon``
        epsilon: Tail tolerance for constant patterns (default 1e-12)

    Returns:
        GaussReport

    Raises:
        ValueError: If t = 0, where v_t = 0
    """
    if t <= 0:
        raise ValueError(f"compare needs t >= 1 (v_0 = 0), got {t}")
    v = moments.variance(w, t)
    if w.is_constant and epsilon is None:
        epsilon = COMPARE_TAIL_EPSILON
    delta = cfengine.dist(w, t, epsilon)
    if krange is None:
        keys = list(delta.support)
        krange = range(min(keys), max(keys) + 1)
    ks = list(krange)
    gauss = np.atleast_1d(gaussian_main(ks, v))
    rows = tuple(
        GaussRow(k=k, delta=delta[k], gaussian=float(g), abs_error=abs(float(delta[k]) - float(g)))
        for k, g in zip(ks, gauss)
    )
    blocks = blocks01(t)
    try:
        budget = budget_for(w.length, blocks, v)
        bound = budget.total
    except ValueError:
        budget, bound = None, math.inf
    max_error = max((row.abs_error for row in rows), default=0.0)
    logger.debug("compare w=%s t=%d N=%d: max_error=%.3g bound=%.3g", w, t, blocks, max_error, bound)
    return GaussReport(
        w=w,
        t=t,
        N=blocks,
        v=v,
        rows=rows,
        max_error=max_error,
        bound=bound,
        tail_bound=delta.tail_bound,
        budget=budget,
    )


def check_prop_A(w: Pattern, t: int) -> Tuple[bool, Tuple[Fraction, Fraction]]:
    """
    Check m occ_01(t) <= v_t <= M occ_01(t) exactly.

    Returns:
        tuple: (holds, (v_t - m N, M N - v_t))
    """
    lower, upper = moments.variance_bounds(w, t)
    v = moments.variance(w, t)
    slack = (v - lower, upper - v)
    return slack[0] >= 0 and slack[1] >= 0, slack


@dataclass(frozen=True)
class GridCheck:
    """
    Result of a bound evaluated on a grid.

    ``max_violation`` is max(lhs - rhs) over the grid, so it is <= 0 when the
    bound holds at every grid point.
    """

    name: str
    w: Pattern
    t: int
    max_violation: float
    grid_size: int
    skipped: bool = False
    reason: str = ""

    @property
    def passed(self) -> bool:
        return self.skipped or self.max_violation <= 0

    def to_dict(self) -> Dict[str, object]:
        return {
            "check": self.name,
            "w": str(self.w),
            "t": self.t,
            "max_violation": self.max_violation,
            "grid_size": self.grid_size,
            "skipped": self.skipped,
            "passed": self.passed,
        }


def _grid(half_width: float, grid_size: int) -> np.ndarray:
    if grid_size < 1:
        raise ValueError(f"grid size must be positive, got {grid_size}")
    return np.linspace(-half_width, half_width, grid_size)


def check_prop_B(w: Pattern, t: int, theta0: float = 1.0, grid_size: int = DEFAULT_GRID_SIZE) -> GridCheck:
    """
    Evaluate |gamma_t(θ) - exp(-v_t θ²/2)| - K(θ₀) occ_01(t) |θ|³ on [-θ₀, θ₀].

    Raises:
        ValueError: If θ₀ <= 0
    """
    if theta0 <= 0:
        raise ValueError(f"theta0 must be positive, got {theta0}")
    theta = _grid(theta0, grid_size)
    v = float(moments.variance(w, t))
    lhs = np.abs(cfengine.eval_cf(w, t, theta) - np.exp(-v * theta ** 2 / 2))
    rhs = Constants.for_pattern(w).K(theta0) * blocks01(t) * np.abs(theta) ** 3 + GRID_SLACK
    return GridCheck("prop_B", w, t, float(np.max(lhs - rhs)), grid_size)


def check_prop_C(
    w: Pattern,
    t: int,
    grid_size: int = DEFAULT_GRID_SIZE,
    decay: Optional[float] = None,
) -> GridCheck:
    """
    Evaluate |gamma_t(θ)| - exp(-L occ_01(t) θ²) on [-pi, pi].

    Args:
        decay: The constant L; defaults to ``Constants.L_certified``. The
            larger ``Constants.L`` is violated for some shifts, e.g. every
            length-2 pattern at t = 341

    Returns:
        GridCheck: Skipped when occ_01(t) < l + 3
    """
    blocks = blocks01(t)
    if blocks < w.length + 3:
        return GridCheck("prop_C", w, t, 0.0, grid_size, skipped=True, reason=f"occ01(t) = {blocks} < {w.length + 3}")
    if decay is None:
        decay = Constants.for_pattern(w).L_certified
    theta = _grid(math.pi, grid_size)
    lhs = np.abs(cfengine.eval_cf(w, t, theta))
    rhs = np.exp(-decay * blocks * theta ** 2) + GRID_SLACK
    return GridCheck("prop_C", w, t, float(np.max(lhs - rhs)), grid_size)


def check_lambda_norm(w: Pattern, t: int, grid_size: int = DEFAULT_GRID_SIZE) -> GridCheck:
    """
    max(|Gamma_t(θ)|_inf, |Gamma_{t+1}(θ)|_inf) <= (1 - θ²/(2^(l+2) pi²))^(N/(l+3)) on [-pi, pi].

    Skipped when N = occ_01(t) < l + 3.
    """
    blocks, ell = blocks01(t), w.length
    if blocks < ell + 3:
        return GridCheck("lambda_norm", w, t, 0.0, grid_size, skipped=True, reason=f"occ01(t) = {blocks} < {ell + 3}")
    theta = _grid(math.pi, grid_size)
    current, following = cfengine.gamma_pair(w, t)
    norm = np.maximum(
        np.abs(current.evaluate(theta)).max(axis=0),
        np.abs(following.evaluate(theta)).max(axis=0),
    )
    rhs = (1 - theta ** 2 / ((1 << (ell + 2)) * math.pi ** 2)) ** (blocks / (ell + 3)) + GRID_SLACK
    return GridCheck("lambda_norm", w, t, float(np.max(norm - rhs)), grid_size)


def check_normal_approximation(
    w: Pattern,
    t: int,
    theta0: float = 1.0,
    grid_size: int = DEFAULT_GRID_SIZE,
) -> GridCheck:
    """
    Entrywise comparison of Gamma_t with exp(i m_{t,j} θ - u_{t,j} θ²/2).

    The bound is (4l - 1) K(3, 19, θ₀) occ_01(t) |θ|³ on [-θ₀, θ₀].
    """
    if theta0 <= 0:
        raise ValueError(f"theta0 must be positive, got {theta0}")
    theta = _grid(theta0, grid_size)
    data = moments.var_vec(w, t)
    means = np.array([float(m) for m in data.M])[:, None]
    spreads = np.array([float(u) for u in data.u])[:, None]
    approx = np.exp(1j * means * theta - spreads * theta ** 2 / 2)
    actual = cfengine.gamma_vec(w, t).evaluate(theta)
    lhs = np.abs(actual - approx).max(axis=0)
    rhs = Constants.for_pattern(w).K1(theta0) * blocks01(t) * np.abs(theta) ** 3 + GRID_SLACK
    return GridCheck("normal_approximation", w, t, float(np.max(lhs - rhs)), grid_size)


def norm_bound_margin(k, theta):
    """4 - θ²/pi² - (|1 + e(kθ)| + |1 + e((k+1)θ)|), nonnegative for |θ| <= pi."""
    k = np.asarray(k, dtype=float)
    theta = np.asarray(theta, dtype=float)
    used = np.abs(1 + np.exp(1j * k * theta)) + np.abs(1 + np.exp(1j * (k + 1) * theta))
    result = 4 - theta ** 2 / math.pi ** 2 - used
    return result if result.shape else float(result)


def invert_cf(w: Pattern, t: int, ks: Iterable[int], grid_size: int = 4096) -> np.ndarray:
    """
    delta_t(k) = (1/2pi) ∫ gamma_t(θ) e(-kθ) dθ by the trapezoidal rule.

    The rule is exact up to rounding for Laurent polynomials once grid_size
    exceeds their exponent span.
    """
    if grid_size < 1:
        raise ValueError(f"grid size must be positive, got {grid_size}")
    theta = -math.pi + 2 * math.pi * np.arange(grid_size) / grid_size
    values = cfengine.eval_cf(w, t, theta)
    ks = np.asarray(list(ks), dtype=float)
    phases = np.exp(-1j * np.outer(ks, theta))
    return (phases @ values).real / grid_size


def finite_difference_variance(w: Pattern, t: int, h: float) -> float:
    """-(gamma_t(h) - 2 gamma_t(0) + gamma_t(-h)) / h², which tends to v_t as h -> 0."""
    if h <= 0:
        raise ValueError(f"step must be positive, got {h}")
    values = cfengine.eval_cf(w, t, np.array([-h, 0.0, h]))
    return float(-(values[0] - 2 * values[1] + values[2]).real / (h * h))


def richardson_variance(w: Pattern, t: int, h: float) -> float:
    """Richardson extrapolation (4 f(h/2) - f(h)) / 3 of the finite-difference variance."""
    return (4 * finite_difference_variance(w, t, h / 2) - finite_difference_variance(w, t, h)) / 3


def main_term_lower_bound(w: Pattern, blocks: float, c: float) -> float:
    """
    Lower bound on the main term for |k| <= c sqrt(N log N) and any t with N blocks.

    With m N <= v_t <= M N this is (2 pi M N)^(-1/2) N^(-c²/(2m)).
    """
    constants = Constants.for_pattern(w)
    exponent = c * c / (2 * float(constants.m))
    return (2 * math.pi * float(constants.M) * blocks) ** -0.5 * blocks ** -exponent


def main_term_dominates(w: Pattern, blocks: float, c: float) -> bool:
    """Whether main_term_lower_bound exceeds the worst-case budget at N blocks."""
    constants = Constants.for_pattern(w)
    budget = budget_for(w.length, blocks, constants.m * Fraction(blocks))
    return main_term_lower_bound(w, blocks, c) > budget.total


def cusick_density(w: Pattern, t: int, epsilon: Optional[Fraction] = None) -> Tuple[Fraction, Fraction]:
    """
    The density of {n : d_t(n) >= 0} as an exact interval.

    Returns:
        tuple: (lower, upper); equal for non-constant w, and for constant w
        upper adds the certified missing mass

    Example:
        >>> cusick_density(Pattern.parse("01"), 0)
        (Fraction(1, 1), Fraction(1, 1))
    """
    delta = cfengine.dist(w, t, epsilon)
    lower = delta.upper_sum(0)
    return lower, lower + delta.tail_bound


def check_v1_rough_bound(w: Pattern) -> Tuple[bool, Fraction]:
    """
    Check 0 <= u_{1,j} <= v_{1,j} <= 6 for every residue j.

    Returns:
        tuple: (holds, max_j v_{1,j})
    """
    data = moments.var_vec(w, 1)
    largest = max(data.V)
    holds = largest <= 6 and all(0 <= u <= v for u, v in zip(data.u, data.V))
    return holds, largest
