"""
Memoized binary pair descent

Many quantities X_t here satisfy recursions that express the pair
(X_{2s}, X_{2s+1}) and the pair (X_{2s+1}, X_{2s+2}) through (X_s, X_{s+1}).
``PairDescent`` walks the binary digits of t from the top and caches every
pair along the way.
"""

from typing import Callable, Dict, Generic, Mapping, Optional, Tuple, TypeVar

T = TypeVar("T")
Pair = Tuple[T, T]
Step = Callable[[int, Pair], Pair]


class PairDescent(Generic[T]):
    """
    Compute (X_t, X_{t+1}) from (X_0, X_1) and two step functions.

    Args:
        base: The pair (X_0, X_1)
        step_even: Maps (s, (X_s, X_{s+1})) to (X_{2s}, X_{2s+1})
        step_odd: Maps (s, (X_s, X_{s+1})) to (X_{2s+1}, X_{2s+2})
        memo: Optional preloaded pairs keyed by t

    Example:
        >>> stern = PairDescent((0, 1), lambda s, p: (p[0], p[0] + p[1]), lambda s, p: (p[0] + p[1], p[1]))
        >>> stern(5)[0]
        3
    """

    def __init__(self, base: Pair, step_even: Step, step_odd: Step, memo: Optional[Mapping[int, Pair]] = None):
        self._memo: Dict[int, Pair] = dict(memo or {})
        self._memo[0] = base
        self._step_even = step_even
        self._step_odd = step_odd

    def __call__(self, t: int) -> Pair:
        if t < 0:
            raise ValueError(f"t must be nonnegative, got {t}")
        cached = self._memo.get(t)
        if cached is not None:
            return cached
        path = []
        while t not in self._memo:
            path.append(t)
            t >>= 1
        pair = self._memo[t]
        for s in reversed(path):
            step = self._step_odd if s & 1 else self._step_even
            pair = self._memo.setdefault(s, step(s >> 1, pair))
        return pair

    def __getitem__(self, t: int) -> T:
        return self(t)[0]

    def __len__(self) -> int:
        return len(self._memo)

    @property
    def memo(self) -> Dict[int, Pair]:
        return dict(self._memo)
