"""
Binary word utilities for block-counting functions

Words are stored as explicit digit tuples because leading zeros matter:
``occ`` counts occurrences of a pattern in the binary expansion of n preceded
by ``len(w) - 1`` zeros.
"""

from dataclasses import dataclass
from itertools import product
from typing import FrozenSet, Iterator, Sequence, Tuple, TypeVar, Union

from .errors import PatternError


def _check_binary(digits: Sequence[int]) -> Tuple[int, ...]:
    digits = tuple(int(d) for d in digits)
    if any(d not in (0, 1) for d in digits):
        raise ValueError(f"digits must be 0 or 1, got {digits!r}")
    return digits


@dataclass(frozen=True)
class DigitString:
    """A finite binary word that may carry leading zeros."""

    digits: Tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "digits", _check_binary(self.digits))

    @classmethod
    def parse(cls, text: str) -> "DigitString":
        text = text.strip()
        if any(c not in "01" for c in text):
            raise ValueError(f"not a binary word: {text!r}")
        return cls(tuple(int(c) for c in text))

    @classmethod
    def from_int(cls, value: int, width: int = None) -> "DigitString":
        """
        Build the word of ``value`` written with exactly ``width`` digits.

        Args:
            value: Nonnegative integer to expand
            width: Number of digits; ``None`` gives the canonical expansion
                (the empty word for 0)

        Raises:
            ValueError: If value is negative or does not fit in ``width`` digits
        """
        if value < 0:
            raise ValueError(f"value must be nonnegative, got {value}")
        if width is None:
            width = value.bit_length()
        if value >> width:
            raise ValueError(f"{value} does not fit in {width} binary digits")
        return cls(tuple((value >> i) & 1 for i in reversed(range(width))))

    @property
    def value(self) -> int:
        result = 0
        for digit in self.digits:
            result = 2 * result + digit
        return result

    def prefixes(self) -> Iterator["DigitString"]:
        """Yield the nonempty prefixes, shortest first."""
        for h in range(1, len(self.digits) + 1):
            yield DigitString(self.digits[:h])

    def __len__(self) -> int:
        return len(self.digits)

    def __add__(self, other: "DigitString") -> "DigitString":
        return DigitString(self.digits + tuple(other.digits))

    def __str__(self) -> str:
        return "".join(str(d) for d in self.digits)


@dataclass(frozen=True)
class Pattern:
    """
    The fixed binary word w whose occurrences are counted.

    Attributes:
        digits: The digits of w, most significant first; at least two of them
    """

    digits: Tuple[int, ...]

    def __post_init__(self):
        try:
            digits = _check_binary(self.digits)
        except ValueError as exc:
            raise PatternError(str(exc)) from None
        if len(digits) < 2:
            raise PatternError(f"pattern must have length at least 2, got {len(digits)}")
        object.__setattr__(self, "digits", digits)

    @classmethod
    def parse(cls, text: str) -> "Pattern":
        """
        Parse a pattern such as ``"011"``.

        Raises:
            PatternError: If the text is not a binary word of length >= 2
        """
        text = str(text).strip()
        if not text or any(c not in "01" for c in text):
            raise PatternError(f"pattern must be a word over {{0,1}}, got {text!r}")
        return cls(tuple(int(c) for c in text))

    @property
    def length(self) -> int:
        return len(self.digits)

    @property
    def value(self) -> int:
        return self.word.value

    @property
    def word(self) -> DigitString:
        return DigitString(self.digits)

    @property
    def is_zeros(self) -> bool:
        return not any(self.digits)

    @property
    def is_ones(self) -> bool:
        return all(self.digits)

    @property
    def is_constant(self) -> bool:
        return self.is_zeros or self.is_ones

    @property
    def max_overlap(self) -> int:
        """Length q of the longest proper border (prefix that is also a suffix)."""
        for q in range(self.length - 1, 0, -1):
            if self.digits[:q] == self.digits[-q:]:
                return q
        return 0

    @property
    def period(self) -> int:
        """p = length - max_overlap, the minimal shift between two occurrences."""
        return self.length - self.max_overlap

    def negate(self) -> "Pattern":
        return Pattern(tuple(1 - d for d in self.digits))

    def reverse(self) -> "Pattern":
        return Pattern(self.digits[::-1])

    def __len__(self) -> int:
        return self.length

    def __str__(self) -> str:
        return "".join(str(d) for d in self.digits)


Word = TypeVar("Word", DigitString, Pattern)


def as_pattern(w: Union[Pattern, str]) -> Pattern:
    """Accept either a Pattern or its string form."""
    return w if isinstance(w, Pattern) else Pattern.parse(w)


def all_patterns(length: int) -> Iterator[Pattern]:
    """Yield every pattern of the given length in increasing numeric order."""
    for digits in product((0, 1), repeat=length):
        yield Pattern(digits)


def count_occurrences(v: DigitString, w: Union[Pattern, DigitString]) -> int:
    """
    Count the (possibly overlapping) occurrences of w as a factor of v.

    Args:
        v: The word to search
        w: The pattern

    Returns:
        int: |v|_w, which is 0 when v is shorter than w

    Example:
        >>> count_occurrences(DigitString.parse("001001"), Pattern.parse("001"))
        2
    """
    size = len(w.digits)
    return sum(
        1
        for start in range(len(v.digits) - size + 1)
        if v.digits[start:start + size] == w.digits
    )


def occ(w: Pattern, n: int) -> int:
    """
    Block-counting function occ_w(n).

    Counts occurrences of w in the canonical binary expansion of n preceded
    by ``len(w) - 1`` zeros. The window starting at every digit of (n)_2 is
    compared with w as an integer, which is the same scan
    ``count_occurrences`` does on the padded word.

    Args:
        w: The pattern
        n: Nonnegative integer

    Returns:
        int: Number of occurrences
    """
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    mask = (1 << w.length) - 1
    target = w.value
    return sum(1 for i in range(n.bit_length()) if (n >> i) & mask == target)


def padded_expansion(w: Pattern, n: int) -> DigitString:
    """The word 0^{len(w)-1}(n)_2 that ``occ`` scans."""
    return DigitString((0,) * (w.length - 1)) + DigitString.from_int(n)


def prefix_suffix_set(x: DigitString, w: Union[Pattern, DigitString]) -> FrozenSet[DigitString]:
    """
    Nonempty prefixes of x that are also suffixes of w.

    Example:
        >>> sorted(str(p) for p in prefix_suffix_set(DigitString.parse("110"), Pattern.parse("011")))
        ['1', '11']
    """
    wd = tuple(w.digits)
    return frozenset(p for p in x.prefixes() if len(p) <= len(wd) and wd[len(wd) - len(p):] == p.digits)


def reverse(x: Word) -> Word:
    return type(x)(tuple(x.digits)[::-1])


def negate(x: Word) -> Word:
    return type(x)(tuple(1 - d for d in x.digits))


_BLOCK_PATTERN = Pattern((0, 1))


def blocks01(t: int) -> int:
    """
    Number of maximal blocks of 1s in (t)_2, i.e. occ_01(t).

    Example:
        >>> blocks01(0b1011)
        2
    """
    return occ(_BLOCK_PATTERN, t)
