"""
Run configuration for the blockdelta command line
"""

import argparse
import logging
import os
import re
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Tuple

from .errors import ConfigError
from .words import Pattern, as_pattern

CACHE_DIR_ENV = "BLOCKDELTA_CACHE_DIR"
LOG_LEVEL_ENV = "BLOCKDELTA_LOG_LEVEL"
FORMATS = ("csv", "json")
SCAN_FIELDS = ("cusick", "variance", "q")

_FAMILY = re.compile(
    r"^\s*\((?P<block>[01]+)\)\^(?P<exponent>N|\d+)(?P<suffix>[01]*)"
    r"(?:\s+for\s+N\s+in\s+(?P<start>\d+)\s*\.\.\s*(?P<stop>\d+))?\s*$"
)
_KRANGE = re.compile(r"^\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*$")


def parse_family(spec: str) -> List[Tuple[int, int]]:
    """
    Parse a repeated-block family of shifts.

    The grammar is ``(block)^N[suffix] for N in a..b`` (both ends inclusive)
    or ``(block)^n[suffix]`` with a literal exponent.

    Args:
        spec: The family expression

    Returns:
        list: (N, t) pairs in increasing N

    Raises:
        ConfigError: If the expression does not match the grammar or the range is empty

    Example:
        >>> parse_family("(10)^N for N in 1..3")
        [(1, 2), (2, 10), (3, 42)]
    """
    match = _FAMILY.match(spec)
    if match is None:
        raise ConfigError(f"invalid family spec {spec!r}; expected '(block)^N[suffix] for N in a..b'")
    block, suffix, exponent = match.group("block"), match.group("suffix"), match.group("exponent")
    if exponent == "N":
        if match.group("start") is None:
            raise ConfigError(f"family spec {spec!r} uses N without a range 'for N in a..b'")
        counts = range(int(match.group("start")), int(match.group("stop")) + 1)
    else:
        if match.group("start") is not None:
            raise ConfigError(f"family spec {spec!r} has a literal exponent and a range")
        counts = range(int(exponent), int(exponent) + 1)
    if not counts:
        raise ConfigError(f"family spec {spec!r} has an empty range")
    return [(n, int(block * n + suffix or "0", 2)) for n in counts]


def parse_krange(spec: str) -> range:
    """Parse an inclusive range ``a..b`` of integers, a and b possibly negative."""
    match = _KRANGE.match(spec)
    if match is None:
        raise ConfigError(f"invalid k range {spec!r}; expected 'a..b'")
    start, stop = int(match.group(1)), int(match.group(2))
    if stop < start:
        raise ConfigError(f"empty k range {spec!r}")
    return range(start, stop + 1)


@dataclass
class RunConfig:
    """
    Settings of one CLI invocation.

    Shifts come from exactly one of ``t``, ``family`` or the range
    ``tmin <= t < tmax``.
    """

    command: str
    w: str
    t: Optional[int] = None
    tmin: int = 0
    tmax: Optional[int] = None
    family: Optional[str] = None
    lam: Optional[int] = None
    kmax: int = 0
    epsilon: Optional[Fraction] = None
    theta0: float = 1.0
    grid_size: int = 2001
    output: Optional[Path] = None
    fmt: str = "json"
    jobs: int = 1
    no_meta: bool = False
    field: str = "cusick"
    budget: bool = False
    strategy: str = "auto"
    krange: Optional[str] = None
    grid_tmax: int = 512
    allow_large: bool = False
    verbose: int = 0

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        values = {name: getattr(args, name) for name in cls.__dataclass_fields__ if hasattr(args, name)}
        if values.get("epsilon") is not None:
            try:
                values["epsilon"] = Fraction(values["epsilon"])
            except (ValueError, ZeroDivisionError) as exc:
                raise ConfigError(f"invalid epsilon {args.epsilon!r}") from exc
        if values.get("output") is not None:
            values["output"] = Path(values["output"])
        return cls(**values)

    @property
    def pattern(self) -> Pattern:
        return as_pattern(self.w)

    def validate(self) -> "RunConfig":
        """
        Check the configuration.

        Raises:
            PatternError: If ``w`` is not a binary word of length >= 2
            ConfigError: For empty ranges or out-of-range numeric settings
        """
        as_pattern(self.w)
        if self.epsilon is not None and not 0 < self.epsilon < 1:
            raise ConfigError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if self.grid_size <= 0:
            raise ConfigError(f"grid size must be positive, got {self.grid_size}")
        if self.jobs <= 0:
            raise ConfigError(f"jobs must be positive, got {self.jobs}")
        if self.theta0 <= 0:
            raise ConfigError(f"theta0 must be positive, got {self.theta0}")
        if self.grid_tmax < 0:
            raise ConfigError(f"grid-tmax must be nonnegative, got {self.grid_tmax}")
        if self.krange is not None:
            parse_krange(self.krange)
        if self.kmax < 0:
            raise ConfigError(f"kmax must be nonnegative, got {self.kmax}")
        if self.t is not None and self.t < 0:
            raise ConfigError(f"t must be nonnegative, got {self.t}")
        if self.fmt not in FORMATS:
            raise ConfigError(f"format must be one of {', '.join(FORMATS)}, got {self.fmt!r}")
        if self.field not in SCAN_FIELDS:
            raise ConfigError(f"field must be one of {', '.join(SCAN_FIELDS)}, got {self.field!r}")
        if self.family is not None:
            parse_family(self.family)
        elif self.t is None and self.tmax is not None and not 0 <= self.tmin < self.tmax:
            raise ConfigError(f"empty t range [{self.tmin}, {self.tmax})")
        return self

    def family_members(self) -> List[Tuple[int, int]]:
        return parse_family(self.family) if self.family else []

    def shifts(self) -> List[int]:
        """
        The shifts t selected by the configuration.

        Raises:
            ConfigError: If no shift was given
        """
        if self.t is not None:
            return [self.t]
        if self.family is not None:
            return [t for _, t in parse_family(self.family)]
        if self.tmax is None:
            raise ConfigError("no shift given; use -t, --tmax or --family")
        return list(range(self.tmin, self.tmax))


def cache_dir() -> Optional[Path]:
    """Directory named by BLOCKDELTA_CACHE_DIR, or None when unset or empty."""
    value = os.environ.get(CACHE_DIR_ENV, "").strip()
    return Path(value).expanduser() if value else None


def log_level(verbosity: int = 0) -> int:
    """
    Logging level from BLOCKDELTA_LOG_LEVEL, lowered by -v (INFO) and -vv (DEBUG).
    """
    name = os.environ.get(LOG_LEVEL_ENV, "WARNING").strip().upper() or "WARNING"
    level = logging.getLevelName(name)
    if not isinstance(level, int):
        raise ConfigError(f"invalid {LOG_LEVEL_ENV}={name!r}")
    if verbosity >= 2:
        return min(level, logging.DEBUG)
    if verbosity == 1:
        return min(level, logging.INFO)
    return level


def configure_logging(verbosity: int = 0) -> None:
    logging.basicConfig(
        level=log_level(verbosity),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )
