"""
Exception types shared by the blockdelta modules and the command line
"""


class BlockDeltaError(Exception):
    """Base class for every error raised on purpose by blockdelta."""

    exit_code = 1


class PatternError(BlockDeltaError, ValueError):
    """Raised when a pattern string is not a binary word of length >= 2."""

    exit_code = 2


class ConfigError(BlockDeltaError, ValueError):
    """Raised for invalid run configuration (ranges, tolerances, family specs)."""

    exit_code = 2


class ResourceLimitError(BlockDeltaError):
    """Raised when a computation would exceed a configured size cap."""

    exit_code = 3


class InvariantViolation(BlockDeltaError, AssertionError):
    """Raised when an internal consistency check fails."""

    exit_code = 1
