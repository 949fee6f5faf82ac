"""
Persisted memo tables

A table file ``<kind>-<pattern>.bdlt`` holds the 5-byte magic ``BDLT1``
followed by a pickled dict. Files with another header are ignored.
"""

import logging
import os
import pickle
import tempfile
from pathlib import Path
from typing import Optional

from . import cfengine
from .words import Pattern

logger = logging.getLogger(__name__)

MAGIC = b"BDLT1"
SUFFIX = ".bdlt"
GAMMA_KIND = "gamma"


def cache_path(directory: Path, kind: str, w: Pattern) -> Path:
    return Path(directory) / f"{kind}-{w}{SUFFIX}"


def load(directory: Path, kind: str, w: Pattern) -> Optional[dict]:
    """
    Read a memo table.

    Returns:
        dict or None: None when the file is missing, has a foreign header or
        cannot be unpickled
    """
    path = cache_path(directory, kind, w)
    if not path.is_file():
        logger.debug("no cached %s table for %s at %s", kind, w, path)
        return None
    data = path.read_bytes()
    if not data.startswith(MAGIC):
        logger.warning("ignoring %s: header is not %r", path, MAGIC.decode())
        return None
    try:
        table = pickle.loads(data[len(MAGIC):])
    except (pickle.UnpicklingError, EOFError, AttributeError, ImportError) as exc:
        logger.warning("ignoring unreadable cache file %s: %s", path, exc)
        return None
    if not isinstance(table, dict):
        logger.warning("ignoring %s: payload is a %s, not a dict", path, type(table).__name__)
        return None
    logger.info("loaded %d cached %s entries for %s", len(table), kind, w)
    return table


def save(directory: Path, kind: str, w: Pattern, table: dict) -> Path:
    """Write a memo table, replacing any previous file atomically."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    path = cache_path(directory, kind, w)
    handle, temporary = tempfile.mkstemp(dir=directory, suffix=SUFFIX + ".tmp")
    try:
        with os.fdopen(handle, "wb") as stream:
            stream.write(MAGIC)
            pickle.dump(table, stream, protocol=pickle.HIGHEST_PROTOCOL)
        os.replace(temporary, path)
    except BaseException:
        Path(temporary).unlink(missing_ok=True)
        raise
    logger.info("saved %d %s entries for %s to %s", len(table), kind, w, path)
    return path


def load_gamma_memo(w: Pattern, directory: Optional[Path]) -> bool:
    """Seed the Gamma pair descent of w from disk; True when a table was used."""
    if directory is None:
        return False
    table = load(directory, GAMMA_KIND, w)
    if table is None:
        return False
    cfengine.descent_for(w, table)
    return True


def save_gamma_memo(w: Pattern, directory: Optional[Path]) -> Optional[Path]:
    if directory is None:
        return None
    table = cfengine.memo_tables().get(w)
    if not table:
        return None
    return save(directory, GAMMA_KIND, w, table)
