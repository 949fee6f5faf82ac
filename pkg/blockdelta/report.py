"""
CSV and JSON writers for blockdelta results

Floats in CSV cells carry 17 significant digits, rationals are written as
``num/den``. JSON keeps floats as numbers (shortest round-trip form) and
rationals as ``num/den`` strings.
"""

import csv
import json
import math
import sys
from contextlib import contextmanager
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, TextIO


def format_fraction(value: Fraction) -> str:
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def format_float(value: float) -> str:
    """
    17 significant digits, ``inf``/``-inf``/``nan`` for non-finite values.

    Example:
        >>> format_float(0.1)
        '0.10000000000000001'
    """
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return format(value, ".17g")


def format_cell(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Fraction):
        return format_fraction(value)
    if isinstance(value, float):
        return format_float(value)
    if value is None:
        return ""
    return str(value)


def to_jsonable(value: Any) -> Any:
    """Recursively replace Fractions by ``num/den`` strings and non-finite floats by strings."""
    if isinstance(value, Fraction):
        return format_fraction(value)
    if isinstance(value, float) and not math.isfinite(value):
        return format_float(value)
    if isinstance(value, Mapping):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, Path):
        return str(value)
    return value


def metadata(version: str) -> Dict[str, str]:
    return {
        "generated_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "version": version,
    }


@contextmanager
def open_output(path: Optional[Path]) -> Iterator[TextIO]:
    """Yield a text stream for ``path``, or stdout when path is None."""
    if path is None:
        yield sys.stdout
        return
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as stream:
        yield stream


def write_csv(stream: TextIO, fieldnames: Sequence[str], rows: Iterable[Mapping[str, Any]]) -> int:
    """
    Write RFC 4180 CSV with a header row.

    Returns:
        int: Number of data rows written
    """
    writer = csv.writer(stream, lineterminator="\r\n")
    writer.writerow(fieldnames)
    count = 0
    for row in rows:
        writer.writerow([format_cell(row.get(name)) for name in fieldnames])
        count += 1
    return count


def write_json(stream: TextIO, payload: Mapping[str, Any], meta: Optional[Mapping[str, str]] = None) -> None:
    document = dict(payload)
    if meta is not None:
        document["meta"] = dict(meta)
    json.dump(to_jsonable(document), stream, indent=2, sort_keys=True, ensure_ascii=False)
    stream.write("\n")


def write_rows(
    path: Optional[Path],
    fmt: str,
    fieldnames: Sequence[str],
    rows: List[Mapping[str, Any]],
    summary: Optional[Mapping[str, Any]] = None,
    meta: Optional[Mapping[str, str]] = None,
) -> int:
    """
    Write tabular results as CSV or as JSON ``{"rows": [...], ...summary}``.

    Returns:
        int: Number of rows written
    """
    with open_output(path) as stream:
        if fmt == "csv":
            return write_csv(stream, fieldnames, rows)
        payload = dict(summary or {})
        payload["rows"] = [{name: row.get(name) for name in fieldnames} for row in rows]
        write_json(stream, payload, meta)
    return len(rows)
