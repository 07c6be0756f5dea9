"""Table and report emitters for the cloner CLI.

CSV carries a header row and 12 significant digits; JSON carries 15.
Numbers are formatted explicitly so the decimal separator is always '.'.
"""
import csv
import json
import math
import sys
from typing import Any, Dict, Iterable, List, Optional, Sequence, TextIO

import numpy as np

from src.core.settings import DEFAULT_OUTPUT, OutputSettings


def format_number(value: Any, digits: int) -> str:
    """
    Render one cell for CSV output.

    Example:
        >>> format_number(5 / 6, 12)
        '0.833333333333'
        >>> format_number(None, 12)
        ''
    """
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.{digits}g}"
    return str(value)


def _round(value: float, digits: int) -> float:
    if not math.isfinite(value):
        return value
    return float(f"{value:.{digits}g}")


def to_jsonable(value: Any, digits: int) -> Any:
    """Recursively convert numpy scalars/arrays and round floats to ``digits`` significant digits."""
    if value is None or isinstance(value, (str, bool)):
        return value
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return _round(float(value), digits)
    if isinstance(value, (complex, np.complexfloating)):
        if abs(value.imag) == 0.0:
            return _round(float(value.real), digits)
        return {"re": _round(float(value.real), digits), "im": _round(float(value.imag), digits)}
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist(), digits)
    if isinstance(value, dict):
        return {str(k): to_jsonable(v, digits) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v, digits) for v in value]
    raise TypeError(f"Cannot serialize {type(value).__name__}")


def write_csv(
    rows: Iterable[Dict[str, Any]],
    columns: Sequence[str],
    comments: Optional[Dict[str, Any]] = None,
    stream: Optional[TextIO] = None,
    settings: OutputSettings = DEFAULT_OUTPUT,
) -> None:
    """
    Write ``rows`` as CSV with a header.

    Args:
        rows: dicts keyed by column name; missing keys become empty cells
        columns: header, in output order
        comments: optional ``# key=value`` lines written before the header
        stream: defaults to the current sys.stdout
        settings: significant digits
    """
    stream = stream or sys.stdout
    digits = settings.csv_digits
    for key, value in (comments or {}).items():
        stream.write(f"# {key}={format_number(value, digits)}\n")
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_number(row.get(col), digits) for col in columns])


def write_json(
    payload: Any,
    stream: Optional[TextIO] = None,
    settings: OutputSettings = DEFAULT_OUTPUT,
) -> None:
    stream = stream or sys.stdout
    json.dump(to_jsonable(payload, settings.json_digits), stream, indent=2)
    stream.write("\n")


def read_csv(text: str) -> List[Dict[str, str]]:
    """Parse emitted CSV back into dicts, skipping ``#`` comment lines."""
    lines = [line for line in text.splitlines() if line and not line.startswith("#")]
    return list(csv.DictReader(lines))
