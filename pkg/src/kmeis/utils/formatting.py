"""
Serialization helpers: exact rationals as "p/q" strings, high-precision reals
as fixed-width scientific decimal strings, and byte-stable JSON / CSV output.
"""
import csv
import io
import json
from fractions import Fraction
from typing import Any, Iterable, List, Sequence

import mpmath
from mpmath.libmp import to_str

from kmeis.errors import ConfigError


def parse_rational(text: Any, path: str = "") -> Fraction:
    """Parse "p/q" or "n" into a Fraction.

    Floats and decimal strings are rejected.
    """
    if isinstance(text, bool) or isinstance(text, float):
        raise ConfigError(path, f"expected a rational string, got {type(text).__name__}")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise ConfigError(path, f"expected a rational string, got {type(text).__name__}")
    try:
        value = Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as e:
        raise ConfigError(path, f"cannot parse {text!r} as a rational: {e}") from e
    if "." in text or "e" in text.lower():
        raise ConfigError(path, f"{text!r} is not of the form 'p/q' or 'n'")
    return value


def format_rational(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_decimal(value: Any, digits: int) -> str:
    """Fixed-width scientific notation with ``digits`` significant digits.

    Works for values from any mpmath context (private contexts have their own
    ``mpf`` class, so the raw ``_mpf_`` tuple is formatted directly).
    """
    raw = value._mpf_ if hasattr(value, "_mpf_") else mpmath.mpf(value)._mpf_
    return to_str(raw, digits, strip_zeros=False, min_fixed=0, max_fixed=0, show_zero_exponent=True)


def dumps_json(payload: Any) -> str:
    """Deterministic JSON: sorted keys, two-space indent, trailing newline."""
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def csv_table(header: Sequence[str], rows: Iterable[Sequence[Any]], comments: List[str] = ()) -> str:
    """Render rows as CSV with LF endings; ``comments`` become leading '#' lines."""
    buffer = io.StringIO()
    for line in comments:
        buffer.write(f"# {line}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)
    return buffer.getvalue()
