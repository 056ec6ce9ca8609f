"""Deterministic canonical JSON for content-addressed audit events.

The canonical byte form is the stored artifact itself: verification hashes
file bytes directly, so serialization drift can never break verification of
existing records. Rules:

- UTF-8, object keys sorted by codepoint (equals bytewise order in UTF-8),
  no insignificant whitespace, booleans/null lowercase.
- Real numbers in fixed decimal notation with at most 12 fractional digits,
  trailing zeros stripped, never exponent form. Integral floats therefore
  serialize like integers ("1", not "1.0"); the int/float distinction is
  deliberately erased so reparsing is stable.
- Non-finite numbers are rejected.
"""

from __future__ import annotations

import hashlib
import json
import math
from typing import Any, List

CANONICAL_VERSION = 1

_MAX_FORMAT_ROUNDS = 32


class CanonicalizationError(ValueError):
    """The value cannot be represented canonically (non-finite, bad type)."""


def _format_fixed(value: float) -> str:
    text = f"{value:.12f}"
    text = text.rstrip("0").rstrip(".")
    if text in ("", "-", "-0"):
        return "0"
    return text


def canonical_number(value: float) -> str:
    """Shortest fixed-decimal form that survives a parse/format round trip.

    Quantizing at 12 fractional digits can land between representable doubles
    for large magnitudes, so the format is iterated to a fixed point; for the
    value ranges stored in audit events one pass suffices.
    """
    if not math.isfinite(value):
        raise CanonicalizationError(f"non-finite number: {value!r}")
    text = _format_fixed(value)
    for _ in range(_MAX_FORMAT_ROUNDS):
        again = _format_fixed(float(text))
        if again == text:
            return text
        text = again
    raise CanonicalizationError(f"no stable decimal form for {value!r}")


def _emit(value: Any, out: List[str]) -> None:
    if value is None:
        out.append("null")
    elif value is True:
        out.append("true")
    elif value is False:
        out.append("false")
    elif isinstance(value, int):
        out.append(str(value))
    elif isinstance(value, float):
        out.append(canonical_number(value))
    elif isinstance(value, str):
        out.append(json.dumps(value, ensure_ascii=False))
    elif isinstance(value, (list, tuple)):
        out.append("[")
        for i, item in enumerate(value):
            if i:
                out.append(",")
            _emit(item, out)
        out.append("]")
    elif isinstance(value, dict):
        keys = list(value.keys())
        if any(not isinstance(k, str) for k in keys):
            raise CanonicalizationError("object keys must be strings")
        out.append("{")
        for i, key in enumerate(sorted(keys)):
            if i:
                out.append(",")
            out.append(json.dumps(key, ensure_ascii=False))
            out.append(":")
            _emit(value[key], out)
        out.append("}")
    else:
        raise CanonicalizationError(f"unsupported type: {type(value).__name__}")


def canonicalize(event: Any) -> bytes:
    """Serialize to canonical UTF-8 JSON bytes.

    Two logically equal events, whatever their field insertion order,
    canonicalize to identical bytes. The output contains no newlines.
    """
    parts: List[str] = []
    _emit(event, parts)
    return "".join(parts).encode("utf-8")


def parse_canonical(data: bytes) -> Any:
    """Inverse of canonicalize (up to int/float erasure for integral values)."""
    return json.loads(data.decode("utf-8"))


def compute_txid(canonical_bytes: bytes) -> str:
    """SHA-256 of the exact bytes, as 64 lowercase hex characters."""
    return hashlib.sha256(canonical_bytes).hexdigest()
