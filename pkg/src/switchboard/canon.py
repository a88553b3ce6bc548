"""Canonical JSON text form used everywhere values cross a boundary.

Every state, message body, wire frame, and stored snapshot is serialized
the same way: keys sorted, no insignificant whitespace, UTF-8. This makes
snapshots byte-comparable, which the replay machinery depends on.
"""

import json
import math

# The value model: None, bool, int, float, str, list, dict with str keys.
# Anything else (tuples, sets, NaN, custom objects) is rejected up front so
# it can't silently change shape on a round trip.


def _valid(value):
    # hot path: called on every node of every value crossing a boundary
    if value is None or isinstance(value, (bool, str, int)):
        return True
    if isinstance(value, float):
        return math.isfinite(value)
    if isinstance(value, list):
        return all(map(_valid, value))
    if isinstance(value, dict):
        for key, item in value.items():
            if not isinstance(key, str) or not _valid(item):
                return False
        return True
    return False


def _describe_violation(value, path):
    """Second walk, only after _valid failed: pinpoint the bad node."""
    if value is None or isinstance(value, (bool, str, int)):
        return None
    if isinstance(value, float):
        if not math.isfinite(value):
            return f"{path}: non-finite numbers are not serializable"
        return None
    if isinstance(value, list):
        for i, item in enumerate(value):
            found = _describe_violation(item, f"{path}[{i}]")
            if found:
                return found
        return None
    if isinstance(value, dict):
        for key, item in value.items():
            if not isinstance(key, str):
                return f"{path}: map keys must be text, got {key!r}"
            found = _describe_violation(item, f"{path}.{key}")
            if found:
                return found
        return None
    return f"{path}: unsupported value of type {type(value).__name__}"


def check_value(value, path="$"):
    """Raise ValueError if value is outside the serializable value model."""
    if not _valid(value):
        raise ValueError(_describe_violation(value, path))


def dumps(value):
    """Serialize to the canonical text form (no trailing newline)."""
    check_value(value)
    return dumps_trusted(value)


def dumps_trusted(value):
    """dumps without the validity walk, for values already inside the model.

    Safe only for values that came out of loads() or are built from such
    values; arbitrary caller input must go through dumps().
    """
    return json.dumps(value, sort_keys=True, separators=(",", ":"),
                      ensure_ascii=False, allow_nan=False)


def dump_bytes(value):
    return dumps(value).encode("utf-8")


def dump_bytes_trusted(value):
    return dumps_trusted(value).encode("utf-8")


def _reject_constant(name):
    raise ValueError(f"non-finite number {name} is not allowed")


def loads(text):
    """Parse JSON text back into a value; the result is always in the model."""
    if isinstance(text, (bytes, bytearray)):
        text = text.decode("utf-8")
    return json.loads(text, parse_constant=_reject_constant)


def copy_value(value):
    """Deep copy through the canonical form; also validates."""
    return loads(dumps(value))
