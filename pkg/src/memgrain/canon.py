"""Canonical JSON encoding and state hashing.

Everything that crosses a boundary (wire, event log, snapshot, hash input)
is UTF-8 JSON with lexicographically sorted keys and no whitespace, so the
same state always serializes to the same bytes.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def canonical_bytes(obj: Any) -> bytes:
    return canonical_json(obj).encode("utf-8")


def state_hash(record_dicts: list[dict]) -> str:
    """SHA-256 over the canonical serialization of records sorted by id."""
    ordered = sorted(record_dicts, key=lambda r: r["id"])
    return hashlib.sha256(canonical_bytes(ordered)).hexdigest()
