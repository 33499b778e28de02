"""Ranked (id, score) lists with deterministic tie-breaking.

Every ranked output in the library uses the same policy: scores descending,
ties broken by id ascending. Keeping the sort in one place means retrieval,
matching and recounting can never drift apart on tie handling.
"""

from __future__ import annotations

import json
from typing import Iterable, Tuple

RankedList = list  # list[tuple[str, float]]


def ranked(pairs: Iterable[Tuple[str, float]]) -> RankedList:
    """Sort (id, score) pairs by score descending, then id ascending."""
    items = [(str(i), float(s)) for i, s in pairs]
    items.sort(key=lambda p: (-p[1], p[0]))
    return items


def top_n(pairs: Iterable[Tuple[str, float]], n: int) -> RankedList:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return ranked(pairs)[:n]


def canonical_json(document) -> bytes:
    """Canonical byte serialization used by the CLI, the service and tests.

    Keys sorted, no whitespace, floats via repr (shortest round-trip), so
    equal documents always serialize to equal bytes.
    """
    return json.dumps(document, sort_keys=True, separators=(",", ":")).encode("utf-8")
