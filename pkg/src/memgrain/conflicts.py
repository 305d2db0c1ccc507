"""Write-time contradiction detection and the conflict queue.

A new record is compared against the active records sharing its namespace
and type; anything scoring at or above the namespace's contradiction
threshold becomes a candidate, and the write lands provisional until a
human picks one of three verdicts: supersede, retain, or annotate. The
state transitions themselves are applied by the store's event fold.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence

from .engine import (
    BinaryCode,
    BitStats,
    CandidateColumns,
    RetrievalParams,
    WeightTable,
    bit_weights,
    its_score,
    search,
)
from .model import MemoryRecord, MemoryType, RecordState

DEFAULT_CONTRADICTION_THRESHOLD = 0.90
MAX_CANDIDATES = 5

ACTION_SUPERSEDE = "supersede"
ACTION_RETAIN = "retain"
ACTION_ANNOTATE = "annotate"
RESOLUTION_ACTIONS = (ACTION_SUPERSEDE, ACTION_RETAIN, ACTION_ANNOTATE)


class ConflictState(str, enum.Enum):
    OPEN = "open"
    RESOLVED = "resolved"


@dataclass
class ConflictRecord:
    """A detected same-type contradiction awaiting a verdict.

    ``candidates`` holds up to MAX_CANDIDATES (record id, score) pairs,
    every score at or above the threshold in force when the conflict was
    opened, ordered by (score desc, created_at desc, id asc).
    """

    conflict_id: str
    namespace: str
    new_record: str
    candidates: list[tuple[str, float]]
    opened_at: int
    state: ConflictState = ConflictState.OPEN
    resolution: Optional[dict] = None  # {"action", "target", "at", "actor"}

    def to_dict(self) -> dict:
        return {
            "conflict_id": self.conflict_id,
            "namespace": self.namespace,
            "new_record": self.new_record,
            "candidates": [
                {"record_id": rid, "score": score} for rid, score in self.candidates
            ],
            "opened_at": self.opened_at,
            "state": self.state.value,
            "resolution": self.resolution,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ConflictRecord":
        return cls(
            conflict_id=d["conflict_id"],
            namespace=d["namespace"],
            new_record=d["new_record"],
            candidates=[(c["record_id"], c["score"]) for c in d["candidates"]],
            opened_at=d["opened_at"],
            state=ConflictState(d["state"]),
            resolution=d["resolution"],
        )


def detect(
    code: BinaryCode,
    memory_type: MemoryType,
    columns: CandidateColumns,
    stats: BitStats,
    threshold: float,
    extra: Sequence[MemoryRecord] = (),
) -> list[tuple[str, float]]:
    """Candidate contradictions for an incoming record.

    Scores ``code`` against every ACTIVE record of ``memory_type`` in
    ``columns`` (plus ``extra`` records not yet committed, e.g. earlier
    chunks of the same write) and returns (id, score) pairs with score >=
    threshold, ordered (score desc, created_at desc, id asc), capped at
    MAX_CANDIDATES. Provisional, superseded and retired records never
    become candidates.
    """
    params = RetrievalParams(
        max_k=MAX_CANDIDATES,
        threshold=threshold,
        types=frozenset({memory_type}),
    )
    hits = search(code, columns, params, stats, now=0)
    scored = [(-h.score, -h.record.created_at, h.record.id) for h in hits]
    relevant = [
        r for r in extra
        if r.type is memory_type and r.state is RecordState.ACTIVE
    ]
    if relevant:
        table = WeightTable(bit_weights(stats))
        for record in relevant:
            score = its_score(code, record.code, table)
            if score >= threshold:
                scored.append((-score, -record.created_at, record.id))
        scored.sort()
    return [(rid, -neg_score) for neg_score, _, rid in scored[:MAX_CANDIDATES]]


def order_conflicts(conflicts: Sequence[ConflictRecord]) -> list[ConflictRecord]:
    """Queue order: most recently opened first, id breaks ties."""
    return sorted(conflicts, key=lambda c: (-c.opened_at, c.conflict_id))
