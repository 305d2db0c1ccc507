"""Core domain vocabulary: memory types, record ids, records, sessions.

All timestamps are integer UTC milliseconds. Canonical serialization of
every type is sorted-key JSON (see :mod:`memgrain.canon`); ``to_dict`` /
``from_dict`` round-trip losslessly.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Optional

from .errors import ClockOutOfRange, UnknownType

if TYPE_CHECKING:
    from .engine import BinaryCode

MS_PER_HOUR = 3_600_000
SESSION_DURATION_MS = 6 * MS_PER_HOUR

_CLOCK_BITS = 48
_ENTROPY_BITS = 80


class MemoryKind(str, enum.Enum):
    EPISODIC = "episodic"
    SEMANTIC = "semantic"
    PROCEDURAL = "procedural"


class MemoryType(enum.Enum):
    """The closed 13-category schema.

    Each member carries a cognitive kind and a priority weight (1..5).
    Priority is surfaced as metadata only; it does not enter retrieval
    scores.
    """

    FACT = ("fact", MemoryKind.SEMANTIC, 4)
    PREFERENCE = ("preference", MemoryKind.SEMANTIC, 4)
    DECISION = ("decision", MemoryKind.SEMANTIC, 5)
    COMMITMENT = ("commitment", MemoryKind.SEMANTIC, 5)
    GOAL = ("goal", MemoryKind.SEMANTIC, 4)
    CONSTRAINT = ("constraint", MemoryKind.SEMANTIC, 5)
    RELATIONSHIP = ("relationship", MemoryKind.SEMANTIC, 3)
    IDENTITY = ("identity", MemoryKind.SEMANTIC, 4)
    CONTEXT = ("context", MemoryKind.SEMANTIC, 3)
    EVENT = ("event", MemoryKind.EPISODIC, 3)
    FEEDBACK = ("feedback", MemoryKind.EPISODIC, 3)
    PROCEDURE = ("procedure", MemoryKind.PROCEDURAL, 3)
    SKILL = ("skill", MemoryKind.PROCEDURAL, 3)

    def __init__(self, label: str, kind: MemoryKind, priority: int):
        self.label = label
        self.kind = kind
        self.priority = priority

    def __str__(self) -> str:
        return self.label


_TYPES_BY_NAME = {t.label: t for t in MemoryType}

DEFAULT_MEMORY_TYPE = MemoryType.FACT


def memory_type_from_string(name: str) -> MemoryType:
    """Look up a memory type by name, case-insensitively."""
    member = _TYPES_BY_NAME.get(name.strip().lower())
    if member is None:
        raise UnknownType(
            f"unknown memory type {name!r}; expected one of: "
            + ", ".join(sorted(_TYPES_BY_NAME)),
            detail={"name": name},
        )
    return member


def new_record_id(clock_ms: int, entropy: int) -> str:
    """Render a 128-bit id: high 48 bits clock ms, low 80 bits entropy.

    Lexicographic order of the 32-char hex rendering equals numeric order,
    so ids created later sort after earlier ones.
    """
    if not 0 <= clock_ms < (1 << _CLOCK_BITS):
        raise ClockOutOfRange(f"clock_ms {clock_ms} outside [0, 2^48)")
    if not 0 <= entropy < (1 << _ENTROPY_BITS):
        raise ClockOutOfRange(f"entropy {entropy} outside [0, 2^80)")
    return f"{(clock_ms << _ENTROPY_BITS) | entropy:032x}"


def record_id_clock_ms(record_id: str) -> int:
    """Extract the creation clock embedded in the top 12 hex chars."""
    return int(record_id[:12], 16)


class RecordState(str, enum.Enum):
    PROVISIONAL = "provisional"
    ACTIVE = "active"
    SUPERSEDED = "superseded"
    RETIRED = "retired"


@dataclass
class MemoryRecord:
    """One typed, timestamped, versioned memory chunk.

    ``content`` is immutable after write; lifecycle changes touch only the
    state / supersession / flag fields. ``change_times`` collects every
    lifecycle-transition timestamp (starting with ``created_at``) so that
    change-window queries survive snapshot and replay.
    """

    id: str
    namespace: str
    session_id: str
    type: MemoryType
    content: str
    tags: frozenset[str]
    code: "BinaryCode"
    created_at: int
    superseded_at: Optional[int] = None
    superseded_by: Optional[str] = None
    retired_at: Optional[int] = None
    state: RecordState = RecordState.ACTIVE
    conflict_flag: bool = False
    provenance: str = "stated"
    change_times: list[int] = field(default_factory=list, repr=False)

    def __post_init__(self):
        if not self.change_times:
            self.change_times.append(self.created_at)

    @property
    def last_changed_at(self) -> int:
        return max(self.change_times)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "namespace": self.namespace,
            "session_id": self.session_id,
            "type": self.type.label,
            "content": self.content,
            "tags": sorted(self.tags),
            "code": self.code.hex(),
            "created_at": self.created_at,
            "superseded_at": self.superseded_at,
            "superseded_by": self.superseded_by,
            "retired_at": self.retired_at,
            "state": self.state.value,
            "conflict_flag": self.conflict_flag,
            "provenance": self.provenance,
            "change_times": list(self.change_times),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MemoryRecord":
        from .engine import BinaryCode

        return cls(
            id=d["id"],
            namespace=d["namespace"],
            session_id=d["session_id"],
            type=memory_type_from_string(d["type"]),
            content=d["content"],
            tags=frozenset(d["tags"]),
            code=BinaryCode.from_hex(d["code"]),
            created_at=d["created_at"],
            superseded_at=d["superseded_at"],
            superseded_by=d["superseded_by"],
            retired_at=d.get("retired_at"),
            state=RecordState(d["state"]),
            conflict_flag=d["conflict_flag"],
            provenance=d["provenance"],
            change_times=list(d.get("change_times", ())),
        )


@dataclass(frozen=True)
class Session:
    """A time-bounded grouping window; never restricts retrieval."""

    session_id: str
    namespace: str
    start: int
    end: int

    def __post_init__(self):
        if self.end <= self.start:
            raise ValueError("session end must be after start")

    def covers(self, at: int) -> bool:
        return self.start <= at < self.end

    def to_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "namespace": self.namespace,
            "start": self.start,
            "end": self.end,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Session":
        return cls(
            session_id=d["session_id"],
            namespace=d["namespace"],
            start=d["start"],
            end=d["end"],
        )
