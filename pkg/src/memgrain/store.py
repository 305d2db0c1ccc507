"""Durable, namespace-isolated, bitemporal memory store.

Persistence is one append-only JSON-lines event log per namespace
(``{root}/{namespace}/events.log``) plus optional ``snapshot-{seq}.json``
files. Live state is maintained by folding committed events through the
same transition function replay uses, so a store reopened from disk can
never disagree with the one that produced the log.

Crash behaviour: appends are buffered (no fsync), so a hard kill may lose
a suffix of recent events and may tear the final line. Recovery drops a
torn unterminated tail with a diagnostic; anything worse (mid-file garbage,
sequence gaps, snapshot hash mismatch) raises CorruptLog.
"""

from __future__ import annotations

import json
import logging
import re
import secrets
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Optional

from .canon import canonical_bytes, state_hash
from .conflicts import (
    ACTION_ANNOTATE,
    ACTION_RETAIN,
    ACTION_SUPERSEDE,
    DEFAULT_CONTRADICTION_THRESHOLD,
    RESOLUTION_ACTIONS,
    ConflictRecord,
    ConflictState,
    detect,
    order_conflicts,
)
from .embedder import HashEmbedder
from .engine import (
    BitStats,
    CandidateColumns,
    RetrievalParams,
    ScoredHit,
    binarize,
    search,
    update_stats,
)
from .errors import (
    AlreadyResolved,
    CorruptLog,
    EmptyContent,
    IllegalTransition,
    InvalidRange,
    NotFound,
    StorageFailure,
)
from .model import (
    DEFAULT_MEMORY_TYPE,
    SESSION_DURATION_MS,
    MemoryRecord,
    MemoryType,
    RecordState,
    Session,
    memory_type_from_string,
    new_record_id,
)

log = logging.getLogger(__name__)

EVENT_RECORD_WRITTEN = "record_written"
EVENT_CONFLICT_OPENED = "conflict_opened"
EVENT_CONFLICT_RESOLVED = "conflict_resolved"
EVENT_SESSION_OPENED = "session_opened"
EVENT_KINDS = (
    EVENT_RECORD_WRITTEN,
    EVENT_CONFLICT_OPENED,
    EVENT_CONFLICT_RESOLVED,
    EVENT_SESSION_OPENED,
)

LOG_NAME = "events.log"
SNAPSHOT_RE = re.compile(r"^snapshot-(\d+)\.json$")

CHUNK_LIMIT = 2000
CHUNK_OVERLAP = 200
MAX_CHUNKS = 100

# namespaces double as directory names, so keep them boring
NAMESPACE_RE = re.compile(r"^[a-z0-9][a-z0-9._-]{0,63}$")

_WS_RE = re.compile(r"\s")


def valid_namespace(name: str) -> bool:
    return bool(NAMESPACE_RE.match(name))


def split_content(text: str) -> list[str]:
    """Split long content into chunks of at most CHUNK_LIMIT characters.

    Each split lands on the last whitespace inside the window, and the next
    chunk starts CHUNK_OVERLAP characters back so context spans the seam.
    The chunk cap folds any remainder into the final chunk rather than
    dropping text.
    """
    if len(text) <= CHUNK_LIMIT:
        return [text]
    chunks: list[str] = []
    start = 0
    while len(text) - start > CHUNK_LIMIT and len(chunks) < MAX_CHUNKS - 1:
        window = text[start : start + CHUNK_LIMIT]
        cut = max((m.start() for m in _WS_RE.finditer(window)), default=0)
        cut_abs = start + (cut if cut > 0 else CHUNK_LIMIT)
        chunks.append(text[start:cut_abs])
        start = max(cut_abs - CHUNK_OVERLAP, start + 1)
    chunks.append(text[start:])
    return chunks


@dataclass(frozen=True)
class LogEvent:
    """One line of the append-only log."""

    seq: int
    at: int
    kind: str
    payload: dict

    def to_dict(self) -> dict:
        return {"seq": self.seq, "at": self.at, "kind": self.kind,
                "payload": self.payload}

    def to_line(self) -> bytes:
        return canonical_bytes(self.to_dict()) + b"\n"

    @classmethod
    def from_dict(cls, d: dict) -> "LogEvent":
        return cls(seq=d["seq"], at=d["at"], kind=d["kind"], payload=d["payload"])


class EventLog:
    """Append-only JSON-lines file with torn-tail recovery.

    ``read()`` validates the whole file: sequence numbers must run 1..n
    with no gaps and every terminated line must parse. An unterminated,
    unparseable final line is treated as a torn write: it is dropped,
    remembered in ``recovery_note``, and physically truncated before the
    next append.
    """

    def __init__(self, path: Path):
        self.path = path
        self.recovery_note: Optional[str] = None
        self._trim_to: Optional[int] = None
        self._fh = None

    def read(self) -> list[LogEvent]:
        if not self.path.exists():
            return []
        data = self.path.read_bytes()
        events: list[LogEvent] = []
        expected = 1
        start = 0
        size = len(data)
        while start < size:
            nl = data.find(b"\n", start)
            if nl == -1:
                raw, terminated, end = data[start:], False, size
            else:
                raw, terminated, end = data[start:nl], True, nl + 1
            event = self._parse(raw, expected)
            if event is None:
                if not terminated:
                    self.recovery_note = (
                        f"dropped torn final log line (expected seq {expected}, "
                        f"byte offset {start})"
                    )
                    self._trim_to = start
                    log.warning("%s: %s", self.path, self.recovery_note)
                    break
                raise CorruptLog(
                    f"unreadable or out-of-order event in {self.path}",
                    seq=expected,
                )
            events.append(event)
            expected += 1
            start = end
        return events

    @staticmethod
    def _parse(raw: bytes, expected: int) -> Optional[LogEvent]:
        try:
            d = json.loads(raw)
        except (ValueError, UnicodeDecodeError):
            return None
        if not isinstance(d, dict):
            return None
        try:
            event = LogEvent.from_dict(d)
        except KeyError:
            return None
        if event.seq != expected or event.kind not in EVENT_KINDS:
            return None
        if not isinstance(event.at, int) or not isinstance(event.payload, dict):
            return None
        return event

    def append_lines(self, lines: Iterable[bytes]) -> None:
        try:
            if self._fh is None:
                self.path.parent.mkdir(parents=True, exist_ok=True)
                if self._trim_to is not None and self.path.exists():
                    with open(self.path, "r+b") as fh:
                        fh.truncate(self._trim_to)
                    self._trim_to = None
                self._fh = open(self.path, "ab")
            self._fh.write(b"".join(lines))
            self._fh.flush()
        except OSError as exc:
            raise StorageFailure(f"log append failed: {exc}") from exc

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None


class NamespaceState:
    """In-memory projection of one namespace's event log.

    ``apply`` is the replay fold step and the only mutation path, for the
    live store and for reconstruction alike.
    """

    def __init__(self, namespace: str, dimension: int):
        self.namespace = namespace
        self.dimension = dimension
        self.records: dict[str, MemoryRecord] = {}
        self.rows: dict[str, int] = {}
        self.columns = CandidateColumns(dimension)
        self.stats = BitStats.empty(dimension)
        self.sessions: dict[str, Session] = {}
        self.conflicts: dict[str, ConflictRecord] = {}
        self.open_conflicts = 0
        self.last_seq = 0

    def apply(self, event: LogEvent) -> None:
        if event.seq != self.last_seq + 1:
            raise CorruptLog(
                f"event sequence jumped from {self.last_seq} to {event.seq}",
                seq=event.seq,
            )
        if event.kind == EVENT_RECORD_WRITTEN:
            self._apply_record(event)
        elif event.kind == EVENT_SESSION_OPENED:
            session = Session.from_dict(event.payload)
            self.sessions[session.session_id] = session
        elif event.kind == EVENT_CONFLICT_OPENED:
            self._apply_conflict_opened(event)
        elif event.kind == EVENT_CONFLICT_RESOLVED:
            self._apply_conflict_resolved(event)
        else:
            raise CorruptLog(f"unknown event kind {event.kind!r}", seq=event.seq)
        self.last_seq = event.seq

    def _apply_record(self, event: LogEvent) -> None:
        record = MemoryRecord.from_dict(event.payload)
        row = self.rows.get(record.id)
        if row is None:
            self.records[record.id] = record
            self.rows[record.id] = self.columns.append(record)
            self.stats = update_stats(self.stats, record.code)
        else:
            # re-written ids are lifecycle updates; the code was counted
            # into the stats on first write and codes never change
            self.records[record.id] = record
            self.columns.records[row] = record
            self.columns.refresh(row)

    def _apply_conflict_opened(self, event: LogEvent) -> None:
        conflict = ConflictRecord.from_dict(event.payload)
        self.conflicts[conflict.conflict_id] = conflict
        self.open_conflicts += 1
        record = self.records.get(conflict.new_record)
        if record is not None and record.state is RecordState.ACTIVE:
            record.state = RecordState.PROVISIONAL
            self.columns.refresh(self.rows[record.id])

    def _apply_conflict_resolved(self, event: LogEvent) -> None:
        payload = event.payload
        conflict = self.conflicts.get(payload["conflict_id"])
        if conflict is None or conflict.state is ConflictState.RESOLVED:
            return
        at = event.at
        action = payload["action"]
        new = self.records.get(conflict.new_record)
        if action == ACTION_SUPERSEDE:
            for candidate_id, _score in conflict.candidates:
                self._supersede(candidate_id, conflict.new_record, at)
            self._activate(new, at)
        elif action == ACTION_RETAIN:
            if new is not None and new.state is RecordState.PROVISIONAL:
                new.state = RecordState.RETIRED
                new.retired_at = at
                new.change_times.append(at)
                self.columns.refresh(self.rows[new.id])
        elif action == ACTION_ANNOTATE:
            self._activate(new, at)
            if new is not None and not new.conflict_flag:
                new.conflict_flag = True
                if new.change_times[-1] != at:
                    new.change_times.append(at)
            for candidate_id, _score in conflict.candidates:
                candidate = self.records.get(candidate_id)
                if candidate is not None and not candidate.conflict_flag:
                    candidate.conflict_flag = True
                    candidate.change_times.append(at)
        conflict.state = ConflictState.RESOLVED
        conflict.resolution = {
            "action": action,
            "target": payload.get("target"),
            "at": at,
            "actor": payload.get("actor"),
        }
        self.open_conflicts -= 1

    def _supersede(self, old_id: str, new_id: str, at: int) -> None:
        old = self.records.get(old_id)
        if old is None or old.state not in (RecordState.ACTIVE,
                                            RecordState.PROVISIONAL):
            return  # already ended by an earlier, overlapping resolution
        old.state = RecordState.SUPERSEDED
        old.superseded_at = at
        old.superseded_by = new_id
        old.change_times.append(at)
        self.columns.refresh(self.rows[old_id])

    def _activate(self, record: Optional[MemoryRecord], at: int) -> None:
        if record is not None and record.state is RecordState.PROVISIONAL:
            record.state = RecordState.ACTIVE
            record.change_times.append(at)
            self.columns.refresh(self.rows[record.id])

    def state_hash(self) -> str:
        return state_hash([r.to_dict() for r in self.records.values()])


@dataclass(frozen=True)
class Snapshot:
    """Full namespace state at a log position; replaying the log up to
    ``as_of_seq`` reproduces exactly this ``records_hash``."""

    namespace: str
    as_of_seq: int
    records: list  # canonical record dicts, sorted by id
    stats: dict
    sessions: list
    conflicts: list
    records_hash: str

    @classmethod
    def of(cls, state: NamespaceState) -> "Snapshot":
        records = sorted(
            (r.to_dict() for r in state.records.values()), key=lambda d: d["id"]
        )
        return cls(
            namespace=state.namespace,
            as_of_seq=state.last_seq,
            records=records,
            stats=state.stats.to_dict(),
            sessions=[s.to_dict() for s in
                      sorted(state.sessions.values(),
                             key=lambda s: (s.start, s.session_id))],
            conflicts=[c.to_dict() for c in
                       sorted(state.conflicts.values(),
                              key=lambda c: c.conflict_id)],
            records_hash=state_hash(records),
        )

    def to_dict(self) -> dict:
        return {
            "namespace": self.namespace,
            "as_of_seq": self.as_of_seq,
            "records": self.records,
            "stats": self.stats,
            "sessions": self.sessions,
            "conflicts": self.conflicts,
            "state_hash": self.records_hash,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Snapshot":
        return cls(
            namespace=d["namespace"],
            as_of_seq=d["as_of_seq"],
            records=d["records"],
            stats=d["stats"],
            sessions=d["sessions"],
            conflicts=d["conflicts"],
            records_hash=d["state_hash"],
        )

    def restore(self, dimension: int) -> NamespaceState:
        if state_hash(self.records) != self.records_hash:
            raise CorruptLog(
                f"snapshot hash mismatch for {self.namespace!r}",
                seq=self.as_of_seq,
            )
        state = NamespaceState(self.namespace, dimension)
        for d in self.records:
            record = MemoryRecord.from_dict(d)
            state.records[record.id] = record
            state.rows[record.id] = state.columns.append(record)
        state.stats = BitStats.from_dict(self.stats)
        state.sessions = {
            s["session_id"]: Session.from_dict(s) for s in self.sessions
        }
        state.conflicts = {
            c["conflict_id"]: ConflictRecord.from_dict(c) for c in self.conflicts
        }
        state.open_conflicts = sum(
            1 for c in state.conflicts.values() if c.state is ConflictState.OPEN
        )
        state.last_seq = self.as_of_seq
        return state


def replay(
    events: Iterable[LogEvent],
    namespace: str,
    dimension: int,
    base: Optional[Snapshot] = None,
) -> NamespaceState:
    """Pure left-fold of an event sequence into a namespace state."""
    state = (base.restore(dimension) if base is not None
             else NamespaceState(namespace, dimension))
    for event in events:
        if event.seq <= state.last_seq:
            continue  # events already folded into the base snapshot
        state.apply(event)
    return state


@dataclass(frozen=True)
class WriteOutcome:
    """What one remember() call produced: one record per chunk, plus any
    conflicts those records opened."""

    records: list[MemoryRecord]
    opened_conflicts: list[ConflictRecord]

    @property
    def record(self) -> MemoryRecord:
        return self.records[0]


class _Space:
    __slots__ = ("state", "log")

    def __init__(self, state: NamespaceState, event_log: EventLog):
        self.state = state
        self.log = event_log


def _default_clock() -> int:
    return time.time_ns() // 1_000_000


def _default_entropy() -> int:
    return secrets.randbits(80)


class MemoryStore:
    """Facade over per-namespace event-sourced states.

    Writes serialize through one lock. ``clock`` and ``entropy`` are
    injectable for reproducible runs; the defaults are wall time and
    cryptographic randomness.
    """

    def __init__(
        self,
        root,
        embedder=None,
        *,
        contradiction_threshold: float = DEFAULT_CONTRADICTION_THRESHOLD,
        namespace_thresholds: Optional[dict] = None,
        clock: Optional[Callable[[], int]] = None,
        entropy: Optional[Callable[[], int]] = None,
        workers: Optional[int] = None,
    ):
        self.root = Path(root)
        self.embedder = embedder if embedder is not None else HashEmbedder()
        self.dimension = self.embedder.dimension
        self.contradiction_threshold = contradiction_threshold
        self.namespace_thresholds = dict(namespace_thresholds or {})
        self.clock = clock or _default_clock
        self.entropy = entropy or _default_entropy
        self.workers = workers
        self.retrieval_queries = 0  # bumped once per search; answer() must add exactly 1
        self._lock = threading.RLock()
        self._spaces: dict[str, _Space] = {}
        self.root.mkdir(parents=True, exist_ok=True)
        for child in sorted(self.root.iterdir()):
            if child.is_dir() and valid_namespace(child.name):
                self._load(child.name)

    # -- namespace lifecycle ------------------------------------------------

    def _load(self, namespace: str) -> _Space:
        directory = self.root / namespace
        event_log = EventLog(directory / LOG_NAME)
        snapshot = self._latest_snapshot(directory)
        events = event_log.read()
        state = replay(events, namespace, self.dimension, base=snapshot)
        space = _Space(state, event_log)
        self._spaces[namespace] = space
        return space

    def _latest_snapshot(self, directory: Path) -> Optional[Snapshot]:
        best: Optional[tuple[int, Path]] = None
        if directory.exists():
            for child in directory.iterdir():
                m = SNAPSHOT_RE.match(child.name)
                if m:
                    seq = int(m.group(1))
                    if best is None or seq > best[0]:
                        best = (seq, child)
        if best is None:
            return None
        try:
            payload = json.loads(best[1].read_text("utf-8"))
        except ValueError as exc:
            raise CorruptLog(f"unparseable snapshot {best[1]}", seq=best[0]) from exc
        return Snapshot.from_dict(payload)

    def _space(self, namespace: str, create: bool = False) -> Optional[_Space]:
        if not valid_namespace(namespace):
            raise ValueError(
                f"invalid namespace {namespace!r}; expected {NAMESPACE_RE.pattern}"
            )
        space = self._spaces.get(namespace)
        if space is not None:
            return space
        if (self.root / namespace / LOG_NAME).exists():
            return self._load(namespace)
        if not create:
            return None
        state = NamespaceState(namespace, self.dimension)
        space = _Space(state, EventLog(self.root / namespace / LOG_NAME))
        self._spaces[namespace] = space
        return space

    def namespaces(self) -> list[str]:
        return sorted(self._spaces)

    def close(self) -> None:
        for space in self._spaces.values():
            space.log.close()

    # -- write path ----------------------------------------------------------

    def remember(
        self,
        namespace: str,
        content: str,
        *,
        type: Optional[str | MemoryType] = None,
        tags: Iterable[str] = (),
        session_id: Optional[str] = None,
        at: Optional[int] = None,
    ) -> WriteOutcome:
        if isinstance(type, MemoryType):
            memory_type = type
        elif type is None:
            memory_type = DEFAULT_MEMORY_TYPE
        else:
            memory_type = memory_type_from_string(type)
        if not isinstance(content, str) or not content.strip():
            raise EmptyContent("content is empty")
        chunks = split_content(content)
        codes = [binarize(e) for e in self.embedder.embed_batch(chunks)]

        with self._lock:
            space = self._space(namespace, create=True)
            state = space.state
            if at is None:
                at = self.clock()
            threshold = self.namespace_thresholds.get(
                namespace, self.contradiction_threshold
            )

            staged: list[LogEvent] = []
            seq = state.last_seq
            sid = session_id
            if sid is None:
                session = self._covering_session(state, at)
                if session is None:
                    session = Session(
                        session_id=f"s-{at:012x}",
                        namespace=namespace,
                        start=at,
                        end=at + SESSION_DURATION_MS,
                    )
                    seq += 1
                    staged.append(
                        LogEvent(seq, at, EVENT_SESSION_OPENED, session.to_dict())
                    )
                sid = session.session_id

            # detection runs against committed state plus earlier chunks of
            # this same call, exactly as the fold will apply them
            overlay_stats = state.stats
            overlay_records: list[MemoryRecord] = []
            record_ids: list[str] = []
            conflict_ids: list[str] = []
            for chunk, code in zip(chunks, codes):
                record = MemoryRecord(
                    id=new_record_id(at, self.entropy()),
                    namespace=namespace,
                    session_id=sid,
                    type=memory_type,
                    content=chunk,
                    tags=frozenset(tags),
                    code=code,
                    created_at=at,
                    state=RecordState.ACTIVE,
                )
                overlay_stats = update_stats(overlay_stats, code)
                if threshold > 1.0:
                    # nothing can score above 1.0, so don't bother scanning;
                    # this is how bulk-load namespaces switch detection off
                    candidates = []
                else:
                    candidates = detect(
                        code, memory_type, state.columns, overlay_stats,
                        threshold, extra=overlay_records,
                    )
                conflict = None
                if candidates:
                    record.state = RecordState.PROVISIONAL
                    conflict = ConflictRecord(
                        conflict_id=new_record_id(at, self.entropy()),
                        namespace=namespace,
                        new_record=record.id,
                        candidates=candidates,
                        opened_at=at,
                    )
                else:
                    overlay_records.append(record)
                seq += 1
                staged.append(
                    LogEvent(seq, at, EVENT_RECORD_WRITTEN, record.to_dict())
                )
                record_ids.append(record.id)
                if conflict is not None:
                    seq += 1
                    staged.append(
                        LogEvent(seq, at, EVENT_CONFLICT_OPENED, conflict.to_dict())
                    )
                    conflict_ids.append(conflict.conflict_id)

            self._commit(namespace, space, staged)
            return WriteOutcome(
                records=[state.records[rid] for rid in record_ids],
                opened_conflicts=[state.conflicts[cid] for cid in conflict_ids],
            )

    @staticmethod
    def _covering_session(state: NamespaceState, at: int) -> Optional[Session]:
        best = None
        for session in state.sessions.values():
            if session.covers(at) and (best is None or session.start > best.start):
                best = session
        return best

    def _commit(self, namespace: str, space: _Space, staged: list[LogEvent]) -> None:
        """Make staged events durable, then fold them into live state."""
        try:
            space.log.append_lines([e.to_line() for e in staged])
        except StorageFailure:
            # the file may hold a torn suffix; force a clean reload that
            # recovers the durable prefix before anything else happens
            space.log.close()
            self._spaces.pop(namespace, None)
            raise
        for event in staged:
            space.state.apply(event)

    # -- reads ----------------------------------------------------------------

    def recall(
        self,
        namespace: str,
        query_text: str,
        params: Optional[RetrievalParams] = None,
        *,
        now: Optional[int] = None,
    ) -> list[ScoredHit]:
        params = params if params is not None else RetrievalParams()
        code = binarize(self.embedder.embed(query_text))
        with self._lock:
            space = self._space(namespace)
            if space is None:
                return []
            if now is None:
                now = self.clock()
            self.retrieval_queries += 1
            return search(
                code, space.state.columns, params, space.state.stats,
                now=now, workers=self.workers,
            )

    def get(self, record_id: str, namespace: Optional[str] = None) -> MemoryRecord:
        with self._lock:
            spaces = (
                [self._space(namespace)] if namespace is not None
                else list(self._spaces.values())
            )
            for space in spaces:
                if space is not None:
                    record = space.state.records.get(record_id)
                    if record is not None:
                        return record
        raise NotFound(f"no record {record_id!r}", detail={"id": record_id})

    def as_of(self, namespace: str, t: int) -> list[MemoryRecord]:
        """The records alive at instant t: created by then, not yet
        superseded, not yet retired. Sorted by id."""
        with self._lock:
            space = self._space(namespace)
            if space is None:
                return []
            alive = [
                r for r in space.state.records.values()
                if r.created_at <= t
                and (r.superseded_at is None or r.superseded_at > t)
                and (r.retired_at is None or r.retired_at > t)
            ]
        return sorted(alive, key=lambda r: r.id)

    def changed_since(
        self, namespace: str, t0: int, t1: Optional[int] = None
    ) -> list[MemoryRecord]:
        """Records with any lifecycle transition in [t0, t1); t1 omitted
        means unbounded. Sorted by last change time, then id."""
        if t1 is not None and t1 < t0:
            raise InvalidRange(f"until {t1} precedes since {t0}")
        with self._lock:
            space = self._space(namespace)
            if space is None:
                return []
            hits = [
                r for r in space.state.records.values()
                if any(ts >= t0 and (t1 is None or ts < t1)
                       for ts in r.change_times)
            ]
        return sorted(hits, key=lambda r: (r.last_changed_at, r.id))

    def sessions(self, namespace: Optional[str] = None) -> list[Session]:
        with self._lock:
            if namespace is not None:
                space = self._space(namespace)
                found = list(space.state.sessions.values()) if space else []
            else:
                found = [
                    s for space in self._spaces.values()
                    for s in space.state.sessions.values()
                ]
        return sorted(found, key=lambda s: (s.start, s.session_id))

    # -- lifecycle writes ------------------------------------------------------

    def apply_supersession(
        self, namespace: str, old_id: str, new_id: str, at: Optional[int] = None
    ) -> tuple[MemoryRecord, MemoryRecord]:
        """Mark old_id replaced by new_id; activates new_id if provisional."""
        with self._lock:
            space = self._space(namespace)
            if space is None:
                raise NotFound(f"no namespace {namespace!r}")
            state = space.state
            old = state.records.get(old_id)
            new = state.records.get(new_id)
            if old is None:
                raise NotFound(f"no record {old_id!r}", detail={"id": old_id})
            if new is None:
                raise NotFound(f"no record {new_id!r}", detail={"id": new_id})
            if old_id == new_id:
                raise IllegalTransition("a record cannot supersede itself")
            if old.state not in (RecordState.ACTIVE, RecordState.PROVISIONAL):
                raise IllegalTransition(
                    f"cannot supersede a {old.state.value} record"
                )
            if new.state in (RecordState.SUPERSEDED, RecordState.RETIRED):
                raise IllegalTransition(
                    f"cannot activate a {new.state.value} record as a replacement"
                )
            if at is None:
                at = self.clock()
            if at < old.created_at or at < new.created_at:
                raise IllegalTransition(
                    "supersession cannot predate either record"
                )

            old_d = old.to_dict()
            old_d["state"] = RecordState.SUPERSEDED.value
            old_d["superseded_at"] = at
            old_d["superseded_by"] = new_id
            old_d["change_times"] = old_d["change_times"] + [at]
            # becoming the successor is a lifecycle change for the new
            # record too, so both sides land in changed_since windows
            new_d = new.to_dict()
            new_d["state"] = RecordState.ACTIVE.value
            new_d["change_times"] = new_d["change_times"] + [at]
            staged = [
                LogEvent(state.last_seq + 1, at, EVENT_RECORD_WRITTEN, old_d),
                LogEvent(state.last_seq + 2, at, EVENT_RECORD_WRITTEN, new_d),
            ]
            self._commit(namespace, space, staged)
            return state.records[old_id], state.records[new_id]

    def resolve_conflict(
        self,
        namespace: Optional[str],
        conflict_id: str,
        action: str,
        *,
        actor: Optional[str] = None,
        target: Optional[str] = None,
        at: Optional[int] = None,
    ) -> ConflictRecord:
        if action not in RESOLUTION_ACTIONS:
            raise ValueError(
                f"unknown action {action!r}; expected one of {RESOLUTION_ACTIONS}"
            )
        with self._lock:
            if namespace is not None:
                space = self._space(namespace)
                conflict = space.state.conflicts.get(conflict_id) if space else None
            else:
                space = conflict = None
                for ns, candidate_space in self._spaces.items():
                    found = candidate_space.state.conflicts.get(conflict_id)
                    if found is not None:
                        namespace, space, conflict = ns, candidate_space, found
                        break
            if conflict is None:
                raise NotFound(
                    f"no conflict {conflict_id!r}", detail={"id": conflict_id}
                )
            if conflict.state is ConflictState.RESOLVED:
                raise AlreadyResolved(
                    f"conflict {conflict_id} was already resolved",
                    detail={"resolution": conflict.resolution},
                )
            if at is None:
                at = self.clock()
            payload = {
                "conflict_id": conflict_id,
                "action": action,
                "target": target,
                "actor": actor,
            }
            event = LogEvent(
                space.state.last_seq + 1, at, EVENT_CONFLICT_RESOLVED, payload
            )
            self._commit(namespace, space, [event])
            return space.state.conflicts[conflict_id]

    def list_conflicts(
        self, namespace: Optional[str] = None, state: str = "all"
    ) -> list[ConflictRecord]:
        if state not in ("open", "resolved", "all"):
            raise ValueError(f"unknown conflict state filter {state!r}")
        with self._lock:
            if namespace is not None:
                space = self._space(namespace)
                found = list(space.state.conflicts.values()) if space else []
            else:
                found = [
                    c for space in self._spaces.values()
                    for c in space.state.conflicts.values()
                ]
        if state != "all":
            found = [c for c in found if c.state.value == state]
        return order_conflicts(found)

    # -- maintenance -------------------------------------------------------------

    def state_hash(self, namespace: str) -> str:
        with self._lock:
            space = self._space(namespace)
            if space is None:
                return state_hash([])
            return space.state.state_hash()

    def write_snapshot(self, namespace: str) -> Path:
        with self._lock:
            space = self._space(namespace)
            if space is None:
                raise NotFound(f"no namespace {namespace!r}")
            snapshot = Snapshot.of(space.state)
            path = self.root / namespace / f"snapshot-{snapshot.as_of_seq}.json"
            try:
                path.parent.mkdir(parents=True, exist_ok=True)
                tmp = path.with_suffix(".json.tmp")
                tmp.write_bytes(canonical_bytes(snapshot.to_dict()))
                tmp.replace(path)
            except OSError as exc:
                raise StorageFailure(f"snapshot write failed: {exc}") from exc
            return path

    def counters(self) -> dict:
        with self._lock:
            return {
                "namespaces": len(self._spaces),
                "records": sum(
                    len(s.state.records) for s in self._spaces.values()
                ),
                "open_conflicts": sum(
                    s.state.open_conflicts for s in self._spaces.values()
                ),
            }
