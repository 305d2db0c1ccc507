"""memgrain: a local, deterministic, typed long-term memory engine.

Text is embedded with a deterministic feature hasher, sign-binarized to
one bit per dimension, and retrieved by an exhaustive entropy-weighted
bit-match scan — no approximate index, so the same query over the same
store always returns the same hits. Records are namespaced, typed,
session-grouped, versioned non-destructively, and persisted to an
append-only event log that replays to an identical state.
"""

from .canon import canonical_bytes, canonical_json, state_hash
from .conflicts import (
    DEFAULT_CONTRADICTION_THRESHOLD,
    RESOLUTION_ACTIONS,
    ConflictRecord,
    ConflictState,
)
from .embedder import (
    EmbedderConfig,
    Embedding,
    ExternalEmbedder,
    HashEmbedder,
    make_embedder,
)
from .engine import (
    BinaryCode,
    BitStats,
    RetrievalParams,
    ScoredHit,
    binarize,
    bit_weights,
    hamming,
    its_score,
    search,
    update_stats,
)
from .errors import (
    AlreadyResolved,
    ClockOutOfRange,
    CorruptLog,
    DimensionMismatch,
    EmptyContent,
    ExternalUnavailable,
    FutureDate,
    IllegalTransition,
    InvalidRange,
    LlmUnavailable,
    MemgrainError,
    NotFound,
    StorageFailure,
    UnknownType,
)
from .llm import ExternalLlm, LlmClient, OfflineLlm, make_llm
from .model import (
    DEFAULT_MEMORY_TYPE,
    SESSION_DURATION_MS,
    MemoryKind,
    MemoryRecord,
    MemoryType,
    RecordState,
    Session,
    memory_type_from_string,
    new_record_id,
)
from .service import create_app, serve
from .store import (
    EventLog,
    LogEvent,
    MemoryStore,
    Snapshot,
    WriteOutcome,
    replay,
    split_content,
)

__version__ = "0.1.0"

__all__ = [
    "AlreadyResolved",
    "BinaryCode",
    "BitStats",
    "ClockOutOfRange",
    "ConflictRecord",
    "ConflictState",
    "CorruptLog",
    "DEFAULT_CONTRADICTION_THRESHOLD",
    "DEFAULT_MEMORY_TYPE",
    "DimensionMismatch",
    "EmbedderConfig",
    "Embedding",
    "EmptyContent",
    "EventLog",
    "ExternalEmbedder",
    "ExternalLlm",
    "ExternalUnavailable",
    "FutureDate",
    "HashEmbedder",
    "IllegalTransition",
    "InvalidRange",
    "LlmClient",
    "LlmUnavailable",
    "LogEvent",
    "MemgrainError",
    "MemoryKind",
    "MemoryRecord",
    "MemoryStore",
    "MemoryType",
    "NotFound",
    "OfflineLlm",
    "RESOLUTION_ACTIONS",
    "RecordState",
    "RetrievalParams",
    "SESSION_DURATION_MS",
    "ScoredHit",
    "Session",
    "Snapshot",
    "StorageFailure",
    "UnknownType",
    "WriteOutcome",
    "binarize",
    "bit_weights",
    "canonical_bytes",
    "canonical_json",
    "create_app",
    "hamming",
    "its_score",
    "make_embedder",
    "make_llm",
    "memory_type_from_string",
    "new_record_id",
    "replay",
    "search",
    "serve",
    "split_content",
    "state_hash",
    "update_stats",
]
