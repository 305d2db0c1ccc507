"""Retrieval core: sign binarization, per-bit corpus statistics,
entropy-weighted bit-match scoring, and threshold-gated exhaustive search.

Scores are a matched-weight fraction: each bit gets a weight equal to the
binary entropy of its (Laplace-smoothed) occurrence rate in the namespace,
and the score of a query/document pair is the weight mass on agreeing bits
divided by the total weight mass. Uncertain bits therefore carry more
evidence than bits that are almost always 0 or almost always 1.

Every scoring path (single pair, vectorized block, partitioned workers)
accumulates per-byte lookup-table values in the same left-to-right order,
so scores are bit-identical regardless of how candidates are batched.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .embedder import Embedding
from .errors import DimensionMismatch
from .model import MemoryRecord, MemoryType, RecordState

DEFAULT_MAX_K = 100
DEFAULT_THRESHOLD = 0.05

# bit patterns of every byte value, LSB first: (256, 8)
_BYTE_BITS = np.unpackbits(
    np.arange(256, dtype=np.uint8)[:, None], axis=1, bitorder="little"
)
_BYTE_BITS_F = _BYTE_BITS.astype(np.float64)

_TYPE_INDEX = {t: i for i, t in enumerate(MemoryType)}
_STATE_INDEX = {s: i for i, s in enumerate(RecordState)}
_ACTIVE = _STATE_INDEX[RecordState.ACTIVE]
_RETIRED = _STATE_INDEX[RecordState.RETIRED]


@dataclass(frozen=True)
class BinaryCode:
    """A D-bit code packed 8 bits per byte, bit i at byte i//8, LSB-first."""

    data: bytes

    @property
    def dimension(self) -> int:
        return len(self.data) * 8

    def hex(self) -> str:
        return self.data.hex()

    @classmethod
    def from_hex(cls, s: str) -> "BinaryCode":
        return cls(bytes.fromhex(s))

    @classmethod
    def from_bits(cls, bits: Sequence[int]) -> "BinaryCode":
        arr = np.asarray(bits, dtype=np.uint8)
        if arr.size % 8 != 0:
            raise DimensionMismatch(f"bit count {arr.size} is not a multiple of 8")
        return cls(np.packbits(arr, bitorder="little").tobytes())

    def to_bits(self) -> np.ndarray:
        return np.unpackbits(np.frombuffer(self.data, dtype=np.uint8),
                             bitorder="little")

    def to_array(self) -> np.ndarray:
        return np.frombuffer(self.data, dtype=np.uint8)


def hamming(a: BinaryCode, b: BinaryCode) -> int:
    """Count of differing bits."""
    if len(a.data) != len(b.data):
        raise DimensionMismatch("codes differ in length")
    xor = np.bitwise_xor(a.to_array(), b.to_array())
    return int(np.bitwise_count(xor).sum())


@dataclass(frozen=True)
class BitStats:
    """Per-namespace bit-occurrence counts: counts[i] = records with bit i set."""

    counts: np.ndarray
    n: int

    @classmethod
    def empty(cls, dimension: int) -> "BitStats":
        return cls(np.zeros(dimension, dtype=np.int64), 0)

    @property
    def dimension(self) -> int:
        return int(self.counts.shape[0])

    def to_dict(self) -> dict:
        return {"counts": self.counts.tolist(), "n": self.n}

    @classmethod
    def from_dict(cls, d: dict) -> "BitStats":
        return cls(np.asarray(d["counts"], dtype=np.int64), d["n"])


def binarize(e: Embedding) -> BinaryCode:
    """Sign binarization: bit i = 1 iff e.values[i] > 0 (exact zero -> 0)."""
    if e.dimension % 8 != 0:
        raise DimensionMismatch(f"dimension {e.dimension} is not a multiple of 8")
    bits = (e.values > 0).astype(np.uint8)
    return BinaryCode(np.packbits(bits, bitorder="little").tobytes())


def update_stats(s: BitStats, c: BinaryCode) -> BitStats:
    """Fold one code into the stats; counts never decrease."""
    if c.dimension != s.dimension:
        raise DimensionMismatch(
            f"code dimension {c.dimension} != stats dimension {s.dimension}"
        )
    return BitStats(s.counts + c.to_bits(), s.n + 1)


def bit_weights(s: BitStats) -> np.ndarray:
    """Laplace-smoothed binary entropy per bit, each in (0, 1]."""
    p = (s.counts + 1.0) / (s.n + 2.0)
    return -(p * np.log2(p) + (1.0 - p) * np.log2(1.0 - p))


class WeightTable:
    """Per-byte mismatch-weight lookup built from a weight vector.

    ``lut[j, v]`` is the summed weight of the set bits of byte value v at
    byte position j, so the weight on mismatching bits of a pair is the
    left-to-right fold of ``lut[j, xor_byte_j]``. ``total`` is the same
    fold of ``lut[j, 0xff]``, which makes a full complement score exactly
    0.0 and an identical pair exactly 1.0.
    """

    __slots__ = ("weights", "lut", "total", "n_bytes")

    def __init__(self, weights: np.ndarray):
        weights = np.asarray(weights, dtype=np.float64)
        if weights.ndim != 1 or weights.size % 8 != 0:
            raise DimensionMismatch(
                f"weights must be 1-D with a multiple-of-8 size, got {weights.shape}"
            )
        self.weights = weights
        self.n_bytes = weights.size // 8
        self.lut = weights.reshape(self.n_bytes, 8) @ _BYTE_BITS_F.T
        total = 0.0
        for j in range(self.n_bytes):
            total += float(self.lut[j, 255])
        if not total > 0.0:
            raise ValueError("weight vector must have a positive sum")
        self.total = total

    def mismatch_weight(self, xored: np.ndarray) -> float:
        acc = 0.0
        for j in range(self.n_bytes):
            acc += float(self.lut[j, xored[j]])
        return acc

    def score_block(self, query: np.ndarray, codes: np.ndarray) -> np.ndarray:
        """Score every row of a packed (N, D/8) code matrix against the query."""
        xored = np.bitwise_xor(codes.T, query[:, None])  # (D/8, N), C-contiguous
        acc = np.zeros(codes.shape[0], dtype=np.float64)
        for j in range(self.n_bytes):
            acc += self.lut[j].take(xored[j])
        return (self.total - acc) / self.total


def its_score(q: BinaryCode, d: BinaryCode, w: np.ndarray) -> float:
    """Matched-weight fraction in [0, 1]; symmetric in q and d."""
    if len(q.data) != len(d.data):
        raise DimensionMismatch("codes differ in length")
    table = w if isinstance(w, WeightTable) else WeightTable(w)
    if table.n_bytes != len(q.data):
        raise DimensionMismatch(
            f"weights cover {table.n_bytes * 8} bits, codes have {len(q.data) * 8}"
        )
    xored = np.bitwise_xor(q.to_array(), d.to_array())
    return (table.total - table.mismatch_weight(xored)) / table.total


@dataclass(frozen=True)
class RetrievalParams:
    """Query-side knobs: retrieval cap, score gate, filters, temporal view."""

    max_k: int = DEFAULT_MAX_K
    threshold: float = DEFAULT_THRESHOLD
    types: Optional[frozenset[MemoryType]] = None
    as_of: Optional[int] = None
    include_superseded: bool = False

    def __post_init__(self):
        if self.max_k < 1:
            raise ValueError(f"max_k must be >= 1, got {self.max_k}")
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold must be in [0, 1], got {self.threshold}")


@dataclass(frozen=True)
class ScoredHit:
    record: MemoryRecord
    score: float
    age_ms: int


class CandidateColumns:
    """Columnar view of a record set for vectorized filtering and scoring.

    The store maintains one per namespace, appending on write and
    refreshing rows whose lifecycle fields change; ad-hoc record lists are
    converted on the fly. Both paths feed the same search kernel.
    """

    def __init__(self, dimension: int, capacity: int = 1024):
        self.dimension = dimension
        self.n = 0
        self._codes = np.zeros((capacity, dimension // 8), dtype=np.uint8)
        self._created = np.zeros(capacity, dtype=np.int64)
        self._superseded = np.full(capacity, -1, dtype=np.int64)
        self._state = np.zeros(capacity, dtype=np.int8)
        self._type = np.zeros(capacity, dtype=np.int8)
        self._ids = np.zeros(capacity, dtype="S32")
        self.records: list[MemoryRecord] = []

    @classmethod
    def from_records(cls, records: Iterable[MemoryRecord],
                     dimension: Optional[int] = None) -> "CandidateColumns":
        records = list(records)
        if dimension is None:
            if not records:
                raise ValueError("dimension required for an empty candidate set")
            dimension = records[0].code.dimension
        cols = cls(dimension, capacity=max(len(records), 1))
        for record in records:
            cols.append(record)
        return cols

    def _grow(self):
        cap = max(2 * self._created.size, 1024)

        def enlarge(arr, shape, fill=0):
            fresh = np.full(shape, fill, dtype=arr.dtype)
            fresh[: self.n] = arr[: self.n]
            return fresh

        self._codes = enlarge(self._codes, (cap, self.dimension // 8))
        self._created = enlarge(self._created, cap)
        self._superseded = enlarge(self._superseded, cap, fill=-1)
        self._state = enlarge(self._state, cap)
        self._type = enlarge(self._type, cap)
        self._ids = enlarge(self._ids, cap, fill=b"")

    def append(self, record: MemoryRecord) -> int:
        if record.code.dimension != self.dimension:
            raise DimensionMismatch(
                f"record code dimension {record.code.dimension} != {self.dimension}"
            )
        if self.n == self._created.size:
            self._grow()
        i = self.n
        self._codes[i] = record.code.to_array()
        self._created[i] = record.created_at
        self._ids[i] = record.id.encode("ascii")
        self._type[i] = _TYPE_INDEX[record.type]
        self.records.append(record)
        self.n += 1
        self.refresh(i)
        return i

    def refresh(self, i: int):
        """Re-read the mutable lifecycle fields of row i."""
        record = self.records[i]
        self._state[i] = _STATE_INDEX[record.state]
        self._superseded[i] = (
            -1 if record.superseded_at is None else record.superseded_at
        )

    @property
    def codes(self) -> np.ndarray:
        return self._codes[: self.n]

    @property
    def created(self) -> np.ndarray:
        return self._created[: self.n]

    @property
    def superseded(self) -> np.ndarray:
        return self._superseded[: self.n]

    @property
    def state(self) -> np.ndarray:
        return self._state[: self.n]

    @property
    def type_index(self) -> np.ndarray:
        return self._type[: self.n]

    @property
    def ids(self) -> np.ndarray:
        return self._ids[: self.n]


def _score_partitioned(table: WeightTable, query: np.ndarray, codes: np.ndarray,
                       workers: int) -> np.ndarray:
    bounds = np.linspace(0, codes.shape[0], workers + 1, dtype=np.int64)
    chunks = [(int(bounds[i]), int(bounds[i + 1])) for i in range(workers)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(
            pool.map(lambda se: table.score_block(query, codes[se[0]:se[1]]), chunks)
        )
    return np.concatenate(parts)


def search(
    query: BinaryCode,
    candidates: "Iterable[MemoryRecord] | CandidateColumns",
    params: RetrievalParams,
    stats: BitStats,
    now: int,
    workers: Optional[int] = None,
) -> list[ScoredHit]:
    """Deterministic threshold-gated exhaustive search.

    Every candidate surviving the type and temporal filters is scored (no
    index, no approximation), gated at ``params.threshold``, sorted by
    (score desc, created_at desc, id asc) and truncated to ``max_k``.
    The result is identical for any candidate iteration order and any
    worker count.
    """
    if isinstance(candidates, CandidateColumns):
        cols = candidates
    else:
        records = list(candidates)
        if not records:
            return []
        cols = CandidateColumns.from_records(records)
    if cols.n == 0:
        return []
    if cols.dimension != query.dimension:
        raise DimensionMismatch(
            f"query dimension {query.dimension} != candidate dimension {cols.dimension}"
        )
    if stats.dimension != query.dimension:
        raise DimensionMismatch(
            f"stats dimension {stats.dimension} != query dimension {query.dimension}"
        )

    mask = np.ones(cols.n, dtype=bool)
    if params.types is not None:
        wanted = np.fromiter(
            sorted(_TYPE_INDEX[t] for t in params.types), dtype=np.int8,
            count=len(params.types),
        )
        mask &= np.isin(cols.type_index, wanted)
    if params.as_of is not None:
        mask &= (
            (cols.created <= params.as_of)
            & ((cols.superseded == -1) | (cols.superseded > params.as_of))
            & (cols.state != _RETIRED)
        )
    elif params.include_superseded:
        mask &= cols.state != _RETIRED
    else:
        mask &= cols.state == _ACTIVE

    idx = np.nonzero(mask)[0]
    if idx.size == 0:
        return []

    # score only the filter survivors; per-row values are independent of
    # batching, so the subset scores equal a full-corpus scan's
    table = WeightTable(bit_weights(stats))
    q = query.to_array()
    sub = cols.codes if idx.size == cols.n else cols.codes[idx]
    if workers and workers > 1:
        scores = _score_partitioned(table, q, sub, workers)
    else:
        scores = table.score_block(q, sub)

    keep = scores >= params.threshold
    kidx = idx[keep]
    if kidx.size == 0:
        return []
    kscores = scores[keep]
    order = np.lexsort((cols.ids[kidx], -cols.created[kidx], -kscores))[: params.max_k]
    return [
        ScoredHit(cols.records[int(kidx[i])], float(kscores[i]),
                  now - int(cols.created[int(kidx[i])]))
        for i in order
    ]
