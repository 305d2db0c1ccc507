"""Text embedding: a bit-exact deterministic hash backend plus an HTTP client.

The hash backend is a feature-hashing bag-of-words embedder: tokens are
FNV-1a-hashed onto ``dimension`` buckets with a hash-derived sign, then the
accumulated vector is L2-normalized. It needs no network, no model files,
and produces byte-identical vectors across runs and platforms.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DimensionMismatch, EmptyContent, ExternalUnavailable

DEFAULT_DIMENSION = 256

FNV64_OFFSET = 14695981039346656037
FNV64_PRIME = 1099511628211
_MASK64 = (1 << 64) - 1

# tokens = maximal runs of alphanumerics after lowercasing ("_" splits too)
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

EMBED_TOKEN_ENV = "MEMGRAIN_EMBED_TOKEN"


def fnv1a_64(data: bytes) -> int:
    """64-bit FNV-1a over raw bytes."""
    h = FNV64_OFFSET
    for b in data:
        h ^= b
        h = (h * FNV64_PRIME) & _MASK64
    return h


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


@dataclass(frozen=True)
class Embedding:
    """A unit-norm real vector of fixed dimension."""

    values: np.ndarray

    def __post_init__(self):
        norm = float(np.sqrt(np.dot(self.values, self.values)))
        if abs(norm - 1.0) > 1e-9:
            raise DimensionMismatch(
                f"embedding is not unit-norm (|v|={norm!r})",
                detail={"norm": norm},
            )

    @property
    def dimension(self) -> int:
        return int(self.values.shape[0])


@dataclass(frozen=True)
class EmbedderConfig:
    dimension: int = DEFAULT_DIMENSION
    backend: str = "hash"  # "hash" | "external"
    external_endpoint: Optional[str] = None

    def __post_init__(self):
        if self.dimension <= 0 or self.dimension % 8 != 0:
            raise DimensionMismatch(
                f"dimension must be a positive multiple of 8, got {self.dimension}"
            )
        if self.backend not in ("hash", "external"):
            raise ValueError(f"unknown embedder backend {self.backend!r}")
        if self.backend == "external" and not self.external_endpoint:
            raise ValueError("external backend requires external_endpoint")


class HashEmbedder:
    """Deterministic feature-hashing embedder.

    Pipeline: lowercase -> split on non-alphanumerics -> per token take
    h = FNV-1a-64(utf-8 bytes), bucket = h mod D, sign = +1 if bit 63 of h
    is clear else -1 -> accumulate -> L2-normalize.
    """

    def __init__(self, dimension: int = DEFAULT_DIMENSION):
        if dimension <= 0 or dimension % 8 != 0:
            raise DimensionMismatch(
                f"dimension must be a positive multiple of 8, got {dimension}"
            )
        self.dimension = dimension

    def embed(self, text: str) -> Embedding:
        values = np.zeros(self.dimension, dtype=np.float64)
        tokens = tokenize(text)
        if not tokens:
            raise EmptyContent("text has no alphanumeric tokens")
        for token in tokens:
            h = fnv1a_64(token.encode("utf-8"))
            index = h % self.dimension
            values[index] += 1.0 if (h >> 63) == 0 else -1.0
        norm = float(np.sqrt(np.dot(values, values)))
        if norm == 0.0:
            # opposite-sign tokens cancelled in every bucket
            raise EmptyContent("tokens cancel to a zero vector")
        return Embedding(values / norm)

    def embed_batch(self, texts: Sequence[str]) -> list[Embedding]:
        out = []
        for i, text in enumerate(texts):
            try:
                out.append(self.embed(text))
            except EmptyContent as exc:
                exc.detail["index"] = i
                raise
        return out


class ExternalEmbedder:
    """Client for an HTTP embedding service.

    One POST per batch: ``{endpoint}/embed`` with ``{"texts": [...]}``,
    expecting ``{"embeddings": [[...], ...]}``. Bearer auth is read from
    the MEMGRAIN_EMBED_TOKEN environment variable. Responses are validated
    against the configured dimension, then L2-normalized.
    """

    def __init__(self, endpoint: str, dimension: int = DEFAULT_DIMENSION,
                 timeout: float = 30.0):
        self.endpoint = endpoint.rstrip("/")
        self.dimension = dimension
        self.timeout = timeout

    def _headers(self) -> dict:
        headers = {"content-type": "application/json"}
        token = os.environ.get(EMBED_TOKEN_ENV)
        if token:
            headers["authorization"] = f"Bearer {token}"
        return headers

    def embed(self, text: str) -> Embedding:
        return self.embed_batch([text])[0]

    def embed_batch(self, texts: Sequence[str]) -> list[Embedding]:
        import httpx

        for i, text in enumerate(texts):
            if not tokenize(text):
                raise EmptyContent(
                    "text has no alphanumeric tokens", detail={"index": i}
                )
        if not texts:
            return []
        try:
            response = httpx.post(
                f"{self.endpoint}/embed",
                json={"texts": list(texts)},
                headers=self._headers(),
                timeout=self.timeout,
            )
            response.raise_for_status()
            payload = response.json()
        except httpx.HTTPError as exc:
            raise ExternalUnavailable(f"embedding service failed: {exc}") from exc
        vectors = payload.get("embeddings")
        if not isinstance(vectors, list) or len(vectors) != len(texts):
            raise ExternalUnavailable("embedding service returned a malformed payload")
        out = []
        for i, vec in enumerate(vectors):
            arr = np.asarray(vec, dtype=np.float64)
            if arr.shape != (self.dimension,):
                raise DimensionMismatch(
                    f"expected dimension {self.dimension}, got {arr.shape}",
                    detail={"index": i},
                )
            norm = float(np.sqrt(np.dot(arr, arr)))
            if norm == 0.0:
                raise ExternalUnavailable("embedding service returned a zero vector")
            out.append(Embedding(arr / norm))
        return out


def make_embedder(config: EmbedderConfig):
    if config.backend == "hash":
        return HashEmbedder(config.dimension)
    return ExternalEmbedder(config.external_endpoint, config.dimension)
