"""Pluggable answer backends with call-count instrumentation.

The write path never touches anything in this module; the ``calls``
counter on every client exists to prove it. The offline backend answers
extractively (top retrieved record verbatim) so the whole system works
with no network and no model, while the external backend posts the
rendered prompt to an HTTP completion service.
"""

from __future__ import annotations

import os
from datetime import datetime, timezone
from typing import Optional, Sequence

from .engine import ScoredHit
from .errors import LlmUnavailable

LLM_TOKEN_ENV = "MEMGRAIN_LLM_TOKEN"

NO_MEMORY_ANSWER = "no relevant memory"

# the one prompt this system ever sends; context lines arrive in rank order
PROMPT_TEMPLATE = (
    "Answer the question using only the memory context below. "
    "If the context is insufficient, say \"{sentinel}\".\n"
    "\n"
    "Memory context:\n"
    "{context}\n"
    "\n"
    "Question: {question}\n"
    "Answer:"
)


def iso8601(ms: int) -> str:
    """UTC millisecond timestamp -> 2026-04-15T09:30:00.000Z."""
    stamp = datetime.fromtimestamp(ms / 1000.0, tz=timezone.utc)
    return stamp.isoformat(timespec="milliseconds").replace("+00:00", "Z")


def render_context_line(hit: ScoredHit) -> str:
    record = hit.record
    return f"[{record.type.label} @ {iso8601(record.created_at)}] {record.content}"


def render_prompt(question: str, hits: Sequence[ScoredHit]) -> str:
    context = "\n".join(render_context_line(h) for h in hits)
    return PROMPT_TEMPLATE.format(
        sentinel=NO_MEMORY_ANSWER, context=context, question=question
    )


class LlmClient:
    """Base client; subclasses implement _answer. Every completion passes
    through answer(), which counts calls."""

    def __init__(self):
        self.calls = 0

    def answer(
        self, question: str, hits: Sequence[ScoredHit]
    ) -> tuple[str, list[str]]:
        """Return (answer text, cited record ids)."""
        self.calls += 1
        return self._answer(question, hits)

    def _answer(self, question, hits):
        raise NotImplementedError


class OfflineLlm(LlmClient):
    """Extractive fallback: the top hit's content is the answer, its id the
    sole citation. Never fails."""

    def _answer(self, question, hits):
        if not hits:
            return NO_MEMORY_ANSWER, []
        top = hits[0].record
        return top.content, [top.id]


class ExternalLlm(LlmClient):
    """POSTs the rendered prompt to ``{endpoint}/complete`` expecting
    ``{"completion": "..."}``; bearer auth from MEMGRAIN_LLM_TOKEN."""

    def __init__(self, endpoint: str, timeout: float = 60.0):
        super().__init__()
        self.endpoint = endpoint.rstrip("/")
        self.timeout = timeout

    def _answer(self, question, hits):
        import httpx

        headers = {"content-type": "application/json"}
        token = os.environ.get(LLM_TOKEN_ENV)
        if token:
            headers["authorization"] = f"Bearer {token}"
        try:
            response = httpx.post(
                f"{self.endpoint}/complete",
                json={"prompt": render_prompt(question, hits)},
                headers=headers,
                timeout=self.timeout,
            )
            response.raise_for_status()
            payload = response.json()
        except httpx.HTTPError as exc:
            raise LlmUnavailable(f"completion service failed: {exc}") from exc
        completion = payload.get("completion")
        if not isinstance(completion, str):
            raise LlmUnavailable("completion service returned a malformed payload")
        return completion, [h.record.id for h in hits]


def make_llm(endpoint: Optional[str] = None) -> LlmClient:
    return ExternalLlm(endpoint) if endpoint else OfflineLlm()
