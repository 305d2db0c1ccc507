"""HTTP front door: the remember/recall/answer trio plus conflict,
temporal, session, summary, and health routes.

Responses are canonical sorted-key JSON so stored fixtures can compare
bodies byte for byte. Domain errors map to one (status, code) pair each;
malformed requests are 400, validation failures inside the domain are 422.
"""

from __future__ import annotations

import os
from pathlib import Path
from typing import Any, Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, Response
from fastapi.staticfiles import StaticFiles
from starlette.exceptions import HTTPException as StarletteHTTPException

from . import daily
from .canon import canonical_bytes
from .engine import RetrievalParams, ScoredHit
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
from .llm import LlmClient, make_llm
from .model import memory_type_from_string
from .store import MemoryStore

DEFAULT_PORT = 7749
TOKEN_ENV = "MEMGRAIN_TOKEN"
PORT_ENV = "MEMGRAIN_PORT"
DATA_DIR_ENV = "MEMGRAIN_DATA_DIR"
LLM_ENDPOINT_ENV = "MEMGRAIN_LLM_ENDPOINT"

# every domain error maps to exactly one (status, code); tests pin this table
ERROR_STATUS: dict[type, int] = {
    EmptyContent: 422,
    UnknownType: 422,
    InvalidRange: 422,
    FutureDate: 422,
    DimensionMismatch: 422,
    ClockOutOfRange: 422,
    NotFound: 404,
    IllegalTransition: 409,
    AlreadyResolved: 409,
    StorageFailure: 500,
    CorruptLog: 500,
    ExternalUnavailable: 503,
    LlmUnavailable: 503,
}


class CanonicalJSONResponse(JSONResponse):
    media_type = "application/json"

    def render(self, content: Any) -> bytes:
        return canonical_bytes(content)


class BadRequest(Exception):
    def __init__(self, message: str):
        self.message = message


def _require(body: dict, key: str, kind: type, *, what: str = "") -> Any:
    value = body.get(key)
    if not isinstance(value, kind) or (kind is str and not value):
        raise BadRequest(f"field {key!r} must be a non-empty {what or kind.__name__}")
    return value


def _optional(body: dict, key: str, kind: type) -> Any:
    value = body.get(key)
    if value is not None and not isinstance(value, kind):
        raise BadRequest(f"field {key!r} must be a {kind.__name__}")
    return value


def _optional_int(body: dict, key: str) -> Optional[int]:
    value = body.get(key)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, int):
        raise BadRequest(f"field {key!r} must be an integer")
    return value


def _retrieval_params(body: dict) -> RetrievalParams:
    max_k = _optional_int(body, "max_k")
    threshold = body.get("threshold")
    if threshold is not None and not isinstance(threshold, (int, float)):
        raise BadRequest("field 'threshold' must be a number")
    types = _optional(body, "types", list)
    include = _optional(body, "include_superseded", bool)
    try:
        return RetrievalParams(
            max_k=max_k if max_k is not None else 100,
            threshold=float(threshold) if threshold is not None else 0.05,
            types=(frozenset(memory_type_from_string(t) for t in types)
                   if types else None),
            as_of=_optional_int(body, "as_of"),
            include_superseded=bool(include),
        )
    except ValueError as exc:
        raise BadRequest(str(exc)) from exc


def _hit_dict(hit: ScoredHit) -> dict:
    return {
        "record": hit.record.to_dict(),
        "score": hit.score,
        "age_ms": hit.age_ms,
    }


def create_app(
    store: Optional[MemoryStore] = None,
    llm: Optional[LlmClient] = None,
    *,
    data_dir: Optional[str] = None,
    token: Optional[str] = None,
    ui_dir: Optional[str] = None,
) -> FastAPI:
    if store is None:
        store = MemoryStore(
            data_dir or os.environ.get(DATA_DIR_ENV, "memgrain-data")
        )
    if llm is None:
        llm = make_llm(os.environ.get(LLM_ENDPOINT_ENV))
    if token is None:
        token = os.environ.get(TOKEN_ENV) or None

    app = FastAPI(
        default_response_class=CanonicalJSONResponse,
        docs_url=None,
        redoc_url=None,
        openapi_url=None,
    )
    app.state.store = store
    app.state.llm = llm

    @app.exception_handler(MemgrainError)
    def _domain_error(request: Request, exc: MemgrainError):
        status = ERROR_STATUS.get(type(exc), 500)
        return CanonicalJSONResponse(
            {"code": exc.code, "message": exc.message, "detail": exc.detail},
            status_code=status,
        )

    @app.exception_handler(BadRequest)
    def _bad_request(request: Request, exc: BadRequest):
        return CanonicalJSONResponse(
            {"code": "malformed", "message": exc.message, "detail": {}},
            status_code=400,
        )

    @app.exception_handler(RequestValidationError)
    def _malformed(request: Request, exc: RequestValidationError):
        return CanonicalJSONResponse(
            {"code": "malformed", "message": "malformed request", "detail": {}},
            status_code=400,
        )

    @app.exception_handler(ValueError)
    def _value_error(request: Request, exc: ValueError):
        return CanonicalJSONResponse(
            {"code": "malformed", "message": str(exc), "detail": {}},
            status_code=400,
        )

    # unknown routes and bad methods get the same error body shape as
    # domain failures, so clients only ever parse one envelope
    @app.exception_handler(StarletteHTTPException)
    def _http_error(request: Request, exc: StarletteHTTPException):
        codes = {404: "not_found", 405: "method_not_allowed"}
        return CanonicalJSONResponse(
            {"code": codes.get(exc.status_code, "error"),
             "message": str(exc.detail), "detail": {}},
            status_code=exc.status_code,
            headers=getattr(exc, "headers", None),
        )

    @app.middleware("http")
    async def _auth(request: Request, call_next):
        if token and request.url.path.startswith("/v1/"):
            supplied = request.headers.get("authorization", "")
            if supplied != f"Bearer {token}":
                return CanonicalJSONResponse(
                    {"code": "unauthorized", "message": "bad or missing token",
                     "detail": {}},
                    status_code=401,
                )
        return await call_next(request)

    @app.post("/v1/remember", status_code=201)
    def remember(body: dict):
        namespace = _require(body, "namespace", str)
        content = _require(body, "content", str)
        tags = _optional(body, "tags", list) or ()
        if not all(isinstance(t, str) for t in tags):
            raise BadRequest("field 'tags' must be a list of strings")
        outcome = store.remember(
            namespace,
            content,
            type=_optional(body, "type", str),
            tags=tags,
            session_id=_optional(body, "session_id", str),
            at=_optional_int(body, "at"),
        )
        return {
            "id": outcome.record.id,
            "state": outcome.record.state.value,
            "records": [r.to_dict() for r in outcome.records],
            "conflicts": [c.to_dict() for c in outcome.opened_conflicts],
        }

    @app.post("/v1/recall")
    def recall(body: dict):
        namespace = _require(body, "namespace", str)
        query = _require(body, "query", str)
        hits = store.recall(namespace, query, _retrieval_params(body))
        return {"hits": [_hit_dict(h) for h in hits]}

    @app.post("/v1/answer")
    def answer(body: dict):
        namespace = _require(body, "namespace", str)
        question = _require(body, "question", str)
        hits = store.recall(namespace, question, _retrieval_params(body))
        text, citations = llm.answer(question, hits)
        return {
            "answer": text,
            "citations": citations,
            "retrieved": [_hit_dict(h) for h in hits],
        }

    # declared before /v1/memories/{record_id} so "asof" never parses as an id
    @app.get("/v1/memories/asof")
    def memories_asof(namespace: str, t: int):
        return {"records": [r.to_dict() for r in store.as_of(namespace, t)]}

    @app.get("/v1/memories")
    def memories_changed(namespace: str, changed_since: int,
                         until: Optional[int] = None):
        records = store.changed_since(namespace, changed_since, until)
        return {"records": [r.to_dict() for r in records]}

    @app.get("/v1/memories/{record_id}")
    def memory(record_id: str):
        return store.get(record_id).to_dict()

    @app.get("/v1/conflicts")
    def conflicts(namespace: Optional[str] = None, state: str = "all"):
        found = store.list_conflicts(namespace, state)
        return {"conflicts": [c.to_dict() for c in found]}

    @app.post("/v1/conflicts/{conflict_id}/resolve")
    def resolve(conflict_id: str, body: dict):
        action = _require(body, "action", str)
        conflict = store.resolve_conflict(
            _optional(body, "namespace", str),
            conflict_id,
            action,
            actor=_optional(body, "actor", str),
            target=_optional(body, "target", str),
        )
        return {"conflict": conflict.to_dict()}

    @app.get("/v1/sessions")
    def sessions(namespace: Optional[str] = None):
        return {"sessions": [s.to_dict() for s in store.sessions(namespace)]}

    @app.get("/v1/daily-summary")
    def daily_summary(namespace: str, date: str):
        try:
            summary = daily.generate(store, namespace, date)
        except ValueError as exc:
            raise BadRequest(f"bad date {date!r}: expected YYYY-MM-DD") from exc
        return summary.to_dict()

    @app.get("/healthz")
    def healthz():
        return {"status": "ok", **store.counters()}

    ui_path = Path(ui_dir) if ui_dir else Path(__file__).parent / "ui"
    if ui_path.is_dir():
        app.mount("/ui", StaticFiles(directory=ui_path, html=True), name="ui")

    return app


def serve(
    app: Optional[FastAPI] = None,
    *,
    host: Optional[str] = None,
    port: Optional[int] = None,
    **app_kwargs,
) -> None:
    """Run the API server; binds loopback-only unless a token is set."""
    import uvicorn

    if app is None:
        app = create_app(**app_kwargs)
    token = app_kwargs.get("token") or os.environ.get(TOKEN_ENV)
    if host is None:
        host = "0.0.0.0" if token else "127.0.0.1"
    if port is None:
        port = int(os.environ.get(PORT_ENV, DEFAULT_PORT))
    uvicorn.run(app, host=host, port=port, log_level="info")
