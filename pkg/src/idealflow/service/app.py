"""FastAPI application for interactive what-if analysis over HTTP.

Endpoints live under /api/v1. Sessions are held in memory; per-session edits are
serialized by the session lock, and every numeric field is emitted with 12
significant digits so identical edit scripts yield byte-identical snapshots.
"""

from __future__ import annotations

import logging
import uuid
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .. import __version__
from ..errors import (
    EditConflict,
    EditRejected,
    IdealFlowError,
    NotStronglyConnected,
    ParseError,
    SchemaError,
)
from ..graph import DirectedNetwork
from ..io_formats import MetadataMismatch, load_document, parse_tntp_net
from ..sessions import EditOp, Session
from .schemas import (
    CreateSessionRequest,
    EditRequest,
    FlowResponse,
    HealthResponse,
    SessionCreatedResponse,
    SnapshotModel,
)

log = logging.getLogger("idealflow.service")


class SessionStore:
    def __init__(self, journal_dir: Optional[Path] = None):
        self._sessions: dict[str, Session] = {}
        self.journal_dir = journal_dir

    def create(self, net: DirectedNetwork, augment: bool, reference_arc) -> Session:
        sid = uuid.uuid4().hex
        journal_path = None
        if self.journal_dir is not None:
            self.journal_dir.mkdir(parents=True, exist_ok=True)
            journal_path = self.journal_dir / f"{sid}.jsonl"
        session = Session(
            net,
            augment=augment,
            reference_arc=reference_arc,
            journal_path=journal_path,
            session_id=sid,
        )
        self._sessions[session.id] = session
        return session

    def get(self, session_id: str) -> Optional[Session]:
        return self._sessions.get(session_id)


def _error(status: int, code: str, message: str, detail: str | None = None) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"code": code, "message": message, "detail": detail},
    )


def create_app(
    journal_dir: Optional[Path] = None,
    cors_origins: Optional[list[str]] = None,
    static_dir: Optional[Path] = None,
) -> FastAPI:
    app = FastAPI(title="idealflow what-if service", version=__version__)
    store = SessionStore(journal_dir=journal_dir)
    app.state.store = store

    if cors_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=cors_origins,
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(request: Request, exc: RequestValidationError):
        return _error(400, "bad_request", "request body failed validation", str(exc.errors()))

    @app.exception_handler(IdealFlowError)
    async def on_domain_error(request: Request, exc: IdealFlowError):
        if isinstance(exc, (EditRejected, NotStronglyConnected)):
            return _error(422, "not_strongly_connected", str(exc))
        if isinstance(exc, EditConflict):
            return _error(409, "edit_conflict", str(exc))
        if isinstance(exc, (ParseError, SchemaError, MetadataMismatch)):
            return _error(400, "parse_error", str(exc))
        log.exception("unhandled domain error")
        return _error(500, "internal_error", str(exc))

    @app.middleware("http")
    async def request_log(request: Request, call_next):
        response = await call_next(request)
        log.info("%s %s -> %s", request.method, request.url.path, response.status_code)
        return response

    @app.get("/health", response_model=HealthResponse)
    @app.get("/api/v1/health", response_model=HealthResponse)
    async def health():
        return HealthResponse(status="ok", version=__version__)

    @app.post(
        "/api/v1/sessions", response_model=SessionCreatedResponse, status_code=201
    )
    async def create_session(
        body: CreateSessionRequest, augment: bool = Query(default=False)
    ):
        if (body.network is None) == (body.tntp is None):
            return _error(400, "bad_request", "provide exactly one of network or tntp")
        if body.network is not None:
            doc = load_document(body.network.model_dump_json(exclude_none=True))
            net = doc.to_network()
        else:
            net, _ = parse_tntp_net(body.tntp)
        reference = tuple(body.referenceArc) if body.referenceArc else None
        session = store.create(net, augment=augment, reference_arc=reference)
        return SessionCreatedResponse(
            sessionId=session.id,
            snapshot=SnapshotModel(**session.snapshot.to_payload()),
        )

    @app.post("/api/v1/sessions/{session_id}/edits", response_model=SnapshotModel)
    async def apply_edit(session_id: str, body: EditRequest):
        session = store.get(session_id)
        if session is None:
            return _error(404, "not_found", f"unknown session {session_id}")
        snapshot = session.apply_edit(
            EditOp(op=body.op, tail=body.tail, head=body.head, capacity=body.capacity)
        )
        return SnapshotModel(**snapshot.to_payload())

    @app.post("/api/v1/sessions/{session_id}/undo", response_model=SnapshotModel)
    async def undo(session_id: str):
        session = store.get(session_id)
        if session is None:
            return _error(404, "not_found", f"unknown session {session_id}")
        snapshot = session.undo()
        return SnapshotModel(**snapshot.to_payload())

    @app.get("/api/v1/sessions/{session_id}/flow", response_model=FlowResponse)
    async def flow(
        session_id: str,
        normalize: str = Query(default="min", pattern="^(min|total)$"),
        method: str = Query(default="markov", pattern="^(markov|nullspace)$"),
    ):
        session = store.get(session_id)
        if session is None:
            return _error(404, "not_found", f"unknown session {session_id}")
        matrix = session.flow_view(normalize=normalize, method=method)
        return FlowResponse(
            flow=matrix, snapshot=SnapshotModel(**session.snapshot.to_payload())
        )

    if static_dir is not None and static_dir.is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="static")

    return app
