"""HTTP session service for interactive fair-division solves.

Thin JSON layer over SessionStore; all state changes go through the per-session
event log before they are acknowledged.  The built web client, when present,
is served statically from the package's `static/` directory or a directory
given in the config.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.responses import FileResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .session import (
    AnswerConflict,
    Config,
    InvalidAnswer,
    NotCompleted,
    SessionError,
    SessionStore,
    UnknownQuery,
    UnknownSession,
)


class CreateSessionBody(BaseModel):
    kind: str
    players: int = Field(ge=2)
    tolerance: float | None = Field(default=None, gt=0)
    total_rent: float = 1.0
    participants: list[str] | None = None


class AnswerBody(BaseModel):
    query_id: str
    labels: list[int]


def _static_dir() -> Path | None:
    candidate = Path(__file__).parent / "static"
    return candidate if (candidate / "index.html").exists() else None


def create_app(config: Config | None = None, static_dir: Path | None = None) -> FastAPI:
    config = config or Config.from_env()
    store = SessionStore(config)
    app = FastAPI(title="kkmw session service", version="1")
    app.state.store = store
    app.state.config = config

    def get_session(session_id: str):
        try:
            return store.get(session_id)
        except UnknownSession as exc:
            raise HTTPException(status_code=404, detail=str(exc))

    @app.post("/api/v1/sessions", status_code=201)
    def create_session(body: CreateSessionBody):
        try:
            session = store.create(
                kind=body.kind,
                n=body.players,
                tolerance=body.tolerance,
                total_rent=body.total_rent,
                participants=body.participants,
            )
        except SessionError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return {"schema": "session.v1", "id": session.id, **session.snapshot()}

    @app.get("/api/v1/sessions/{session_id}")
    def session_status(session_id: str):
        session = get_session(session_id)
        return {"schema": "session.v1", **session.snapshot()}

    @app.get("/api/v1/sessions/{session_id}/queries")
    def session_queries(session_id: str):
        session = get_session(session_id)
        return {"schema": "pending_queries.v1", "queries": session.pending_view()}

    @app.post("/api/v1/sessions/{session_id}/answers")
    def session_answer(session_id: str, body: AnswerBody):
        session = get_session(session_id)
        try:
            ack = session.answer(body.query_id, body.labels)
        except UnknownQuery as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        except AnswerConflict as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except InvalidAnswer as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return {"schema": "answer_ack.v1", **ack, "status": session.status}

    @app.get("/api/v1/sessions/{session_id}/result")
    def session_result(session_id: str):
        session = get_session(session_id)
        try:
            result = session.result_or_raise()
        except NotCompleted as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except SessionError as exc:
            raise HTTPException(status_code=500, detail=str(exc))
        return {"schema": "session_result.v1", **result}

    ui_dir = static_dir or _static_dir()
    if ui_dir is not None:
        if (ui_dir / "assets").is_dir():
            app.mount("/assets", StaticFiles(directory=ui_dir / "assets"), name="assets")

        @app.get("/")
        def index():
            return FileResponse(ui_dir / "index.html")

    return app


def run(config: Config | None = None) -> None:
    import uvicorn

    config = config or Config.from_env()
    uvicorn.run(create_app(config), host="127.0.0.1", port=config.port,
                log_level=config.log_level)
