"""HTTP+JSON API over the orchestrator: chat, session fetch, route probe, health."""

from __future__ import annotations

from fastapi import FastAPI
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pathlib import Path
from pydantic import BaseModel
from typing import Optional

from .config import MODES, AppConfig
from .errors import CbaError
from .orchestrator import Orchestrator


class ChatBody(BaseModel):
    query: str = ""
    session_id: Optional[str] = None
    mode: Optional[str] = None


class DecideBody(BaseModel):
    query: str = ""


def _error(status: int, code: str, message: str, **extra) -> JSONResponse:
    return JSONResponse(
        status_code=status, content={"error": {"code": code, "message": message}, **extra}
    )


def create_app(orchestrator: Orchestrator, static_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="cba", docs_url=None, redoc_url=None)

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.post("/v1/chat")
    def chat(body: ChatBody):
        if not body.query.strip():
            return _error(400, "EMPTY_QUERY", "query must be non-empty")
        if body.mode is not None and body.mode not in MODES:
            return _error(
                400, "UNKNOWN_MODE", f"mode must be one of {', '.join(MODES)}"
            )
        session = orchestrator.sessions.get_or_create(body.session_id)
        try:
            result = orchestrator.handle_query(session, body.query, mode=body.mode)
        except CbaError as e:
            return _error(500, "INTERNAL_ERROR", str(e))
        payload = {
            "session_id": result.session_id,
            "answer": result.answer,
            "trace": result.trace.to_dict(),
        }
        if result.error:
            return JSONResponse(
                status_code=502,
                content={
                    "error": {"code": result.error, "message": result.answer},
                    **payload,
                },
            )
        return payload

    @app.get("/v1/sessions/{session_id}")
    def get_session(session_id: str):
        session = orchestrator.sessions.get(session_id)
        if session is None:
            return _error(404, "UNKNOWN_SESSION", f"no session {session_id!r}")
        payload = session.to_dict()
        payload["traces"] = orchestrator.sessions.traces(session_id)
        return payload

    @app.post("/v1/router/decide")
    def decide(body: DecideBody):
        if not body.query.strip():
            return _error(400, "EMPTY_QUERY", "query must be non-empty")
        decision = orchestrator.decide_route(body.query, history="")
        return decision.to_dict()

    if static_dir and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app


def serve(config: AppConfig, static_dir: Optional[str] = None) -> None:
    """Run the service until interrupted; in-flight requests drain on shutdown."""
    import uvicorn

    orchestrator = Orchestrator(config)
    app = create_app(orchestrator, static_dir=static_dir)
    uvicorn.run(app, host=config.service.host, port=config.service.port, log_level="info")
