"""HTTP/JSON API over sessions, under /api/v1.

Sessions are persisted to the data directory after every mutation and
reloaded on startup, so a restarted server serves the same state.
"""

from __future__ import annotations

import threading
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query, Request, Response
from fastapi.staticfiles import StaticFiles

from . import frameio
from .errors import DimensionMismatchError, StalePredictionsError
from .session import Session, SessionConfig, create_session, load_session


class SessionRegistry:
    """In-memory session table with one mutation lock per session."""

    def __init__(self, data_dir: str | Path):
        self.data_dir = Path(data_dir)
        self.sessions_dir = self.data_dir / "sessions"
        self.sessions_dir.mkdir(parents=True, exist_ok=True)
        self._sessions: dict[str, Session] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._table_lock = threading.Lock()
        self._load_existing()

    def _load_existing(self) -> None:
        for manifest in sorted(self.sessions_dir.glob("*/session.json")):
            try:
                session = load_session(manifest.parent)
            except Exception:
                continue
            self._sessions[session.session_id] = session
            self._locks[session.session_id] = threading.Lock()

    def create(self, frames_dir: str, config: dict | None) -> Session:
        session = create_session(frames_dir, SessionConfig.from_json(config))
        with self._table_lock:
            self._sessions[session.session_id] = session
            self._locks[session.session_id] = threading.Lock()
        self.save(session)
        return session

    def all(self) -> list[Session]:
        return list(self._sessions.values())

    def get(self, session_id: str) -> Session:
        session = self._sessions.get(session_id)
        if session is None:
            raise HTTPException(404, f"no session {session_id!r}")
        return session

    def lock(self, session_id: str) -> threading.Lock:
        lock = self._locks.get(session_id)
        if lock is None:
            raise HTTPException(404, f"no session {session_id!r}")
        return lock

    def save(self, session: Session) -> None:
        session.persist(self.sessions_dir / session.session_id)


def _http_error(exc: Exception) -> HTTPException:
    if isinstance(exc, StalePredictionsError):
        return HTTPException(409, str(exc))
    if isinstance(exc, (DimensionMismatchError, ValueError)):
        return HTTPException(400, str(exc))
    if isinstance(exc, FileNotFoundError):
        return HTTPException(404, str(exc))
    return HTTPException(500, str(exc))


def create_app(data_dir: str | Path, ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="memvos", version="0.1.0")
    registry = SessionRegistry(data_dir)
    app.state.registry = registry

    api = "/api/v1"

    @app.post(api + "/sessions")
    async def create_session_endpoint(body: dict):
        frames_dir = body.get("frames_dir")
        if not frames_dir:
            raise HTTPException(400, "frames_dir is required")
        try:
            session = registry.create(frames_dir, body.get("config"))
        except (ValueError, FileNotFoundError, DimensionMismatchError) as exc:
            raise _http_error(exc)
        return {"id": session.session_id, "N": session.num_frames}

    @app.get(api + "/sessions")
    async def list_sessions():
        return {"sessions": [s.summary() for s in registry.all()]}

    @app.get(api + "/sessions/{session_id}")
    async def get_session(session_id: str):
        return registry.get(session_id).summary()

    @app.get(api + "/sessions/{session_id}/status")
    async def get_status(session_id: str):
        session = registry.get(session_id)
        return {
            "revision": session.revision,
            "predictions_fresh": session.predictions_fresh,
            "busy": registry.lock(session_id).locked(),
        }

    @app.get(api + "/sessions/{session_id}/frames/{index}")
    async def get_frame(session_id: str, index: int):
        session = registry.get(session_id)
        if not 0 <= index < session.num_frames:
            raise HTTPException(404, f"frame {index} out of range")
        return Response(
            content=frameio.frame_bytes(session.frames[index]),
            media_type="image/png",
        )

    @app.put(api + "/sessions/{session_id}/annotations/{index}", status_code=204)
    async def put_annotation(session_id: str, index: int, request: Request):
        session = registry.get(session_id)
        blob = await request.body()
        try:
            mask = frameio.mask_from_bytes(blob)
        except Exception:
            raise HTTPException(400, "body is not a decodable mask PNG")
        with registry.lock(session_id):
            try:
                session.add_annotation(index, mask)
            except (ValueError, DimensionMismatchError) as exc:
                raise _http_error(exc)
            registry.save(session)
        return Response(status_code=204)

    @app.delete(api + "/sessions/{session_id}/annotations/{index}", status_code=204)
    async def delete_annotation(session_id: str, index: int):
        session = registry.get(session_id)
        with registry.lock(session_id):
            try:
                session.delete_annotation(index)
            except ValueError as exc:
                raise _http_error(exc)
            registry.save(session)
        return Response(status_code=204)

    @app.get(api + "/sessions/{session_id}/annotations/{index}")
    async def get_annotation(session_id: str, index: int):
        session = registry.get(session_id)
        if index not in session.annotations:
            raise HTTPException(404, f"frame {index} has no annotation")
        return Response(
            content=frameio.mask_bytes(session.annotations[index]),
            media_type="image/png",
        )

    @app.post(api + "/sessions/{session_id}/propagate")
    async def propagate_endpoint(session_id: str):
        session = registry.get(session_id)
        with registry.lock(session_id):
            try:
                session.run_propagation()
            except ValueError as exc:
                raise _http_error(exc)
            registry.save(session)
        return {"revision": session.revision}

    @app.get(api + "/sessions/{session_id}/masks/{index}")
    async def get_mask(session_id: str, index: int):
        session = registry.get(session_id)
        try:
            mask = session.prediction_mask(index)
        except ValueError as exc:
            raise HTTPException(404, str(exc))
        return Response(content=frameio.mask_bytes(mask), media_type="image/png")

    @app.get(api + "/sessions/{session_id}/candidates")
    async def get_candidates(
        session_id: str,
        k: int = Query(5, ge=1),
        alpha: float | None = Query(None, ge=0.0, le=1.0),
        beta: int | None = Query(None, ge=0),
    ):
        session = registry.get(session_id)
        with registry.lock(session_id):
            try:
                result = session.suggest_candidates(k, alpha=alpha, beta=beta)
            except (ValueError, StalePredictionsError) as exc:
                raise _http_error(exc)
            registry.save(session)
        return {
            "new_candidates": result.new_candidates,
            "dissimilarity_scores": result.dissimilarity_scores,
            "chosen_history": result.chosen_history,
            "candidates": result.to_json(),
        }

    @app.get(api + "/sessions/{session_id}/metrics")
    async def get_metrics(
        session_id: str, gt: str, exclude_annotated: bool = True
    ):
        session = registry.get(session_id)
        try:
            report = session.evaluate(gt, exclude_annotated=exclude_annotated)
        except (ValueError, FileNotFoundError) as exc:
            raise _http_error(exc)
        return report.to_json()

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
