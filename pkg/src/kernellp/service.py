"""HTTP API for interactive scribble segmentation.

Sessions live in process memory; scribble updates and segmentation are
serialized per session behind a lock, mask reads are safe concurrently.

    POST   /sessions                    multipart image upload -> {session_id}
    POST   /sessions/{id}/scribbles     {"strokes": [{points, label, radius?}]}
    DELETE /sessions/{id}/scribbles     clear all strokes
    POST   /sessions/{id}/segment       optional {"params": {...}} -> stats
    GET    /sessions/{id}/mask          single-channel PNG, 255 = foreground
    GET    /sessions/{id}               session metadata
"""

import io
import json
import threading
import uuid

import numpy as np
from fastapi import FastAPI, Request, UploadFile
from fastapi.responses import JSONResponse, Response
from PIL import Image, UnidentifiedImageError

from .errors import InputError, MissingClassError, SolverError
from .segmentation import SegmentationSession, Stroke, featurize, params_from_json


class SessionStore:
    def __init__(self):
        self._sessions = {}
        self._locks = {}
        self._registry_lock = threading.Lock()

    def create(self, image):
        session = SegmentationSession(
            session_id=uuid.uuid4().hex,
            image=image,
            features=featurize(image),
        )
        with self._registry_lock:
            self._sessions[session.session_id] = session
            self._locks[session.session_id] = threading.Lock()
        return session

    def get(self, session_id):
        with self._registry_lock:
            session = self._sessions.get(session_id)
            lock = self._locks.get(session_id)
        return session, lock


def _error(status, detail):
    return JSONResponse(status_code=status, content={"detail": detail})


def create_app():
    app = FastAPI(title="kernellp segmentation service")
    store = SessionStore()
    app.state.store = store

    @app.exception_handler(MissingClassError)
    async def _missing_class(request, exc):
        return _error(409, str(exc))

    @app.exception_handler(InputError)
    async def _input_error(request, exc):
        return _error(400, str(exc))

    @app.exception_handler(SolverError)
    async def _solver_error(request, exc):
        return _error(500, f"solver failure: {exc}")

    @app.post("/sessions")
    async def create_session(image: UploadFile):
        raw = await image.read()
        try:
            decoded = Image.open(io.BytesIO(raw))
            decoded.load()
        except (UnidentifiedImageError, OSError):
            return _error(400, "could not decode image; PNG or JPEG required")
        if decoded.format not in ("PNG", "JPEG"):
            return _error(400, f"unsupported image format {decoded.format}; PNG or JPEG required")
        session = store.create(np.asarray(decoded.convert("RGB")))
        return {"session_id": session.session_id, "width": session.width, "height": session.height}

    @app.post("/sessions/{session_id}/scribbles")
    async def add_scribbles(session_id: str, request: Request):
        session, lock = store.get(session_id)
        if session is None:
            return _error(404, "unknown session")
        body = await request.json()
        strokes_json = body.get("strokes") if isinstance(body, dict) else None
        if not isinstance(strokes_json, list) or not strokes_json:
            return _error(400, "body must carry a non-empty 'strokes' array")
        strokes = []
        for item in strokes_json:
            if not isinstance(item, dict) or "points" not in item or "label" not in item:
                return _error(400, "each stroke needs 'points' and 'label'")
            pts = item["points"]
            if not isinstance(pts, list) or not all(
                isinstance(p, (list, tuple)) and len(p) == 2 for p in pts
            ):
                return _error(400, "stroke points must be [x, y] pairs")
            strokes.append(
                Stroke(
                    points=[(float(x), float(y)) for x, y in pts],
                    label=item["label"],
                    radius=int(item.get("radius", 1)),
                )
            )
        with lock:
            version = session.add_strokes(strokes)
            count = len(session.strokes)
        return {"version": version, "stroke_count": count}

    @app.delete("/sessions/{session_id}/scribbles")
    async def clear_scribbles(session_id: str):
        session, lock = store.get(session_id)
        if session is None:
            return _error(404, "unknown session")
        with lock:
            version = session.clear_strokes()
        return {"version": version, "stroke_count": 0}

    @app.post("/sessions/{session_id}/segment")
    async def run_segment(session_id: str, request: Request):
        session, lock = store.get(session_id)
        if session is None:
            return _error(404, "unknown session")
        body = b""
        try:
            body = await request.body()
        except Exception:
            pass
        overrides = None
        if body:
            try:
                payload = json.loads(body)
            except ValueError:
                return _error(400, "segment body must be JSON")
            overrides = payload.get("params") if isinstance(payload, dict) else None
        with lock:
            params = params_from_json(overrides, session.params)
            _, stats = session.segment(params)
            version = session.version
        return {"version": version, "stats": stats.to_json()}

    @app.get("/sessions/{session_id}/mask")
    async def get_mask(session_id: str):
        session, _ = store.get(session_id)
        if session is None:
            return _error(404, "unknown session")
        if session.mask is None:
            return _error(404, "no mask computed yet; POST /segment first")
        png = io.BytesIO()
        Image.fromarray((session.mask * 255).astype(np.uint8), mode="L").save(png, format="PNG")
        return Response(content=png.getvalue(), media_type="image/png")

    @app.get("/sessions/{session_id}")
    async def get_session(session_id: str):
        session, _ = store.get(session_id)
        if session is None:
            return _error(404, "unknown session")
        fg = sum(1 for s in session.strokes if s.label == "fg")
        return {
            "session_id": session.session_id,
            "width": session.width,
            "height": session.height,
            "version": session.version,
            "stroke_count": len(session.strokes),
            "fg_strokes": fg,
            "bg_strokes": len(session.strokes) - fg,
            "has_mask": session.mask is not None,
            "stats": session.last_stats.to_json() if session.last_stats else None,
        }

    return app


app = create_app()
