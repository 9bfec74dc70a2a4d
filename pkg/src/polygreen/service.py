"""HTTP session service: precompute once, deform many.

Encoding a grid is the expensive step; a session caches the resulting
coordinate field so every subsequent cage update is a linear combination
only.  Sessions live in memory; the session table is guarded by a lock,
sessions themselves are immutable after creation.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, replace

import numpy as np
from fastapi import FastAPI, HTTPException, Response, UploadFile
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from . import deformer
from .errors import PolyGreenError, ShapeMismatchError
from .geometry import Cage, bezier_to_monomial, cage_from_json, validate_cage

GRID_RES_RANGE = (8, 512)
ORDER_RANGE = (1, 8)


class CurveModel(BaseModel):
    basis: str = "bezier"
    points: list[list[float]]


class CageModel(BaseModel):
    curves: list[CurveModel]


class CreateSessionRequest(BaseModel):
    cage: CageModel
    grid_res: int = Field(default=32)
    target_order: int = Field(default=3)


class UpdateCageRequest(BaseModel):
    curves: list[list[list[float]]]
    basis: str = "bezier"


@dataclass(frozen=True)
class Session:
    id: str
    cage: Cage
    field: deformer.CoordinateField
    grid_res: int
    target_order: int
    triangles: np.ndarray
    created_at: float
    image: bytes | None = None
    image_type: str = ""


class SessionStore:
    def __init__(self):
        self._lock = threading.Lock()
        self._sessions: dict[str, Session] = {}

    def add(self, session: Session):
        with self._lock:
            self._sessions[session.id] = session

    def get(self, sid: str) -> Session | None:
        with self._lock:
            return self._sessions.get(sid)

    def replace(self, session: Session):
        with self._lock:
            self._sessions[session.id] = session

    def remove(self, sid: str) -> bool:
        with self._lock:
            return self._sessions.pop(sid, None) is not None


def _grid_and_triangles(cage: Cage, res: int):
    """Interior lattice points plus their cell triangulation."""
    lo, hi = cage.bounding_box()
    xs = np.linspace(lo[0], hi[0], res)
    ys = np.linspace(lo[1], hi[1], res)
    gx, gy = np.meshgrid(xs, ys)
    pts = np.stack([gx.ravel(), gy.ravel()], axis=1)
    keep, _ = deformer.filter_interior(cage, pts)
    index = -np.ones(pts.shape[0], dtype=int)
    index[keep] = np.arange(len(keep))
    tris = []
    for row in range(res - 1):
        for col in range(res - 1):
            a = index[row * res + col]
            b = index[row * res + col + 1]
            c = index[(row + 1) * res + col]
            d = index[(row + 1) * res + col + 1]
            if a >= 0 and b >= 0 and d >= 0:
                tris.append((int(a), int(b), int(d)))
            if a >= 0 and d >= 0 and c >= 0:
                tris.append((int(a), int(d), int(c)))
    return pts[keep], np.array(tris, dtype=int).reshape(-1, 3)


def create_app(store: SessionStore | None = None) -> FastAPI:
    app = FastAPI(title="polygreen session service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    store = store or SessionStore()
    app.state.store = store

    @app.post("/sessions", status_code=201)
    def create_session(req: CreateSessionRequest):
        if not GRID_RES_RANGE[0] <= req.grid_res <= GRID_RES_RANGE[1]:
            raise HTTPException(422, f"grid_res must be in {GRID_RES_RANGE}")
        if not ORDER_RANGE[0] <= req.target_order <= ORDER_RANGE[1]:
            raise HTTPException(422, f"target_order must be in {ORDER_RANGE}")
        try:
            cage = cage_from_json(req.cage.model_dump(), snap_tol=1e-6)
        except PolyGreenError as exc:
            raise HTTPException(400, f"invalid cage: {exc}")
        report = validate_cage(cage)
        if not report.ok:
            raise HTTPException(400, f"invalid cage: {report}")
        grid, tris = _grid_and_triangles(cage, req.grid_res)
        fld = deformer.build_field(cage, grid, req.target_order,
                                   m_ceiling=max(req.target_order, 1))
        session = Session(
            id=uuid.uuid4().hex,
            cage=cage,
            field=fld,
            grid_res=req.grid_res,
            target_order=req.target_order,
            triangles=tris,
            created_at=time.time(),
        )
        store.add(session)
        return {
            "id": session.id,
            "rest_grid": grid.tolist(),
            "triangles": tris.tolist(),
        }

    @app.put("/sessions/{sid}/cage")
    def update_cage(sid: str, req: UpdateCageRequest):
        session = store.get(sid)
        if session is None:
            raise HTTPException(404, "unknown session")
        if len(req.curves) != len(session.cage):
            raise HTTPException(
                409,
                f"curve count {len(req.curves)} does not match cage "
                f"({len(session.cage)})",
            )
        if req.basis != "bezier":
            raise HTTPException(409, "only bezier basis is accepted for updates")
        try:
            curves = tuple(bezier_to_monomial(pts) for pts in req.curves)
        except PolyGreenError as exc:
            raise HTTPException(409, f"invalid deformed curves: {exc}")
        for k, c in enumerate(curves):
            if c.order != session.target_order:
                raise HTTPException(
                    409,
                    f"curve {k} has order {c.order}, session target order is "
                    f"{session.target_order}",
                )
        try:
            warped = deformer.deform(session.field, curves)
        except ShapeMismatchError as exc:
            raise HTTPException(409, str(exc))
        return {"deformed_grid": warped.tolist()}

    @app.get("/sessions/{sid}")
    def get_session(sid: str):
        session = store.get(sid)
        if session is None:
            raise HTTPException(404, "unknown session")
        return {
            "id": session.id,
            "grid_res": session.grid_res,
            "target_order": session.target_order,
            "n_points": session.field.n_points,
            "n_curves": session.field.n_curves,
            "created_at": session.created_at,
            "has_image": session.image is not None,
        }

    @app.delete("/sessions/{sid}", status_code=204)
    def delete_session(sid: str):
        store.remove(sid)  # idempotent: deleting an unknown id is a no-op
        return Response(status_code=204)

    @app.post("/sessions/{sid}/image", status_code=204)
    async def upload_image(sid: str, file: UploadFile):
        session = store.get(sid)
        if session is None:
            raise HTTPException(404, "unknown session")
        data = await file.read()
        store.replace(replace(session, image=data,
                              image_type=file.content_type or "image/png"))
        return Response(status_code=204)

    @app.get("/sessions/{sid}/image")
    def get_image(sid: str):
        session = store.get(sid)
        if session is None or session.image is None:
            raise HTTPException(404, "no image for this session")
        return Response(content=session.image, media_type=session.image_type)

    return app


def main():
    import uvicorn

    uvicorn.run(create_app(), host="127.0.0.1", port=8787)


if __name__ == "__main__":
    main()
