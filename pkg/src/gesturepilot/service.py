"""Live piloting service: binary frames in, report + annotated frame out.

WebSocket /pilot: each binary message is one wire-format frame. For every
frame actually processed the server sends a JSON FrameReport text message
followed by the annotated frame as a binary message, in processing order.
A malformed frame elicits a JSON error message and the connection stays
open; an oversized message closes the connection with code 1009.

If the client sends faster than processing keeps up, at most two frames
wait in line and the oldest waiting frame is dropped first; every report
corresponds to a frame that was really processed.

HTTP: GET /health and GET /config report state; POST /init-box and
POST /reset act on the most recently connected session. Each WebSocket
connection gets its own independent pipeline and simulated drone; the
read-only cascade and skin model are shared.
"""

from __future__ import annotations

import asyncio
import logging
from dataclasses import replace

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .errors import FormatError, PilotError
from .frames import MAX_WIRE_DIM, WIRE_HEADER, decode_wire_frame, encode_wire_frame
from .geometry import BoundingBox
from .pipeline import PilotSession, PipelineConfig, annotate
from .report import report_to_json
from .skin import SkinModel

log = logging.getLogger("gesturepilot.service")

MAX_WIRE_BYTES = WIRE_HEADER.size + 3 * MAX_WIRE_DIM * MAX_WIRE_DIM
QUEUE_DEPTH = 2


class _DropOldestQueue:
    """Bounded frame hand-off; enqueueing beyond depth evicts the oldest."""

    def __init__(self, depth: int):
        self._queue: asyncio.Queue = asyncio.Queue(maxsize=depth)

    def put(self, item) -> None:
        while True:
            try:
                self._queue.put_nowait(item)
                return
            except asyncio.QueueFull:
                try:
                    self._queue.get_nowait()
                except asyncio.QueueEmpty:
                    pass

    async def get(self):
        return await self._queue.get()


def create_app(config: PipelineConfig, face_cascade,
               skin_model: SkinModel) -> FastAPI:
    app = FastAPI(title="gesturepilot")
    app.state.latest_session = None

    def current_session() -> PilotSession | None:
        return app.state.latest_session

    @app.get("/health")
    def health():
        session = current_session()
        return {"state": session.status if session else "awaiting_init"}

    @app.get("/config")
    def get_config():
        session = current_session()
        cfg = session.config if session else config
        return cfg.to_dict()

    @app.post("/init-box")
    async def init_box(body: dict):
        try:
            box = BoundingBox(int(body["x"]), int(body["y"]),
                              int(body["w"]), int(body["h"]))
        except (KeyError, TypeError, ValueError) as exc:
            return {"ok": False, "error": f"need integer x, y, w, h: {exc}"}
        session = current_session()
        if session is None:
            # Applies to the next connecting session.
            app.state.pending_box = box
            return {"ok": True, "applied": "next-session"}
        session.request_init_box(box)
        return {"ok": True, "applied": "next-frame"}

    @app.post("/reset")
    async def reset():
        session = current_session()
        if session is not None:
            session.reset()
        return {"ok": True}

    @app.websocket("/pilot")
    async def pilot(ws: WebSocket):
        await ws.accept()
        session_config = config
        pending = getattr(app.state, "pending_box", None)
        if pending is not None:
            session_config = replace(config, init_box=pending)
            app.state.pending_box = None
        session = PilotSession(session_config, face_cascade, skin_model)
        app.state.latest_session = session
        queue = _DropOldestQueue(QUEUE_DEPTH)
        loop = asyncio.get_running_loop()
        stop = object()

        async def reader():
            try:
                while True:
                    message = await ws.receive()
                    if message.get("type") == "websocket.disconnect":
                        queue.put(stop)
                        return
                    data = message.get("bytes")
                    if data is None:
                        await ws.send_json({"error": "expected a binary wire frame"})
                        continue
                    if len(data) > MAX_WIRE_BYTES:
                        await ws.close(code=1009)
                        queue.put(stop)
                        return
                    queue.put(data)
            except WebSocketDisconnect:
                queue.put(stop)

        reader_task = asyncio.create_task(reader())
        try:
            while True:
                data = await queue.get()
                if data is stop:
                    break
                try:
                    frame = decode_wire_frame(data)
                except FormatError as exc:
                    await ws.send_json({"error": str(exc)})
                    continue
                try:
                    report = await loop.run_in_executor(None, session.process,
                                                        frame)
                except PilotError as exc:
                    await ws.send_json({"error": str(exc)})
                    continue
                annotated = annotate(frame, report)
                await ws.send_text(report_to_json(report))
                await ws.send_bytes(encode_wire_frame(annotated))
        except WebSocketDisconnect:
            pass
        finally:
            reader_task.cancel()
            log.info("session closed after %d frames", session.frame_index)

    return app


def serve(config: PipelineConfig, face_cascade, skin_model: SkinModel,
          host: str = "127.0.0.1", port: int = 8000) -> None:
    """Blocking uvicorn server; ctrl-c to stop."""
    import uvicorn

    app = create_app(config, face_cascade, skin_model)
    uvicorn.run(app, host=host, port=port, log_level="info")
