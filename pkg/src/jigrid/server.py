"""Live session service over WebSockets.

One performer drives a single engine instance; any number of observers
watch.  Every applied input is appended to the session log and followed by
a snapshot broadcast plus the event's effects, so a recorded log replayed
headlessly reproduces the live stream exactly.  All state mutation funnels
through one asyncio lock, keeping event application strictly ordered.

Message shapes are fixed in PROTOCOL.md at the repository root.
"""

from __future__ import annotations

import asyncio
import contextlib
import json
import socket
from pathlib import Path
from typing import Sequence

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .engine import GridConfig, apply_action
from .session import (
    EventLog,
    PerformanceEvent,
    append_event,
    dumps_wire,
    effect_to_wire,
    event_to_line,
    parse_wire_input,
    snapshot_of,
    snapshot_to_wire,
)
from .engine import new_game


class Session:
    """Single live session: engine state, log, and connected sockets."""

    def __init__(
        self,
        config: GridConfig | None = None,
        log_path: str | Path | None = None,
        accept_performer: bool = True,
    ):
        self.config = config or GridConfig()
        self.state = new_game(self.config)
        self.log: EventLog = ()
        self.log_path = Path(log_path) if log_path is not None else None
        self.accept_performer = accept_performer
        self.performer: WebSocket | None = None
        self.observers: list[WebSocket] = []
        self._lock = asyncio.Lock()
        if self.log_path is not None:
            self.log_path.write_text("", encoding="utf-8")  # fresh session

    async def apply(self, event: PerformanceEvent) -> tuple[dict, list[dict]]:
        """Apply one input: clamp its timestamp, step the engine, log it.

        Returns the performer-facing result message and the broadcast
        messages (snapshot first, then wire effects).
        """
        async with self._lock:
            at = max(event.at, self.log[-1].at) if self.log else event.at
            event = PerformanceEvent(at, event.action)
            result = apply_action(self.state, event.action)
            self.state = result.state
            self.log = append_event(self.log, event)
            if self.log_path is not None:
                with self.log_path.open("a", encoding="utf-8") as fh:
                    fh.write(event_to_line(event) + "\n")
            broadcast = [snapshot_to_wire(snapshot_of(self.state))]
            for effect in result.effects:
                wire = effect_to_wire(effect)
                if wire is not None:
                    broadcast.append(wire)
            reply = {
                "type": "result",
                "at": event.at,
                "accepted": result.accepted,
                "reason": result.reason,
            }
            return reply, broadcast

    def snapshot_message(self) -> dict:
        return snapshot_to_wire(snapshot_of(self.state))

    async def broadcast(self, messages: Sequence[dict]) -> None:
        sockets = list(self.observers)
        if self.performer is not None:
            sockets.append(self.performer)
        for ws in sockets:
            try:
                for message in messages:
                    await ws.send_text(dumps_wire(message))
            except Exception:
                self._drop(ws)

    def _drop(self, ws: WebSocket) -> None:
        if self.performer is ws:
            self.performer = None
        with contextlib.suppress(ValueError):
            self.observers.remove(ws)


def create_app(
    config: GridConfig | None = None,
    log_path: str | Path | None = None,
    accept_performer: bool = True,
    ui_dir: str | Path | None = None,
) -> FastAPI:
    app = FastAPI(title="jigrid session")
    session = Session(config, log_path, accept_performer)
    app.state.session = session

    @app.get("/healthz")
    def healthz() -> dict:
        return {
            "status": "ok",
            "events": len(session.log),
            "observers": len(session.observers),
            "performer": session.performer is not None,
        }

    @app.websocket("/ws/performer")
    async def performer_ws(ws: WebSocket) -> None:
        await ws.accept()
        if session.performer is not None or not session.accept_performer:
            await ws.send_text(
                dumps_wire({"type": "error", "message": "performer seat already taken"})
            )
            await ws.close(code=1008)
            return
        session.performer = ws
        try:
            await ws.send_text(dumps_wire(session.snapshot_message()))
            while True:
                raw = await ws.receive_text()
                try:
                    event = parse_wire_input(json.loads(raw))
                except (json.JSONDecodeError, ValueError) as exc:
                    await ws.send_text(
                        dumps_wire({"type": "error", "message": str(exc)})
                    )
                    continue
                reply, broadcast = await session.apply(event)
                await ws.send_text(dumps_wire(reply))
                await session.broadcast(broadcast)
        except WebSocketDisconnect:
            pass
        finally:
            session._drop(ws)

    @app.websocket("/ws/observer")
    async def observer_ws(ws: WebSocket) -> None:
        await ws.accept()
        session.observers.append(ws)
        try:
            await ws.send_text(dumps_wire(session.snapshot_message()))
            while True:
                # Observers are read-only; drain and ignore anything they send.
                await ws.receive_text()
        except WebSocketDisconnect:
            pass
        finally:
            session._drop(ws)

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


async def run_replay_broadcast(
    session: Session, log: Sequence[PerformanceEvent], speed: float = 1.0
) -> None:
    """Re-apply a recorded log at its original tempo (scaled by ``speed``)."""
    if speed <= 0:
        raise ValueError(f"speed must be positive, got {speed}")
    prev = 0
    for event in log:
        delay = (event.at - prev) / 1000.0 / speed
        prev = event.at
        if delay > 0:
            await asyncio.sleep(delay)
        _, broadcast = await session.apply(event)
        await session.broadcast(broadcast)


def port_is_free(port: int, host: str = "127.0.0.1") -> bool:
    with socket.socket(socket.AF_INET, socket.SOCK_STREAM) as sock:
        try:
            sock.bind((host, port))
        except OSError:
            return False
    return True
