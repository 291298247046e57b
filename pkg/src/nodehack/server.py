"""HTTP and socket front ends for editing sessions.

The HTTP API multiplexes sessions by id; the TCP listener speaks
newline-delimited JSON with one session per connection. Both carry the same
SessionMessage envelopes and return the same response documents.
"""

from __future__ import annotations

import asyncio
import json
from contextlib import asynccontextmanager
from pathlib import Path
from typing import Any, Optional

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from . import __version__
from .puzzles import list_puzzles, load_puzzle
from .serialize import canonical_dumps
from .session import Session, SessionManager, SessionMessage, message_from_doc
from .serialize import ParseError


class MessageIn(BaseModel):
    id: str
    type: str
    payload: dict[str, Any] = Field(default_factory=dict)


class ErrorOut(BaseModel):
    code: str
    message: str


class MessageOut(BaseModel):
    id: str
    type: str
    status: str
    payload: Optional[dict[str, Any]] = None
    error: Optional[ErrorOut] = None


class SessionOut(BaseModel):
    session_id: str


class PuzzleSummary(BaseModel):
    id: str
    title: str
    brief: str


def create_app(
    ui_dir: Optional[str] = None,
    socket_host: str = "127.0.0.1",
    socket_port: Optional[int] = None,
) -> FastAPI:
    manager = SessionManager()

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        server = None
        if socket_port is not None:
            server = await start_socket_server(socket_host, socket_port)
        yield
        if server is not None:
            server.close()
            await server.wait_closed()

    app = FastAPI(title="nodehack", version=__version__, lifespan=lifespan)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.manager = manager

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.get("/puzzles", response_model=list[PuzzleSummary])
    def puzzles() -> list[PuzzleSummary]:
        out = []
        for pid in list_puzzles():
            spec = load_puzzle(pid)
            out.append(PuzzleSummary(id=spec.id, title=spec.title, brief=spec.brief))
        return out

    @app.post("/sessions", response_model=SessionOut, status_code=201)
    def create_session() -> SessionOut:
        return SessionOut(session_id=manager.create())

    @app.delete("/sessions/{session_id}", status_code=204)
    def close_session(session_id: str) -> None:
        if not manager.close(session_id):
            raise HTTPException(status_code=404, detail=f"no session {session_id!r}")

    @app.post("/sessions/{session_id}/message", response_model=MessageOut)
    def post_message(session_id: str, msg: MessageIn) -> JSONResponse:
        if session_id not in manager.ids():
            raise HTTPException(status_code=404, detail=f"no session {session_id!r}")
        session = manager.get(session_id)
        response = session.handle(SessionMessage(msg.id, msg.type, msg.payload))
        return JSONResponse(response)

    if ui_dir is not None:
        root = Path(ui_dir)
        if not root.is_dir():
            raise ValueError(f"ui directory not found: {ui_dir}")
        app.mount("/", StaticFiles(directory=str(root), html=True), name="ui")

    return app


# ---- newline-delimited JSON over TCP --------------------------------------------

_MAX_LINE = 4 * 1024 * 1024


def _protocol_error(message: str) -> bytes:
    doc = {
        "id": None,
        "type": None,
        "status": "error",
        "error": {"code": "SchemaError", "message": message},
    }
    return canonical_dumps(doc).encode()


async def handle_connection(
    reader: asyncio.StreamReader, writer: asyncio.StreamWriter
) -> None:
    """One client, one session, one JSON document per line."""
    session = Session()
    try:
        while True:
            try:
                line = await reader.readline()
            except (asyncio.LimitOverrunError, ValueError):
                writer.write(_protocol_error("line too long"))
                await writer.drain()
                break
            if not line:
                break
            text = line.decode("utf-8", errors="replace").strip()
            if not text:
                continue
            try:
                doc = json.loads(text)
                msg = message_from_doc(doc)
            except json.JSONDecodeError as exc:
                writer.write(_protocol_error(f"bad JSON: {exc.msg}"))
                await writer.drain()
                continue
            except ParseError as exc:
                writer.write(_protocol_error(str(exc)))
                await writer.drain()
                continue
            response = session.handle(msg)
            writer.write(canonical_dumps(response).encode())
            await writer.drain()
    except ConnectionResetError:
        pass
    finally:
        writer.close()
        try:
            await writer.wait_closed()
        except (ConnectionResetError, BrokenPipeError):
            pass


async def start_socket_server(host: str, port: int) -> asyncio.AbstractServer:
    return await asyncio.start_server(
        handle_connection, host, port, limit=_MAX_LINE
    )
