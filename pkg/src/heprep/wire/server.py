"""Serving the frame protocol over raw TCP and WebSocket.

One process hosts one shared session. The TCP listener speaks
newline-delimited frames; a FastAPI app on port+1 speaks the identical
frames over WebSocket at path /heprep (one frame per message) for browser
clients. Both run in one event loop; requests on a connection are
answered in arrival order, and mutating methods across all connections
are serialized by a global lock.
"""

from __future__ import annotations

import asyncio
import json
import logging
import threading
from typing import Optional

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from ..events.session import Session
from .dispatch import Dispatcher
from .frames import encode_frame

log = logging.getLogger("heprep.wire")

MAX_LINE_BYTES = 1 << 20
DEFAULT_PORT = 7707
WS_PATH = "/heprep"


def make_app(dispatcher: Dispatcher, lock: asyncio.Lock) -> FastAPI:
    """FastAPI app exposing the frame protocol at the WebSocket path."""
    app = FastAPI(title="heprep wire", docs_url=None, redoc_url=None)

    @app.websocket(WS_PATH)
    async def heprep_ws(ws: WebSocket):
        await ws.accept()
        log.info("websocket client connected: %s", ws.client)
        try:
            while True:
                line = await ws.receive_text()
                response = await _dispatch(dispatcher, lock, line)
                await ws.send_text(json.dumps(response, separators=(",", ":")))
        except WebSocketDisconnect:
            log.info("websocket client disconnected: %s", ws.client)

    return app


async def _dispatch(dispatcher: Dispatcher, lock: asyncio.Lock, line) -> dict:
    method = _peek_method(line)
    if method is not None and dispatcher.is_mutating(method):
        async with lock:
            log.info("mutating request: %s", method)
            return dispatcher.handle_line(line)
    return dispatcher.handle_line(line)


def _peek_method(line) -> Optional[str]:
    try:
        if isinstance(line, (bytes, bytearray)):
            line = line.decode("utf-8")
        payload = json.loads(line)
        method = payload.get("method")
        return method if isinstance(method, str) else None
    except Exception:
        return None


class WireServer:
    """TCP + WebSocket server around one session; start/stop for embedding."""

    def __init__(
        self,
        session: Session,
        host: str = "127.0.0.1",
        port: int = DEFAULT_PORT,
        ws_port: Optional[int] = None,
        enable_ws: bool = True,
    ):
        self.session = session
        self.dispatcher = Dispatcher(session)
        self.host = host
        self.port = port
        self.ws_port = ws_port if ws_port is not None else (port + 1 if port else 0)
        self.enable_ws = enable_ws
        self._lock: Optional[asyncio.Lock] = None
        self._tcp_server: Optional[asyncio.AbstractServer] = None
        self._uvicorn_server = None
        self._uvicorn_task = None

    @property
    def tcp_port(self) -> int:
        return self._tcp_server.sockets[0].getsockname()[1]

    @property
    def websocket_port(self) -> int:
        if not self.enable_ws:
            raise RuntimeError("websocket listener is disabled")
        return self._uvicorn_server.servers[0].sockets[0].getsockname()[1]

    async def start(self):
        self._lock = asyncio.Lock()
        self._tcp_server = await asyncio.start_server(
            self._handle_connection, self.host, self.port, limit=MAX_LINE_BYTES
        )
        log.info("tcp listener on %s:%d", self.host, self.tcp_port)
        if self.enable_ws:
            import uvicorn

            app = make_app(self.dispatcher, self._lock)
            config = uvicorn.Config(
                app,
                host=self.host,
                port=self.ws_port,
                log_level="warning",
                ws="auto",
                lifespan="off",
            )
            self._uvicorn_server = uvicorn.Server(config)
            self._uvicorn_task = asyncio.ensure_future(self._uvicorn_server.serve())
            while not self._uvicorn_server.started:
                if self._uvicorn_task.done():
                    self._uvicorn_task.result()  # raise bind failures
                await asyncio.sleep(0.01)
            log.info("websocket listener on %s:%d%s", self.host, self.websocket_port, WS_PATH)

    async def stop(self):
        if self._tcp_server is not None:
            self._tcp_server.close()
            await self._tcp_server.wait_closed()
        if self._uvicorn_server is not None:
            self._uvicorn_server.should_exit = True
            await self._uvicorn_task

    async def serve_forever(self):
        async with self._tcp_server:
            await self._tcp_server.serve_forever()

    async def _handle_connection(self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter):
        peer = writer.get_extra_info("peername")
        log.info("tcp client connected: %s", peer)
        try:
            while True:
                try:
                    line = await reader.readline()
                except (asyncio.LimitOverrunError, ValueError):
                    writer.write(
                        encode_frame(
                            {"id": None, "error": {"code": 1, "message": "frame too long"}}
                        )
                    )
                    await writer.drain()
                    break
                if not line:
                    break
                if not line.strip():
                    continue
                response = await _dispatch(self.dispatcher, self._lock, line)
                writer.write(encode_frame(response))
                await writer.drain()
        except ConnectionError:
            pass
        finally:
            log.info("tcp client disconnected: %s", peer)
            writer.close()
            try:
                await writer.wait_closed()
            except ConnectionError:
                pass


def serve(
    session: Session,
    host: str = "127.0.0.1",
    port: int = DEFAULT_PORT,
    ws_port: Optional[int] = None,
    enable_ws: bool = True,
):
    """Run the server until interrupted (the CLI's blocking entry point)."""

    async def main():
        server = WireServer(session, host, port, ws_port, enable_ws)
        await server.start()
        try:
            await asyncio.Event().wait()  # until cancelled
        finally:
            await server.stop()

    asyncio.run(main())


class BackgroundServer:
    """Run a WireServer in a daemon thread; used by tests and tooling."""

    def __init__(self, session: Session, host: str = "127.0.0.1", enable_ws: bool = False):
        self._server = WireServer(session, host, port=0, ws_port=0, enable_ws=enable_ws)
        self._loop = None
        self._thread = None
        self._started = threading.Event()
        self._startup_error = None

    def __enter__(self):
        self._thread = threading.Thread(target=self._run, daemon=True)
        self._thread.start()
        self._started.wait(timeout=30)
        if self._startup_error is not None:
            raise self._startup_error
        if not self._started.is_set():
            raise RuntimeError("server did not start in time")
        return self

    def __exit__(self, *exc_info):
        if self._loop is not None:
            self._loop.call_soon_threadsafe(self._stop_event.set)
        self._thread.join(timeout=30)

    @property
    def tcp_port(self) -> int:
        return self._server.tcp_port

    @property
    def websocket_port(self) -> int:
        return self._server.websocket_port

    @property
    def session(self) -> Session:
        return self._server.session

    def _run(self):
        async def main():
            self._loop = asyncio.get_running_loop()
            self._stop_event = asyncio.Event()
            try:
                await self._server.start()
            except Exception as exc:
                self._startup_error = exc
                self._started.set()
                return
            self._started.set()
            await self._stop_event.wait()
            await self._server.stop()

        asyncio.run(main())
