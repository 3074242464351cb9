"""Small synchronous TCP client for the frame protocol."""

from __future__ import annotations

import json
import socket
from typing import Optional

from .frames import encode_frame


class WireCallError(Exception):
    """Server answered with an error frame."""

    def __init__(self, code: int, message: str):
        super().__init__(f"[{code}] {message}")
        self.code = code
        self.message = message


class WireClient:
    """One connection; call() sends a request and waits for its response."""

    def __init__(self, host: str, port: int, timeout: float = 30.0):
        self._sock = socket.create_connection((host, port), timeout=timeout)
        self._file = self._sock.makefile("rwb")
        self._next_id = 1

    def close(self):
        try:
            self._file.close()
        finally:
            self._sock.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc_info):
        self.close()

    def call(self, method: str, params: Optional[dict] = None):
        """Send one request; return the result or raise WireCallError."""
        request_id = self._send(method, params)
        response = self.read_response()
        if response.get("id") != request_id:
            raise WireCallError(0, f"response id {response.get('id')} != {request_id}")
        return _unwrap(response)

    def pipeline(self, calls) -> list:
        """Send all requests first, then collect the responses in order."""
        ids = [self._send(method, params) for method, params in calls]
        responses = [self.read_response() for _ in ids]
        results = []
        for request_id, response in zip(ids, responses):
            if response.get("id") != request_id:
                raise WireCallError(0, f"response id {response.get('id')} != {request_id}")
            results.append(_unwrap(response))
        return results

    def _send(self, method: str, params: Optional[dict]) -> int:
        request_id = self._next_id
        self._next_id += 1
        frame = {"id": request_id, "method": method, "params": params or {}}
        self._file.write(encode_frame(frame))
        self._file.flush()
        return request_id

    def send_raw(self, data: bytes):
        """Push raw bytes (for protocol-error tests)."""
        self._file.write(data)
        self._file.flush()

    def read_response(self) -> dict:
        line = self._file.readline()
        if not line:
            raise ConnectionError("server closed the connection")
        return json.loads(line.decode("utf-8"))


def _unwrap(response: dict):
    if "error" in response:
        error = response["error"]
        raise WireCallError(error.get("code", 0), error.get("message", ""))
    return response.get("result")
