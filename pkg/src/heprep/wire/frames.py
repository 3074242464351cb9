"""Frame encoding: one UTF-8 JSON object per line, newline-terminated.

Requests:  {"id": <int>, "method": <string>, "params": <object>}
Responses: {"id": <int>, "result": <any>}
           {"id": <int>, "error": {"code": <int>, "message": <string>}}

Responses echo the request id; a frame that cannot be parsed far enough
to recover an id is answered with id null. Error codes are stable.
"""

from __future__ import annotations

import json
from typing import Optional

ERR_PARSE = 1
ERR_UNKNOWN_METHOD = 2
ERR_BAD_PARAMS = 3
ERR_INVALID_PATH = 4
ERR_UNKNOWN_ACTION = 5
ERR_ACTION_FAILED = 6
ERR_STATE = 7
ERR_INTERNAL = 8

PROTOCOL_VERSION = "1"


class WireError(Exception):
    """Dispatch failure carrying a stable protocol error code."""

    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


def encode_frame(payload: dict) -> bytes:
    """Serialize one frame; compact separators guarantee a single line."""
    return json.dumps(payload, separators=(",", ":"), ensure_ascii=False).encode("utf-8") + b"\n"


def result_frame(request_id, result) -> dict:
    return {"id": request_id, "result": result}


def error_frame(request_id, code: int, message: str) -> dict:
    return {"id": request_id, "error": {"code": code, "message": message}}


def decode_request(line) -> tuple:
    """Decode a request line into (id, method, params).

    Raises WireError(ERR_PARSE) when the frame is not an object with an
    integer id and a string method; params defaults to {}.
    """
    if isinstance(line, (bytes, bytearray)):
        try:
            line = line.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise WireError(ERR_PARSE, f"frame is not UTF-8: {exc}") from None
    try:
        payload = json.loads(line)
    except json.JSONDecodeError as exc:
        raise WireError(ERR_PARSE, f"bad JSON: {exc}") from None
    if not isinstance(payload, dict):
        raise WireError(ERR_PARSE, "frame must be a JSON object")
    request_id = payload.get("id")
    if not isinstance(request_id, int) or isinstance(request_id, bool):
        raise WireError(ERR_PARSE, "frame id must be an integer")
    method = payload.get("method")
    if not isinstance(method, str):
        raise _IdentifiedWireError(request_id, ERR_PARSE, "frame method must be a string")
    params = payload.get("params", {})
    if not isinstance(params, dict):
        raise _IdentifiedWireError(request_id, ERR_BAD_PARAMS, "params must be an object")
    extras = set(payload) - {"id", "method", "params"}
    if extras:
        raise _IdentifiedWireError(
            request_id, ERR_PARSE, f"unknown frame field(s) {sorted(extras)}"
        )
    return request_id, method, params


class _IdentifiedWireError(WireError):
    """A frame error where the request id could still be recovered."""

    def __init__(self, request_id: Optional[int], code: int, message: str):
        super().__init__(code, message)
        self.request_id = request_id
