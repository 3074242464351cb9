"""Live transport: framed JSON request/response over TCP and WebSocket."""

from .client import WireCallError, WireClient
from .dispatch import Dispatcher
from .frames import (
    ERR_ACTION_FAILED,
    ERR_BAD_PARAMS,
    ERR_INTERNAL,
    ERR_INVALID_PATH,
    ERR_PARSE,
    ERR_STATE,
    ERR_UNKNOWN_ACTION,
    ERR_UNKNOWN_METHOD,
    PROTOCOL_VERSION,
    WireError,
    encode_frame,
)
from .server import WireServer, serve

__all__ = [
    "Dispatcher",
    "ERR_ACTION_FAILED",
    "ERR_BAD_PARAMS",
    "ERR_INTERNAL",
    "ERR_INVALID_PATH",
    "ERR_PARSE",
    "ERR_STATE",
    "ERR_UNKNOWN_ACTION",
    "ERR_UNKNOWN_METHOD",
    "PROTOCOL_VERSION",
    "WireCallError",
    "WireClient",
    "WireError",
    "WireServer",
    "encode_frame",
    "serve",
]
