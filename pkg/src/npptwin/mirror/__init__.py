from .protocol import (
    ProtocolError,
    ListRequest,
    GetRequest,
    MGetRequest,
    SetRequest,
    MSetRequest,
    TickRequest,
    ModeRequest,
    AdvanceRequest,
    parse_request,
    format_request,
    format_value,
    MAX_LINE_BYTES,
    MAX_BATCH,
)
from .server import MirrorService, serve_mirror
from .client import MirrorClient, MirrorCache, MirrorPoller

__all__ = [
    "ProtocolError",
    "ListRequest",
    "GetRequest",
    "MGetRequest",
    "SetRequest",
    "MSetRequest",
    "TickRequest",
    "ModeRequest",
    "AdvanceRequest",
    "parse_request",
    "format_request",
    "format_value",
    "MAX_LINE_BYTES",
    "MAX_BATCH",
    "MirrorService",
    "serve_mirror",
    "MirrorClient",
    "MirrorCache",
    "MirrorPoller",
]
