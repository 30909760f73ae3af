"""Line grammar of the variable-mirroring protocol.

Requests are single LF-terminated UTF-8 lines of at most 64 KiB, tokens
separated by exactly one space:

    LIST
    GET <name>
    MGET <name> [<name> ...]              (1..1000 names)
    SET <name> <decimal>
    MSET <name>=<decimal> [...]           (1..1000 pairs)
    TICK
    MODE rt|lockstep
    ADVANCE <ms>                          (positive integer, lockstep only)

Responses (always LF-terminated):

    OK <value> [...]                      GET / MGET / SET / MSET
    OK <sim_time_ms>                      TICK / MODE / ADVANCE
    OK <count>                            LIST, then <count> lines of
    <name> <unit> <ro|rw> <min> <max>     descriptors, then END
    ERR 400 <msg> | ERR 404 <name> | ERR 403 <name> | ERR 409 mode

Values are emitted in shortest round-trip decimal form: parsing the text
back yields the identical IEEE-754 double, so at least nine significant
digits of precision always survive the wire and in-snapshot identities
stay exact.  Decimals keep their original spelling inside parsed
requests, so format(parse(line)) is byte-identical for every grammatical
line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

MAX_LINE_BYTES = 64 * 1024
MAX_BATCH = 1000

NAME_TOKEN = re.compile(r"^[a-z0-9_]+$")
DECIMAL_TOKEN = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")
INT_TOKEN = re.compile(r"^(0|[1-9][0-9]*)$")


class ProtocolError(ValueError):
    """Malformed request; carries the wire error code (400)."""

    def __init__(self, message: str, code: int = 400):
        super().__init__(message)
        self.code = code
        self.message = message


@dataclass(frozen=True)
class ListRequest:
    pass


@dataclass(frozen=True)
class GetRequest:
    name: str


@dataclass(frozen=True)
class MGetRequest:
    names: tuple[str, ...]


@dataclass(frozen=True)
class SetRequest:
    name: str
    value: float
    text: str  # original decimal spelling, for byte-exact round trips


@dataclass(frozen=True)
class MSetRequest:
    # (name, value, original decimal text) per pair
    pairs: tuple[tuple[str, float, str], ...]


@dataclass(frozen=True)
class TickRequest:
    pass


@dataclass(frozen=True)
class ModeRequest:
    mode: str  # "rt" | "lockstep"


@dataclass(frozen=True)
class AdvanceRequest:
    ms: int


MirrorRequest = (
    ListRequest
    | GetRequest
    | MGetRequest
    | SetRequest
    | MSetRequest
    | TickRequest
    | ModeRequest
    | AdvanceRequest
)


def format_value(value: float) -> str:
    """Shortest exact decimal form of a double (full precision preserved)."""
    return repr(float(value))


def _require_name(token: str) -> str:
    if not NAME_TOKEN.match(token):
        raise ProtocolError(f"bad name {token!r}")
    return token


def _require_decimal(token: str) -> float:
    if not DECIMAL_TOKEN.match(token):
        raise ProtocolError(f"bad decimal {token!r}")
    return float(token)


def parse_request(line: str) -> MirrorRequest:
    if len(line.encode("utf-8", errors="replace")) > MAX_LINE_BYTES:
        raise ProtocolError("line exceeds 64 KiB")
    if line.endswith("\n") or line.endswith("\r"):
        raise ProtocolError("line terminator must be stripped before parsing")
    if not line:
        raise ProtocolError("empty request")
    tokens = line.split(" ")
    if any(t == "" for t in tokens):
        raise ProtocolError("tokens must be separated by single spaces")
    verb, args = tokens[0], tokens[1:]
    if verb == "LIST":
        if args:
            raise ProtocolError("LIST takes no arguments")
        return ListRequest()
    if verb == "TICK":
        if args:
            raise ProtocolError("TICK takes no arguments")
        return TickRequest()
    if verb == "GET":
        if len(args) != 1:
            raise ProtocolError("GET takes exactly one name")
        return GetRequest(_require_name(args[0]))
    if verb == "MGET":
        if not 1 <= len(args) <= MAX_BATCH:
            raise ProtocolError(f"MGET takes 1..{MAX_BATCH} names")
        return MGetRequest(tuple(_require_name(a) for a in args))
    if verb == "SET":
        if len(args) != 2:
            raise ProtocolError("SET takes a name and a decimal")
        return SetRequest(_require_name(args[0]), _require_decimal(args[1]), args[1])
    if verb == "MSET":
        if not 1 <= len(args) <= MAX_BATCH:
            raise ProtocolError(f"MSET takes 1..{MAX_BATCH} pairs")
        pairs = []
        for arg in args:
            name, eq, text = arg.partition("=")
            if eq != "=" or "=" in text:
                raise ProtocolError(f"bad pair {arg!r}")
            pairs.append((_require_name(name), _require_decimal(text), text))
        return MSetRequest(tuple(pairs))
    if verb == "MODE":
        if len(args) != 1 or args[0] not in ("rt", "lockstep"):
            raise ProtocolError("MODE takes rt or lockstep")
        return ModeRequest(args[0])
    if verb == "ADVANCE":
        if len(args) != 1 or not INT_TOKEN.match(args[0]):
            raise ProtocolError("ADVANCE takes a non-negative integer of ms")
        ms = int(args[0])
        if ms < 1:
            raise ProtocolError("ADVANCE must be >= 1 ms")
        return AdvanceRequest(ms)
    raise ProtocolError(f"unknown verb {verb!r}")


def format_request(req: MirrorRequest) -> str:
    if isinstance(req, ListRequest):
        return "LIST"
    if isinstance(req, TickRequest):
        return "TICK"
    if isinstance(req, GetRequest):
        return f"GET {req.name}"
    if isinstance(req, MGetRequest):
        return "MGET " + " ".join(req.names)
    if isinstance(req, SetRequest):
        return f"SET {req.name} {req.text}"
    if isinstance(req, MSetRequest):
        return "MSET " + " ".join(f"{n}={t}" for n, _, t in req.pairs)
    if isinstance(req, ModeRequest):
        return f"MODE {req.mode}"
    if isinstance(req, AdvanceRequest):
        return f"ADVANCE {req.ms}"
    raise TypeError(f"not a mirror request: {req!r}")
