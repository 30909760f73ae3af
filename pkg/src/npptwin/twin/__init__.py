from .framing import FrameDecoder, FramingError, MAX_FRAME_BYTES, encode_frame
from .commands import CommandError, parse_command, format_command

__all__ = [
    "FrameDecoder",
    "FramingError",
    "MAX_FRAME_BYTES",
    "encode_frame",
    "CommandError",
    "parse_command",
    "format_command",
]
