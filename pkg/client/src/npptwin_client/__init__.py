from .bridge import BridgeClient, BridgeError, CommandFailed
from .images import decode_ppm
from .env import RemoteEnv, EpisodeFinished
from .recorder import demo_record

__all__ = [
    "BridgeClient",
    "BridgeError",
    "CommandFailed",
    "decode_ppm",
    "RemoteEnv",
    "EpisodeFinished",
    "demo_record",
]

__version__ = "0.1.0"
