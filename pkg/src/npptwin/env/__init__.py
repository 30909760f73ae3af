from .episode import (
    ACTION_NAMES,
    EnvConfig,
    Episode,
    EpisodeStateError,
    StepResult,
    reward,
)

__all__ = [
    "ACTION_NAMES",
    "EnvConfig",
    "Episode",
    "EpisodeStateError",
    "StepResult",
    "reward",
]
