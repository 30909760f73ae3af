from .image import Image, encode_ppm, decode_ppm
from .colormap import thermal_color, GREEN
from .raycast import render_first_person, cast_ray, Hit
from .topdown import render_topdown, RobotMarker
from .recorder import TopdownRecorder

__all__ = [
    "Image",
    "encode_ppm",
    "decode_ppm",
    "thermal_color",
    "GREEN",
    "render_first_person",
    "cast_ray",
    "Hit",
    "render_topdown",
    "RobotMarker",
    "TopdownRecorder",
]
