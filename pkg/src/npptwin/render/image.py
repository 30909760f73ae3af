"""Row-major 8-bit RGB raster and its canonical PPM byte form."""

from __future__ import annotations


class Image:
    __slots__ = ("width", "height", "data")

    def __init__(self, width: int, height: int, data: bytearray | None = None):
        if width < 1 or height < 1:
            raise ValueError(f"image dimensions must be >= 1, got {width}x{height}")
        self.width = width
        self.height = height
        if data is None:
            data = bytearray(3 * width * height)
        elif len(data) != 3 * width * height:
            raise ValueError(
                f"pixel buffer must hold {3 * width * height} bytes, got {len(data)}"
            )
        self.data = data

    def put(self, x: int, y: int, rgb: tuple[int, int, int]) -> None:
        i = 3 * (y * self.width + x)
        self.data[i : i + 3] = bytes(rgb)

    def get(self, x: int, y: int) -> tuple[int, int, int]:
        i = 3 * (y * self.width + x)
        return (self.data[i], self.data[i + 1], self.data[i + 2])

    def fill(self, rgb: tuple[int, int, int]) -> None:
        self.data[:] = bytes(rgb) * (self.width * self.height)

    def fill_rows(self, y0: int, y1: int, rgb: tuple[int, int, int]) -> None:
        """Fill whole pixel rows [y0, y1)."""
        self.data[3 * y0 * self.width : 3 * y1 * self.width] = bytes(rgb) * (
            (y1 - y0) * self.width
        )

    def fill_column(self, x: int, y0: int, y1: int, rgb: tuple[int, int, int]) -> None:
        """Fill one pixel column over rows [y0, y1)."""
        px = bytes(rgb)
        data = self.data
        w3 = 3 * self.width
        i = 3 * x + y0 * w3
        for _ in range(y1 - y0):
            data[i : i + 3] = px
            i += w3

    def fill_rect(self, x0: int, y0: int, w: int, h: int, rgb: tuple[int, int, int]) -> None:
        row = bytes(rgb) * w
        data = self.data
        w3 = 3 * self.width
        i = 3 * x0 + y0 * w3
        for _ in range(h):
            data[i : i + 3 * w] = row
            i += w3

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Image)
            and self.width == other.width
            and self.height == other.height
            and self.data == other.data
        )


def encode_ppm(img: Image) -> bytes:
    """Canonical binary PPM: ``P6\\n<w> <h>\\n255\\n`` + raw RGB."""
    return b"P6\n%d %d\n255\n" % (img.width, img.height) + bytes(img.data)


def decode_ppm(data: bytes) -> Image:
    if not data.startswith(b"P6"):
        raise ValueError("not a P6 PPM stream")
    # Header is three whitespace-separated tokens after the magic.
    pos = 2
    tokens = []
    while len(tokens) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ValueError("truncated PPM header")
        tokens.append(data[start:pos])
    pos += 1  # single whitespace after maxval
    width, height, maxval = (int(t) for t in tokens)
    if maxval != 255:
        raise ValueError(f"unsupported maxval {maxval}")
    need = 3 * width * height
    raw = data[pos : pos + need]
    if len(raw) != need:
        raise ValueError(f"expected {need} pixel bytes, got {len(raw)}")
    return Image(width, height, bytearray(raw))
