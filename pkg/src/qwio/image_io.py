"""Image loading, netpbm parsing, proxy resizing, and block padding.

PGM (P2/P5) and PPM (P3/P6) are parsed here directly; anything else
(PNG in particular) is handed to Pillow when it is installed. All planes
are float64 arrays indexed [row, col] with samples in [0, 255].
"""

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import CorruptImageError, UnsupportedFormatError
from .util import atomic_write_bytes, round_half_away

BLOCK = 8


@dataclass(frozen=True)
class PaddedPlane:
    """A plane padded to 8x8 block multiples plus the original size."""

    plane: np.ndarray
    original_height: int
    original_width: int


def as_plane(data) -> np.ndarray:
    """Validate and coerce to a float64 luminance plane.

    Rejects anything that is not 2-D, finite, and inside [0, 255].
    """
    plane = np.asarray(data, dtype=np.float64)
    if plane.ndim != 2 or plane.size == 0:
        raise ValueError(f"plane must be a non-empty 2-D array, got shape {plane.shape}")
    if not np.all(np.isfinite(plane)):
        raise ValueError("plane contains non-finite samples")
    if plane.min() < 0.0 or plane.max() > 255.0:
        raise ValueError(
            f"samples must lie in [0, 255], got [{plane.min()}, {plane.max()}]"
        )
    return plane


def rgb_to_luma(r, g, b) -> np.ndarray:
    """Full-range luma 0.299 r + 0.587 g + 0.114 b, clamped to [0, 255].

    Anchored on g so that gray inputs (v, v, v) map to exactly v; the
    literal three-product form drifts by an ulp on gray.
    """
    r = np.asarray(r, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    luma = g + 0.299 * (r - g) + 0.114 * (b - g)
    return np.clip(luma, 0.0, 255.0)


class _Cursor:
    """Tokenizer for netpbm headers: whitespace separated tokens with
    '#' comments running to end of line."""

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def token(self) -> bytes:
        data, n = self.data, len(self.data)
        i = self.pos
        while i < n:
            c = data[i:i + 1]
            if c == b"#":
                while i < n and data[i:i + 1] not in (b"\n", b"\r"):
                    i += 1
            elif c.isspace():
                i += 1
            else:
                break
        if i >= n:
            raise CorruptImageError("unexpected end of header")
        start = i
        while i < n and not data[i:i + 1].isspace() and data[i:i + 1] != b"#":
            i += 1
        self.pos = i
        return data[start:i]

    def int_token(self, what: str) -> int:
        tok = self.token()
        try:
            return int(tok)
        except ValueError:
            raise CorruptImageError(f"bad {what} in header: {tok!r}") from None


def _parse_netpbm(data: bytes) -> np.ndarray:
    cur = _Cursor(data)
    magic = cur.token()
    if magic in (b"P1", b"P4"):
        raise UnsupportedFormatError("bitmap PBM files are not supported")
    if magic not in (b"P2", b"P3", b"P5", b"P6"):
        raise UnsupportedFormatError(f"unknown netpbm magic {magic!r}")
    width = cur.int_token("width")
    height = cur.int_token("height")
    maxval = cur.int_token("maxval")
    if width <= 0 or height <= 0:
        raise CorruptImageError(f"bad dimensions {width}x{height}")
    if maxval <= 0:
        raise CorruptImageError(f"bad maxval {maxval}")
    if maxval > 255:
        raise UnsupportedFormatError("16-bit netpbm images are not supported")

    channels = 3 if magic in (b"P3", b"P6") else 1
    count = width * height * channels

    if magic in (b"P5", b"P6"):
        # Binary raster begins after exactly one whitespace byte.
        raster = data[cur.pos + 1:]
        if len(raster) < count:
            raise CorruptImageError(
                f"raster truncated: expected {count} bytes, got {len(raster)}"
            )
        values = np.frombuffer(raster[:count], dtype=np.uint8).astype(np.float64)
    else:
        try:
            values = np.array([cur.int_token("sample") for _ in range(count)],
                              dtype=np.float64)
        except CorruptImageError:
            raise CorruptImageError("ASCII raster truncated") from None
    if values.max(initial=0) > maxval:
        raise CorruptImageError("sample value exceeds maxval")
    if maxval != 255:
        values = values * (255.0 / maxval)

    if channels == 3:
        rgb = values.reshape(height, width, 3)
        return rgb_to_luma(rgb[:, :, 0], rgb[:, :, 1], rgb[:, :, 2])
    return values.reshape(height, width)


def _load_with_pillow(path: Path) -> np.ndarray:
    try:
        from PIL import Image, UnidentifiedImageError
    except ImportError as exc:  # pragma: no cover - Pillow is a declared dep
        raise UnsupportedFormatError(
            f"{path}: not a netpbm file and Pillow is unavailable"
        ) from exc
    try:
        with Image.open(path) as img:
            if img.mode == "L":
                return np.asarray(img, dtype=np.float64)
            rgb = np.asarray(img.convert("RGB"), dtype=np.float64)
    except UnidentifiedImageError as exc:
        raise UnsupportedFormatError(f"{path}: unrecognized image format") from exc
    except OSError as exc:
        raise CorruptImageError(f"{path}: {exc}") from exc
    return rgb_to_luma(rgb[:, :, 0], rgb[:, :, 1], rgb[:, :, 2])


def load_grayscale(path) -> np.ndarray:
    """Decode a file to a luminance plane.

    Netpbm files are parsed in-package; everything else goes through
    Pillow. Multi-channel inputs are collapsed with rgb_to_luma.
    """
    path = Path(path)
    data = path.read_bytes()
    if data[:2] in (b"P1", b"P2", b"P3", b"P4", b"P5", b"P6"):
        return as_plane(_parse_netpbm(data))
    return as_plane(_load_with_pillow(path))


def write_grayscale(plane, path) -> None:
    """Round half away from zero, clamp to [0, 255], write binary PGM."""
    plane = np.asarray(plane, dtype=np.float64)
    if plane.ndim != 2 or plane.size == 0:
        raise ValueError(f"expected a non-empty 2-D plane, got shape {plane.shape}")
    samples = np.clip(round_half_away(plane), 0, 255).astype(np.uint8)
    height, width = samples.shape
    header = f"P5\n{width} {height}\n255\n".encode("ascii")
    atomic_write_bytes(path, header + samples.tobytes())


def resize_bilinear(plane, out_height: int, out_width: int) -> np.ndarray:
    """Bilinear resample with half-pixel-center sampling and edge clamp.

    Convex interpolation, so the output never overshoots the input range.
    """
    plane = np.asarray(plane, dtype=np.float64)
    in_h, in_w = plane.shape
    if out_height < 1 or out_width < 1:
        raise ValueError("output dimensions must be positive")

    def axis_coords(n_in, n_out):
        coords = (np.arange(n_out) + 0.5) * (n_in / n_out) - 0.5
        coords = np.clip(coords, 0.0, n_in - 1.0)
        i0 = np.floor(coords).astype(np.int64)
        i1 = np.minimum(i0 + 1, n_in - 1)
        return i0, i1, coords - i0

    y0, y1, wy = axis_coords(in_h, out_height)
    x0, x1, wx = axis_coords(in_w, out_width)
    top = plane[np.ix_(y0, x0)] * (1.0 - wx) + plane[np.ix_(y0, x1)] * wx
    bottom = plane[np.ix_(y1, x0)] * (1.0 - wx) + plane[np.ix_(y1, x1)] * wx
    return top * (1.0 - wy[:, None]) + bottom * wy[:, None]


def resize_to_proxy(plane, target_long_edge: int = 256) -> np.ndarray:
    """Downscale so the long edge equals the target; never upscales.

    The short edge follows the aspect ratio to the nearest pixel.
    """
    plane = as_plane(plane)
    if target_long_edge < 8:
        raise ValueError(f"proxy long edge must be at least 8, got {target_long_edge}")
    height, width = plane.shape
    long_edge = max(height, width)
    if long_edge <= target_long_edge:
        return plane
    scale = target_long_edge / long_edge
    out_h = max(1, int(round_half_away(height * scale)))
    out_w = max(1, int(round_half_away(width * scale)))
    if height >= width:
        out_h = target_long_edge
    else:
        out_w = target_long_edge
    return resize_bilinear(plane, out_h, out_w)


def pad_to_blocks(plane) -> PaddedPlane:
    """Replicate the last row/column out to 8x8 block multiples."""
    plane = as_plane(plane)
    height, width = plane.shape
    pad_h = (-height) % BLOCK
    pad_w = (-width) % BLOCK
    padded = np.pad(plane, ((0, pad_h), (0, pad_w)), mode="edge")
    return PaddedPlane(padded, height, width)


def crop_to_original(padded: PaddedPlane, plane=None) -> np.ndarray:
    """Undo pad_to_blocks. Pass `plane` to crop a derived plane (such as
    a reconstruction) using the recorded original size."""
    target = padded.plane if plane is None else np.asarray(plane, dtype=np.float64)
    return target[: padded.original_height, : padded.original_width]
