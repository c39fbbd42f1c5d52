"""8-bit raster images: decode/encode, resampling, luma reduction, statistics.

``RasterImage`` (interleaved 8-bit samples) is the currency every pipeline
stage trades in; metrics work on the float ``LumaPlane`` produced by
``to_luma``.  File I/O covers baseline PNG and JPEG only; 16-bit grayscale
sources are rescaled to 8 bit on load.
"""

from __future__ import annotations

import hashlib
import io
import math
import sys
from array import array
from dataclasses import dataclass
from pathlib import Path

from PIL import Image as PILImage
from PIL import UnidentifiedImageError

from . import kernels
from .errors import CorruptImageError, UnsupportedFormatError

SUPPORTED_FORMATS = ("PNG", "JPEG")

_MODE_BY_CHANNELS = {1: "L", 3: "RGB", 4: "RGBA"}
_SUFFIX_FORMATS = {".png": "PNG", ".jpg": "JPEG", ".jpeg": "JPEG"}


@dataclass(frozen=True)
class RasterImage:
    """Row-major interleaved 8-bit image; channels is 1 (gray), 3 (RGB) or 4 (RGBA)."""

    width: int
    height: int
    channels: int
    data: bytes

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError(f"image dimensions must be >= 1, got {self.width}x{self.height}")
        if self.channels not in (1, 3, 4):
            raise ValueError(f"channels must be 1, 3 or 4, got {self.channels}")
        if not isinstance(self.data, bytes):
            object.__setattr__(self, "data", bytes(self.data))
        expected = self.width * self.height * self.channels
        if len(self.data) != expected:
            raise ValueError(
                f"data length {len(self.data)} != width*height*channels = {expected}"
            )

    @property
    def size(self):
        return self.width, self.height


@dataclass(frozen=True)
class LumaPlane:
    """Single-channel float64 plane with samples in [0, 255]."""

    width: int
    height: int
    data: array

    def __post_init__(self):
        if len(self.data) != self.width * self.height:
            raise ValueError(
                f"plane length {len(self.data)} != width*height = {self.width * self.height}"
            )

    @property
    def size(self):
        return self.width, self.height


@dataclass(frozen=True)
class ChannelStats:
    """Per-channel mean and population (1/N) standard deviation."""

    means: tuple
    stddevs: tuple


def _gray16_to_8(im):
    # 16-bit grayscale PNG arrives as I;16 (or mode I on older decoders)
    if im.mode == "I":
        vals = array("i", im.tobytes())
    else:
        vals = array("H", im.tobytes())
        if im.mode == "I;16B" and sys.byteorder == "little":
            vals.byteswap()
        elif im.mode in ("I;16", "I;16L", "I;16N") and sys.byteorder == "big":
            vals.byteswap()
    out = bytearray(len(vals))
    for i, v in enumerate(vals):
        if v < 0:
            v = 0
        elif v > 65535:
            v = 65535
        out[i] = (v * 255 + 32767) // 65535
    return bytes(out)


def _extract(im):
    mode = im.mode
    if mode in ("I;16", "I;16L", "I;16B", "I;16N", "I"):
        return im.width, im.height, 1, _gray16_to_8(im)
    if mode == "1":
        im = im.convert("L")
    elif mode == "LA":
        im = im.convert("RGBA")
    elif mode == "P":
        im = im.convert("RGBA" if "transparency" in im.info else "RGB")
    elif mode not in ("L", "RGB", "RGBA"):
        im = im.convert("RGB")
    channels = {"L": 1, "RGB": 3, "RGBA": 4}[im.mode]
    return im.width, im.height, channels, im.tobytes()


def decode_image_bytes(raw, source="<bytes>"):
    """Decode in-memory PNG/JPEG bytes into a RasterImage.

    Raises CorruptImageError when the bytes are not recognizable image data
    (or are truncated) and UnsupportedFormatError for recognizable formats
    outside the PNG/JPEG contract.
    """
    buf = io.BytesIO(raw)
    try:
        im = PILImage.open(buf)
    except UnidentifiedImageError as exc:
        raise CorruptImageError(f"not decodable as image data: {exc}", source) from exc
    fmt = (im.format or "").upper()
    if fmt not in SUPPORTED_FORMATS:
        raise UnsupportedFormatError(
            f"unsupported format {fmt or 'unknown'}; expected PNG or JPEG", source
        )
    try:
        im.load()
    except OSError as exc:
        raise CorruptImageError(f"truncated or corrupt {fmt} data: {exc}", source) from exc
    width, height, channels, data = _extract(im)
    return RasterImage(width, height, channels, data)


def load_image(path):
    """Decode the PNG or JPEG file at ``path``.

    Raises FileNotFoundError for a missing path, UnsupportedFormatError for
    non-PNG/JPEG content and CorruptImageError for undecodable data.
    """
    p = Path(path)
    raw = p.read_bytes()
    return decode_image_bytes(raw, source=str(p))


def _resolve_format(path, format):
    if format is not None:
        fmt = format.upper()
        if fmt == "JPG":
            fmt = "JPEG"
        if fmt not in SUPPORTED_FORMATS:
            raise ValueError(f"unsupported save format {format!r}; use PNG or JPEG")
        return fmt
    suffix = Path(path).suffix.lower()
    try:
        return _SUFFIX_FORMATS[suffix]
    except KeyError:
        raise ValueError(
            f"cannot infer format from suffix {suffix!r}; pass format='PNG' or 'JPEG'"
        ) from None


def _to_pil(img):
    return PILImage.frombytes(
        _MODE_BY_CHANNELS[img.channels], (img.width, img.height), img.data
    )


def save_image(img, path, format=None):
    """Write ``img`` to ``path`` as PNG or JPEG (inferred from the suffix).

    PNG round-trips losslessly; JPEG preserves only dimensions and channel
    count, and drops the alpha channel.  Raises OSError on write failure.
    """
    fmt = _resolve_format(path, format)
    im = _to_pil(img)
    if fmt == "JPEG" and img.channels == 4:
        im = im.convert("RGB")
    im.save(str(path), format=fmt)


def encode_image(img, format="PNG"):
    """Encode ``img`` to bytes (PNG default); same caveats as save_image."""
    fmt = _resolve_format("<memory>", format)
    im = _to_pil(img)
    if fmt == "JPEG" and img.channels == 4:
        im = im.convert("RGB")
    buf = io.BytesIO()
    im.save(buf, format=fmt)
    return buf.getvalue()


def resize_bilinear(img, new_width, new_height):
    """Bilinear resample to new dimensions (edge clamp, half-up rounding).

    Resampling to the source dimensions reproduces the input exactly.
    """
    if new_width < 1 or new_height < 1:
        raise ValueError(f"target dimensions must be >= 1, got {new_width}x{new_height}")
    out = kernels.resize_bilinear_u8(
        img.data, img.width, img.height, img.channels, new_width, new_height
    )
    return RasterImage(new_width, new_height, img.channels, bytes(out))


def to_luma(img):
    """Reduce to a single float plane: Rec.601 weights for color, identity
    for single-channel input; alpha is ignored.  Output stays unrounded."""
    data = kernels.luma_u8(img.data, img.width, img.height, img.channels)
    return LumaPlane(img.width, img.height, data)


def channel_stats(img):
    """Mean and population stddev per channel over all pixels."""
    n = img.width * img.height
    sums, sumsqs = kernels.channel_sums(img.data, img.width, img.height, img.channels)
    means = []
    stddevs = []
    for s, ss in zip(sums, sumsqs):
        mean = s / n
        var = ss / n - mean * mean
        if var < 0.0:  # floating-point droop on near-constant channels
            var = 0.0
        means.append(mean)
        stddevs.append(math.sqrt(var))
    return ChannelStats(means=tuple(means), stddevs=tuple(stddevs))


def image_digest(img):
    """Content hash of an image (dimensions, channels and samples)."""
    h = hashlib.sha256()
    h.update(f"{img.width}x{img.height}x{img.channels}:".encode("ascii"))
    h.update(img.data)
    return "sha256:" + h.hexdigest()
