"""Style-image acquisition.

Three interchangeable sources, each timed with a monotonic clock for the
acquisition column of the benchmark:

* ``generated`` — POST to an OpenAI-compatible ``/images/generations``
  endpoint (credential read from an environment variable, base64 response
  preferred).
* ``mock`` — deterministic offline texture generator keyed on
  (prompt, seed, size); lets the whole pipeline run with no network.
* ``file`` — plain local load.

The client performs no automatic retries; callers own the retry policy so
timing semantics stay explicit.
"""

from __future__ import annotations

import base64
import binascii
import hashlib
import os
import random
import time
from dataclasses import dataclass

import requests

from .errors import (
    AuthError,
    CorruptImageError,
    FetchError,
    MalformedBase64Error,
    RateLimitedError,
    RemoteError,
    UnsupportedFormatError,
)
from .image import RasterImage, decode_image_bytes, load_image, resize_bilinear

DEFAULT_MODEL = "dall-e-3"
DEFAULT_BASE_URL = "https://api.openai.com/v1"
DEFAULT_API_KEY_ENV = "STYLEBENCH_API_KEY"
DEFAULT_TIMEOUT = 120.0

_U64 = 0xFFFFFFFFFFFFFFFF
_NOISE_LATTICE = 17


@dataclass(frozen=True)
class GenRequest:
    """One text-to-image request; ``seed`` only matters to the mock source."""

    prompt: str
    width: int = 1024
    height: int = 1024
    model: str = DEFAULT_MODEL
    seed: int = 0

    def __post_init__(self):
        if not self.prompt:
            raise ValueError("prompt must be nonempty")
        if self.width < 16 or self.height < 16:
            raise ValueError(f"size must be at least 16x16, got {self.width}x{self.height}")


@dataclass(frozen=True)
class ClientConfig:
    """Endpoint location plus the *name* of the credential variable.

    The credential value is read from the environment at call time and never
    stored in configs or archives.
    """

    base_url: str = DEFAULT_BASE_URL
    api_key_env: str = DEFAULT_API_KEY_ENV
    timeout: float = DEFAULT_TIMEOUT


@dataclass(frozen=True)
class StyleSource:
    """Where the style image comes from: generated, mock or file."""

    kind: str
    request: GenRequest | None = None
    path: str | None = None

    def __post_init__(self):
        if self.kind in ("generated", "mock"):
            if self.request is None or self.path is not None:
                raise ValueError(f"{self.kind} source needs a request and no path")
        elif self.kind == "file":
            if self.path is None or self.request is not None:
                raise ValueError("file source needs a path and no request")
        else:
            raise ValueError(f"unknown source kind {self.kind!r}")

    @classmethod
    def generated(cls, request):
        return cls(kind="generated", request=request)

    @classmethod
    def mock(cls, request):
        return cls(kind="mock", request=request)

    @classmethod
    def file(cls, path):
        return cls(kind="file", path=str(path))


@dataclass(frozen=True)
class GenResult:
    """Acquired style image with the wall time it took to obtain it."""

    style_image: RasterImage
    acquisition_time: float
    source_kind: str


def hash64(text: str) -> int:
    """Stable 64-bit hash of a string (first 8 bytes of its SHA-256)."""
    return int.from_bytes(hashlib.sha256(text.encode("utf-8")).digest()[:8], "big")


def _palette_luts(rng):
    colors = [
        (rng.randrange(256), rng.randrange(256), rng.randrange(256)) for _ in range(4)
    ]
    luts = []
    for c in range(3):
        lut = bytearray(256)
        for v in range(256):
            t = v * 3 / 255.0
            seg = int(t)
            if seg > 2:
                seg = 2
            frac = t - seg
            a = colors[seg][c]
            b = colors[seg + 1][c]
            lut[v] = int(a + (b - a) * frac + 0.5)
        luts.append(bytes(lut))
    return luts


def mock_generate(prompt: str, seed: int = 0, width: int = 1024, height: int = 1024) -> RasterImage:
    """Deterministic procedural style texture.

    A PRNG keyed on hash64(prompt) XOR seed drives a coarse value-noise
    lattice (bilinearly upsampled to the target size) mapped through a
    4-color palette derived from the same key.  Identical (prompt, seed,
    size) triples produce identical bytes.
    """
    if width < 1 or height < 1:
        raise ValueError(f"size must be >= 1x1, got {width}x{height}")
    key = (hash64(prompt) ^ (seed & _U64)) & _U64
    rng = random.Random(key)
    luts = _palette_luts(rng)
    lattice = RasterImage(
        _NOISE_LATTICE, _NOISE_LATTICE, 1, rng.randbytes(_NOISE_LATTICE * _NOISE_LATTICE)
    )
    noise = resize_bilinear(lattice, width, height).data
    out = bytearray(width * height * 3)
    for c in range(3):
        out[c::3] = noise.translate(luts[c])
    return RasterImage(width, height, 3, bytes(out))


def decode_image_payload(payload, timeout: float = DEFAULT_TIMEOUT) -> RasterImage:
    """Decode one image payload: a base64 string, or an http(s) URL to fetch.

    Raises MalformedBase64Error for broken base64, UnsupportedFormatError
    when the decoded bytes are not PNG/JPEG, and FetchError for URL
    failures.
    """
    if isinstance(payload, str) and payload.startswith(("http://", "https://")):
        try:
            resp = requests.get(payload, timeout=timeout)
        except requests.RequestException as exc:
            raise FetchError(f"cannot fetch image URL: {exc}") from exc
        if not 200 <= resp.status_code < 300:
            raise FetchError(f"image URL answered HTTP {resp.status_code}")
        raw = resp.content
    else:
        try:
            raw = base64.b64decode(payload, validate=True)
        except (binascii.Error, ValueError, TypeError) as exc:
            raise MalformedBase64Error(f"invalid base64 image payload: {exc}") from exc
    try:
        return decode_image_bytes(raw, source="<payload>")
    except CorruptImageError as exc:
        # valid transport, but the bytes are not a supported image
        raise UnsupportedFormatError(
            f"payload did not decode as PNG or JPEG: {exc}", "<payload>"
        ) from exc


def _generate_remote(request: GenRequest, config: ClientConfig) -> RasterImage:
    key = os.environ.get(config.api_key_env)
    if not key:
        raise AuthError(
            f"credential environment variable {config.api_key_env!r} is not set"
        )
    url = config.base_url.rstrip("/") + "/images/generations"
    body = {
        "model": request.model,
        "prompt": request.prompt,
        "size": f"{request.width}x{request.height}",
        "response_format": "b64_json",
        "n": 1,
    }
    try:
        resp = requests.post(
            url,
            json=body,
            headers={"Authorization": f"Bearer {key}"},
            timeout=config.timeout,
        )
    except requests.Timeout as exc:
        raise RemoteError(f"generation request timed out after {config.timeout} s") from exc
    except requests.RequestException as exc:
        raise RemoteError(f"generation request failed: {exc}") from exc
    if resp.status_code in (401, 403):
        raise AuthError(f"endpoint rejected the credential (HTTP {resp.status_code})")
    if resp.status_code == 429:
        retry_after = None
        header = resp.headers.get("Retry-After")
        if header is not None:
            try:
                retry_after = float(header)
            except ValueError:
                retry_after = None
        raise RateLimitedError("endpoint rate-limited the request", retry_after=retry_after)
    if not 200 <= resp.status_code < 300:
        raise RemoteError(f"endpoint answered HTTP {resp.status_code}")
    try:
        data = resp.json()["data"]
        item = data[0]
    except (ValueError, KeyError, IndexError, TypeError) as exc:
        raise RemoteError(f"malformed response body: {exc}") from exc
    if isinstance(item, dict) and "b64_json" in item:
        return decode_image_payload(item["b64_json"], timeout=config.timeout)
    if isinstance(item, dict) and "url" in item:
        return decode_image_payload(item["url"], timeout=config.timeout)
    raise RemoteError("response item carries neither b64_json nor url")


def acquire_style(source: StyleSource, config: ClientConfig | None = None) -> GenResult:
    """Obtain a style image from the given source, timing the acquisition."""
    config = config or ClientConfig()
    start = time.perf_counter()
    if source.kind == "file":
        image = load_image(source.path)
    elif source.kind == "mock":
        req = source.request
        image = mock_generate(req.prompt, req.seed, req.width, req.height)
    else:
        image = _generate_remote(source.request, config)
    elapsed = time.perf_counter() - start
    return GenResult(style_image=image, acquisition_time=elapsed, source_kind=source.kind)
