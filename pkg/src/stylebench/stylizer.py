"""Pluggable style-transfer stage.

Two backends behind one ``stylize`` entry point:

* ``statistical`` — deterministic per-channel mean/stddev transfer (Reinhard
  style, straight RGB, no color-space rotation).  Runs fully offline and is
  exactly testable.
* ``external`` — adapter for a neural inference process reached either as a
  subprocess or an HTTP endpoint.  The wire contract is file-based: content
  and style PNGs in, one stylized PNG out.

Whatever the backend does, the stylized output always matches the content
image's dimensions.
"""

from __future__ import annotations

import logging
import shlex
import subprocess
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

import requests

from .errors import (
    BackendProtocolError,
    BackendTimeoutError,
    BackendUnavailableError,
    ChannelMismatchError,
    ImageError,
)
from .image import (
    RasterImage,
    channel_stats,
    decode_image_bytes,
    load_image,
    resize_bilinear,
    save_image,
)
from . import kernels

logger = logging.getLogger(__name__)

BACKENDS = ("statistical", "external")

DEFAULT_BACKEND_TIMEOUT = 60.0


@dataclass(frozen=True)
class StylizeRequest:
    """One stylization job: content + style images and backend selection.

    ``backend_options`` configures the external backend: ``command`` (a
    template with {content}/{style}/{out} placeholders), or ``endpoint``
    (HTTP URL), plus an optional ``timeout`` in seconds.
    """

    content: RasterImage
    style: RasterImage
    backend: str = "statistical"
    backend_options: dict = field(default_factory=dict)


@dataclass(frozen=True)
class StylizeResult:
    """Stylized image plus the wall time of the backend call alone."""

    stylized: RasterImage
    style_transfer_time: float
    backend_used: str


def _color_channels(img):
    return 1 if img.channels == 1 else 3


def stylize_statistical(content: RasterImage, style: RasterImage) -> RasterImage:
    """Impose the style image's per-channel mean/stddev onto the content.

    Per channel: out = clamp(round((in - mean_c) * (std_s / std_c) + mean_s)).
    A zero-variance content channel maps uniformly to the style mean (no
    division happens).  Alpha, when present on the content, passes through.
    """
    cc = _color_channels(content)
    sc = _color_channels(style)
    if cc != sc:
        raise ChannelMismatchError(
            f"content has {content.channels} channels but style has {style.channels}"
        )
    cstats = channel_stats(content)
    sstats = channel_stats(style)
    scales = []
    offsets = []
    for c in range(content.channels):
        if c >= cc:  # alpha slot: identity
            scales.append(1.0)
            offsets.append(0.0)
            continue
        c_mean = cstats.means[c]
        c_std = cstats.stddevs[c]
        s_mean = sstats.means[c]
        s_std = sstats.stddevs[c]
        if c_std == 0.0:
            scales.append(0.0)
            offsets.append(s_mean)
        else:
            k = s_std / c_std
            scales.append(k)
            offsets.append(s_mean - c_mean * k)
    out = kernels.scale_shift_u8(content.data, content.channels, scales, offsets)
    return RasterImage(content.width, content.height, content.channels, bytes(out))


def _run_subprocess_backend(command, content_path, style_path, out_path, timeout):
    try:
        argv = [
            part.format(content=str(content_path), style=str(style_path), out=str(out_path))
            for part in shlex.split(command)
        ]
    except (KeyError, IndexError, ValueError) as exc:
        raise BackendProtocolError(f"bad command template: {exc}", backend=command) from exc
    if not argv:
        raise BackendUnavailableError("empty command template", backend=command)
    start = time.perf_counter()
    try:
        proc = subprocess.run(argv, capture_output=True, timeout=timeout)
    except FileNotFoundError as exc:
        raise BackendUnavailableError(f"cannot launch: {exc}", backend=argv[0]) from exc
    except subprocess.TimeoutExpired as exc:
        raise BackendTimeoutError(f"no reply within {timeout} s", backend=argv[0]) from exc
    elapsed = time.perf_counter() - start
    if proc.returncode != 0:
        tail = proc.stderr.decode("utf-8", "replace").strip()[-300:]
        raise BackendProtocolError(
            f"exit status {proc.returncode}: {tail or 'no stderr'}", backend=argv[0]
        )
    return elapsed


def _run_http_backend(endpoint, content_path, style_path, timeout):
    files = {
        "content": ("content.png", content_path.read_bytes(), "image/png"),
        "style": ("style.png", style_path.read_bytes(), "image/png"),
    }
    start = time.perf_counter()
    try:
        resp = requests.post(endpoint, files=files, timeout=timeout)
    except requests.Timeout as exc:
        raise BackendTimeoutError(f"no reply within {timeout} s", backend=endpoint) from exc
    except requests.RequestException as exc:
        raise BackendUnavailableError(f"cannot reach endpoint: {exc}", backend=endpoint) from exc
    elapsed = time.perf_counter() - start
    if not 200 <= resp.status_code < 300:
        raise BackendProtocolError(f"HTTP {resp.status_code}", backend=endpoint)
    return elapsed, resp.content


def stylize_external(request: StylizeRequest) -> StylizeResult:
    """Invoke the configured external backend via scratch files.

    Timing covers the backend invocation only (not scratch I/O).  If the
    backend returns an image of different dimensions, it is resized to the
    content dimensions and the resize is logged.
    """
    opts = request.backend_options
    command = opts.get("command")
    endpoint = opts.get("endpoint")
    timeout = float(opts.get("timeout", DEFAULT_BACKEND_TIMEOUT))
    if not command and not endpoint:
        raise BackendUnavailableError(
            "external backend selected but no 'command' or 'endpoint' configured"
        )
    backend_id = command or endpoint
    with tempfile.TemporaryDirectory(prefix="stylebench-") as tmp:
        tmpdir = Path(tmp)
        content_path = tmpdir / "content.png"
        style_path = tmpdir / "style.png"
        out_path = tmpdir / "stylized.png"
        save_image(request.content, content_path)
        save_image(request.style, style_path)
        if command:
            elapsed = _run_subprocess_backend(command, content_path, style_path, out_path, timeout)
            try:
                stylized = load_image(out_path)
            except (FileNotFoundError, ImageError) as exc:
                raise BackendProtocolError(
                    f"backend produced no readable output image: {exc}", backend=backend_id
                ) from exc
        else:
            elapsed, body = _run_http_backend(endpoint, content_path, style_path, timeout)
            try:
                stylized = decode_image_bytes(body, source=endpoint)
            except ImageError as exc:
                raise BackendProtocolError(
                    f"reply body is not a decodable image: {exc}", backend=backend_id
                ) from exc
    if (stylized.width, stylized.height) != (request.content.width, request.content.height):
        logger.warning(
            "external backend returned %dx%d; resizing to content %dx%d",
            stylized.width,
            stylized.height,
            request.content.width,
            request.content.height,
        )
        stylized = resize_bilinear(stylized, request.content.width, request.content.height)
    return StylizeResult(stylized=stylized, style_transfer_time=elapsed, backend_used="external")


def stylize(request: StylizeRequest) -> StylizeResult:
    """Dispatch to the selected backend, timing the backend call with a
    monotonic clock."""
    if request.backend == "statistical":
        start = time.perf_counter()
        out = stylize_statistical(request.content, request.style)
        elapsed = time.perf_counter() - start
        return StylizeResult(stylized=out, style_transfer_time=elapsed, backend_used="statistical")
    if request.backend == "external":
        return stylize_external(request)
    raise ValueError(f"unknown backend {request.backend!r}; valid backends: {BACKENDS}")
