"""Full-reference quality metrics and the content/style loss diagnostic.

SSIM uses the single-statistic form

    SSIM(x, y) = (2 mx my + C1)(2 cov + C2) / ((mx^2 + my^2 + C1)(vx + vy + C2))

evaluated either over whole-plane moments (``ssim_global``, the default
reported variant) or averaged over stride-1 square windows
(``ssim_windowed``).  All statistics use the population (1/N) convention,
matching the 1/(mn) normalization of ``mse``.

A perfect-match PSNR is the ``math.inf`` sentinel; aggregation layers must
exclude it from averages rather than let it leak in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import kernels
from .errors import ChannelMismatchError, DimensionMismatchError, WindowTooLargeError
from .image import LumaPlane, RasterImage, channel_stats, resize_bilinear, to_luma

PSNR_INFINITE = math.inf

SSIM_VARIANTS = ("global", "windowed")


@dataclass(frozen=True)
class SsimParams:
    """Stabilizers C1 = (k1 L)^2, C2 = (k2 L)^2 plus the window size used by
    the windowed variant."""

    k1: float = 0.01
    k2: float = 0.03
    dynamic_range: float = 255.0
    window_size: int = 11

    def __post_init__(self):
        if self.k1 <= 0 or self.k2 <= 0:
            raise ValueError("k1 and k2 must be positive")
        if self.dynamic_range <= 0:
            raise ValueError("dynamic_range must be positive")
        if self.window_size < 3 or self.window_size % 2 == 0:
            raise ValueError("window_size must be odd and >= 3")

    @property
    def c1(self):
        return (self.k1 * self.dynamic_range) ** 2

    @property
    def c2(self):
        return (self.k2 * self.dynamic_range) ** 2


DEFAULT_SSIM_PARAMS = SsimParams()


@dataclass(frozen=True)
class LossBreakdown:
    """Weighted two-term loss; total = alpha * content_loss + beta * style_loss."""

    content_loss: float
    style_loss: float
    alpha: float
    beta: float
    total: float


@dataclass(frozen=True)
class MetricReport:
    """Similarity metrics for one (reference, candidate) pair."""

    ssim: float
    psnr: float
    mse: float
    ssim_variant: str = "global"
    loss: LossBreakdown | None = None


def _check_dims(x: LumaPlane, y: LumaPlane):
    if x.width != y.width or x.height != y.height:
        raise DimensionMismatchError(
            f"plane dimensions differ: {x.width}x{x.height} vs {y.width}x{y.height}"
        )


def mse(x: LumaPlane, y: LumaPlane) -> float:
    """Mean squared error 1/(mn) * sum of squared sample differences."""
    _check_dims(x, y)
    return kernels.mse(x.data, y.data)


def _psnr_from_mse(value, max_i):
    if value == 0.0:
        return PSNR_INFINITE
    return 10.0 * math.log10(max_i * max_i / value)


def psnr(x: LumaPlane, y: LumaPlane, max_i: float = 255.0) -> float:
    """Peak signal-to-noise ratio in dB; PSNR_INFINITE for identical planes."""
    if max_i <= 0:
        raise ValueError("max_i must be positive")
    return _psnr_from_mse(mse(x, y), max_i)


def ssim_global(x: LumaPlane, y: LumaPlane, params: SsimParams = DEFAULT_SSIM_PARAMS) -> float:
    """Single-statistic SSIM over whole-plane moments."""
    _check_dims(x, y)
    if x.width * x.height < 2:
        raise ValueError("ssim needs at least 2 pixels")
    mx, my, vx, vy, cov = kernels.global_moments(x.data, y.data)
    c1 = params.c1
    c2 = params.c2
    return ((2.0 * mx * my + c1) * (2.0 * cov + c2)) / (
        (mx * mx + my * my + c1) * (vx + vy + c2)
    )


def ssim_windowed(x: LumaPlane, y: LumaPlane, params: SsimParams = DEFAULT_SSIM_PARAMS) -> float:
    """Mean SSIM over all fully contained window_size x window_size patches
    (stride 1, uniform window)."""
    _check_dims(x, y)
    w = params.window_size
    if x.width < w or x.height < w:
        raise WindowTooLargeError(
            f"plane {x.width}x{x.height} is smaller than the {w}x{w} window"
        )
    return kernels.ssim_windowed_mean(x.data, y.data, x.width, x.height, w, params.c1, params.c2)


def metric_report(
    reference: LumaPlane,
    candidate: LumaPlane,
    params: SsimParams = DEFAULT_SSIM_PARAMS,
    variant: str = "global",
    loss: LossBreakdown | None = None,
) -> MetricReport:
    """Bundle ssim/psnr/mse for a plane pair; ``variant`` picks the SSIM flavor."""
    m = mse(reference, candidate)
    if variant == "global":
        s = ssim_global(reference, candidate, params)
    elif variant == "windowed":
        s = ssim_windowed(reference, candidate, params)
    else:
        raise ValueError(f"unknown ssim variant {variant!r}; use one of {SSIM_VARIANTS}")
    return MetricReport(
        ssim=s,
        psnr=_psnr_from_mse(m, params.dynamic_range),
        mse=m,
        ssim_variant=variant,
        loss=loss,
    )


def style_transfer_loss(
    content: RasterImage,
    style: RasterImage,
    stylized: RasterImage,
    alpha: float = 1.0,
    beta: float = 1.0,
) -> LossBreakdown:
    """Weighted diagnostic loss over a (content, style, stylized) triple.

    The content term is the luma MSE between the content image (resized to
    the stylized dimensions when they differ) and the stylized image.  The
    style term is the mean squared difference between the channel statistics
    (means and stddevs, all channels) of the style and stylized images.
    """
    if alpha < 0 or beta < 0:
        raise ValueError("alpha and beta must be >= 0")
    if style.channels != stylized.channels:
        raise ChannelMismatchError(
            f"style has {style.channels} channels but stylized has {stylized.channels}"
        )
    ref = content
    if (ref.width, ref.height) != (stylized.width, stylized.height):
        ref = resize_bilinear(ref, stylized.width, stylized.height)
    content_loss = mse(to_luma(ref), to_luma(stylized))
    ss = channel_stats(style)
    zs = channel_stats(stylized)
    diffs = []
    for c in range(style.channels):
        dm = ss.means[c] - zs.means[c]
        dsd = ss.stddevs[c] - zs.stddevs[c]
        diffs.append(dm * dm)
        diffs.append(dsd * dsd)
    style_loss = math.fsum(diffs) / len(diffs)
    total = alpha * content_loss + beta * style_loss
    return LossBreakdown(
        content_loss=content_loss, style_loss=style_loss, alpha=alpha, beta=beta, total=total
    )
