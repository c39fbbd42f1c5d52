"""Shared test helpers: independent metric oracles and fixture builders.

The oracles deliberately take different code paths from the library kernels
(two-pass central moments, per-patch numpy recomputation, scalar bilinear
formula) so agreement is meaningful.
"""

from __future__ import annotations

import math
from array import array
from fractions import Fraction

import numpy as np

from stylebench.bench import ExperimentResult, RunResult, TimingRecord, aggregate
from stylebench.image import LumaPlane, RasterImage
from stylebench.metrics import MetricReport


# ---------------------------------------------------------------- builders

def random_raster(rng, width, height, channels=3, lo=0, hi=255):
    data = bytes(rng.randint(lo, hi) for _ in range(width * height * channels))
    return RasterImage(width, height, channels, data)


def random_plane(rng, width, height, lo=0.0, hi=255.0):
    return LumaPlane(width, height, array("d", (rng.uniform(lo, hi) for _ in range(width * height))))


def int_plane(rng, width, height, lo=0, hi=255):
    return LumaPlane(width, height, array("d", (float(rng.randint(lo, hi)) for _ in range(width * height))))


def const_plane(width, height, value):
    return LumaPlane(width, height, array("d", [float(value)] * (width * height)))


def plane_of(width, height, values):
    return LumaPlane(width, height, array("d", [float(v) for v in values]))


# ----------------------------------------------------------------- oracles

def oracle_mse(x: LumaPlane, y: LumaPlane) -> float:
    acc = 0.0
    for row in range(x.height):
        for col in range(x.width):
            i = row * x.width + col
            d = x.data[i] - y.data[i]
            acc += d * d
    return acc / (x.width * x.height)


def oracle_psnr(x: LumaPlane, y: LumaPlane, max_i=255.0) -> float:
    m = oracle_mse(x, y)
    if m == 0.0:
        return math.inf
    return 10.0 * math.log10(max_i**2 / m)


def _central_moments(xs, ys):
    # two-pass: means first, then centered sums (different algorithm from
    # the kernels' single-pass E[x^2] - mu^2 form)
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    vx = sum((a - mx) ** 2 for a in xs) / n
    vy = sum((b - my) ** 2 for b in ys) / n
    cov = sum((a - mx) * (b - my) for a, b in zip(xs, ys)) / n
    return mx, my, vx, vy, cov


def oracle_ssim_global(x: LumaPlane, y: LumaPlane, c1=6.5025, c2=58.5225) -> float:
    mx, my, vx, vy, cov = _central_moments(list(x.data), list(y.data))
    return ((2 * mx * my + c1) * (2 * cov + c2)) / ((mx**2 + my**2 + c1) * (vx + vy + c2))


def oracle_ssim_windowed(x: LumaPlane, y: LumaPlane, window=11, c1=6.5025, c2=58.5225) -> float:
    ax = np.asarray(x.data, dtype=np.float64).reshape(x.height, x.width)
    ay = np.asarray(y.data, dtype=np.float64).reshape(y.height, y.width)
    values = []
    for top in range(x.height - window + 1):
        for left in range(x.width - window + 1):
            px = ax[top : top + window, left : left + window]
            py = ay[top : top + window, left : left + window]
            mx = px.mean()
            my = py.mean()
            vx = ((px - mx) ** 2).mean()
            vy = ((py - my) ** 2).mean()
            cov = ((px - mx) * (py - my)).mean()
            values.append(
                ((2 * mx * my + c1) * (2 * cov + c2)) / ((mx**2 + my**2 + c1) * (vx + vy + c2))
            )
    return float(np.mean(values))


def oracle_bilinear_exact(img: RasterImage, new_width, new_height, dx, dy, c) -> Fraction:
    """Exact rational bilinear value of one output sample (pixel-center
    mapping, edge clamp), before rounding."""
    half = Fraction(1, 2)
    sx = max(Fraction(2 * dx + 1, 2) * Fraction(img.width, new_width) - half, Fraction(0))
    sy = max(Fraction(2 * dy + 1, 2) * Fraction(img.height, new_height) - half, Fraction(0))
    x0 = math.floor(sx)
    y0 = math.floor(sy)
    x1 = min(x0 + 1, img.width - 1)
    y1 = min(y0 + 1, img.height - 1)
    fx = sx - x0
    fy = sy - y0

    def sample(px, py):
        return img.data[(py * img.width + px) * img.channels + c]

    return (
        sample(x0, y0) * (1 - fx) * (1 - fy)
        + sample(x1, y0) * fx * (1 - fy)
        + sample(x0, y1) * (1 - fx) * fy
        + sample(x1, y1) * fx * fy
    )


def oracle_bilinear_value(img: RasterImage, new_width, new_height, dx, dy, c) -> int:
    """Half-up rounded, clamped oracle sample."""
    value = oracle_bilinear_exact(img, new_width, new_height, dx, dy, c)
    return min(255, max(0, math.floor(value + Fraction(1, 2))))


def assert_resize_matches_oracle(img: RasterImage, out: RasterImage):
    """Every output sample must equal the exact rational oracle, except when
    the exact value sits essentially on a rounding boundary, where the
    kernel's float arithmetic may legitimately land one step away."""
    boundary = Fraction(1, 10**9)
    for dy in range(out.height):
        for dx in range(out.width):
            for c in range(img.channels):
                got = out.data[(dy * out.width + dx) * img.channels + c]
                exact = oracle_bilinear_exact(img, out.width, out.height, dx, dy, c)
                expected = min(255, max(0, math.floor(exact + Fraction(1, 2))))
                distance_to_half = abs(exact - (math.floor(exact) + Fraction(1, 2)))
                if distance_to_half > boundary:
                    assert got == expected, (dx, dy, c, float(exact))
                else:
                    assert abs(got - expected) <= 1, (dx, dy, c, float(exact))


def oracle_channel_stats(img: RasterImage):
    arr = np.frombuffer(img.data, dtype=np.uint8).reshape(-1, img.channels).astype(np.float64)
    return arr.mean(axis=0), arr.std(axis=0)


# ------------------------------------------------------- archive fixtures

def fixture_run(index, acquisition, style_transfer, total, ssim, psnr, mse=100.0, digest=None):
    return RunResult(
        run_index=index,
        timing=TimingRecord(acquisition, style_transfer, total),
        metrics=MetricReport(ssim=ssim, psnr=psnr, mse=mse),
        style_image_digest=digest or f"sha256:{index:064x}",
    )


def reference_mean_experiments():
    """Two fixture arms with known aggregate means (SSIM 0.64/0.37, PSNR
    8.66/6.59 dB, totals 18.62/20.67 s).  Per-run segment values are
    arbitrary; only the means matter to the tests that use this."""
    with_runs = [
        fixture_run(i, 12.0, 5.5, 18.62, 0.64, 8.66, digest=f"sha256:{'a' * 63}{i}")
        for i in range(5)
    ]
    without_runs = [
        fixture_run(i, 15.0, 4.4, 20.67, 0.37, 6.59, digest=f"sha256:{'b' * 63}{i}")
        for i in range(5)
    ]
    snapshot = {"ssim_variant": "global", "trials": 5}
    return [
        ExperimentResult(
            arm="with_generation",
            config_snapshot=dict(snapshot, arm="with_generation"),
            runs=with_runs,
            aggregate=aggregate(with_runs),
        ),
        ExperimentResult(
            arm="without_generation",
            config_snapshot=dict(snapshot, arm="without_generation"),
            runs=without_runs,
            aggregate=aggregate(without_runs),
        ),
    ]
