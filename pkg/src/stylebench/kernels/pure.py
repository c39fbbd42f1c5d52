"""Pure-Python numeric kernels.

Reference implementations of the hot loops: luma reduction, bilinear
resampling, channel statistics, MSE/SSIM accumulations and the per-channel
affine remap.  The compiled backend in ``_native.pyx`` mirrors every routine
operation for operation so the two backends produce bit-identical results;
keep any change here in lockstep with the .pyx file.

No input validation happens at this level; callers pass pre-checked buffers.
"""

from __future__ import annotations

import math
from array import array

BACKEND = "pure"


def luma_u8(data, width, height, channels):
    """Rec.601 luma (0.299 R + 0.587 G + 0.114 B) as float64 per pixel."""
    if channels == 1:
        return array("d", map(float, data))
    r = data[0::channels]
    g = data[1::channels]
    b = data[2::channels]
    return array(
        "d", (0.299 * rv + 0.587 * gv + 0.114 * bv for rv, gv, bv in zip(r, g, b))
    )


def resize_bilinear_u8(data, width, height, channels, new_width, new_height):
    """Bilinear resample with edge clamp; samples round half-up to 8 bit."""
    scale_x = width / new_width
    scale_y = height / new_height
    x0s = []
    x1s = []
    fxs = []
    for dx in range(new_width):
        sx = (dx + 0.5) * scale_x - 0.5
        if sx < 0.0:
            sx = 0.0
        x0 = int(sx)
        x1 = x0 + 1
        if x1 >= width:
            x1 = width - 1
        x0s.append(x0 * channels)
        x1s.append(x1 * channels)
        fxs.append(sx - x0)
    out = bytearray(new_width * new_height * channels)
    pos = 0
    for dy in range(new_height):
        sy = (dy + 0.5) * scale_y - 0.5
        if sy < 0.0:
            sy = 0.0
        y0 = int(sy)
        fy = sy - y0
        y1 = y0 + 1
        if y1 >= height:
            y1 = height - 1
        row0 = y0 * width * channels
        row1 = y1 * width * channels
        for dx in range(new_width):
            b00 = row0 + x0s[dx]
            b01 = row0 + x1s[dx]
            b10 = row1 + x0s[dx]
            b11 = row1 + x1s[dx]
            fx = fxs[dx]
            for c in range(channels):
                v = (1.0 - fy) * ((1.0 - fx) * data[b00 + c] + fx * data[b01 + c]) + fy * (
                    (1.0 - fx) * data[b10 + c] + fx * data[b11 + c]
                )
                t = math.floor(v + 0.5)
                if t < 0:
                    t = 0
                elif t > 255:
                    t = 255
                out[pos] = t
                pos += 1
    return out


def channel_sums(data, width, height, channels):
    """Per-channel (sum, sum of squares) over all pixels."""
    sums = []
    sumsqs = []
    for c in range(channels):
        s = 0.0
        ss = 0.0
        for v in data[c::channels]:
            s += v
            ss += v * v
        sums.append(s)
        sumsqs.append(ss)
    return sums, sumsqs


def mse(x, y):
    """Mean squared difference of two equal-length float64 buffers."""
    n = len(x)
    s = 0.0
    for i in range(n):
        d = x[i] - y[i]
        s += d * d
    return s / n


def global_moments(x, y):
    """Whole-buffer means, population variances and covariance."""
    n = len(x)
    sx = sy = sxx = syy = sxy = 0.0
    for i in range(n):
        a = x[i]
        b = y[i]
        sx += a
        sy += b
        sxx += a * a
        syy += b * b
        sxy += a * b
    mx = sx / n
    my = sy / n
    return mx, my, sxx / n - mx * mx, syy / n - my * my, sxy / n - mx * my


def ssim_windowed_mean(x, y, width, height, window, c1, c2):
    """Mean single-statistic SSIM over all fully contained stride-1 windows."""
    area = float(window * window)
    span_x = width - window + 1
    span_y = height - window + 1
    total = 0.0
    for ty in range(span_y):
        for tx in range(span_x):
            sx = sy = sxx = syy = sxy = 0.0
            for wy in range(window):
                base = (ty + wy) * width + tx
                for wx in range(window):
                    a = x[base + wx]
                    b = y[base + wx]
                    sx += a
                    sy += b
                    sxx += a * a
                    syy += b * b
                    sxy += a * b
            mx = sx / area
            my = sy / area
            vx = sxx / area - mx * mx
            vy = syy / area - my * my
            cov = sxy / area - mx * my
            total += ((2.0 * mx * my + c1) * (2.0 * cov + c2)) / (
                (mx * mx + my * my + c1) * (vx + vy + c2)
            )
    return total / (span_x * span_y)


def scale_shift_u8(data, channels, scales, offsets):
    """Per-channel affine remap of 8-bit samples, clamped, rounded half-up."""
    out = bytearray(len(data))
    for c in range(channels):
        k = scales[c]
        b = offsets[c]
        lut = bytearray(256)
        for v in range(256):
            t = math.floor(v * k + b + 0.5)
            if t < 0:
                t = 0
            elif t > 255:
                t = 255
            lut[v] = t
        out[c::channels] = data[c::channels].translate(bytes(lut))
    return out
