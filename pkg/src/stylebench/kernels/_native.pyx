# cython: language_level=3
# cython: boundscheck=False
# cython: wraparound=False
# cython: cdivision=True
"""Compiled numeric kernels.

Mirrors ``kernels.pure`` operation for operation (same expressions, same
accumulation order) so both backends produce bit-identical results.
"""

from libc.math cimport floor

from cpython cimport array

import array as _array

BACKEND = "native"

cdef array.array _D_TEMPLATE = _array.array("d", [])


def luma_u8(const unsigned char[::1] data, Py_ssize_t width, Py_ssize_t height,
            Py_ssize_t channels):
    """Rec.601 luma (0.299 R + 0.587 G + 0.114 B) as float64 per pixel."""
    cdef Py_ssize_t n = width * height
    cdef array.array out = array.clone(_D_TEMPLATE, n, zero=False)
    cdef double[::1] ov = out
    cdef Py_ssize_t i, j
    if channels == 1:
        for i in range(n):
            ov[i] = <double> data[i]
    else:
        for i in range(n):
            j = i * channels
            ov[i] = 0.299 * data[j] + 0.587 * data[j + 1] + 0.114 * data[j + 2]
    return out


def resize_bilinear_u8(const unsigned char[::1] data, Py_ssize_t width,
                       Py_ssize_t height, Py_ssize_t channels,
                       Py_ssize_t new_width, Py_ssize_t new_height):
    """Bilinear resample with edge clamp; samples round half-up to 8 bit."""
    cdef double scale_x = <double> width / <double> new_width
    cdef double scale_y = <double> height / <double> new_height
    out_obj = bytearray(new_width * new_height * channels)
    cdef unsigned char[::1] out = out_obj
    cdef array.array x0arr = array.clone(_D_TEMPLATE, new_width, zero=False)
    cdef array.array x1arr = array.clone(_D_TEMPLATE, new_width, zero=False)
    cdef array.array fxarr = array.clone(_D_TEMPLATE, new_width, zero=False)
    cdef double[::1] x0s = x0arr
    cdef double[::1] x1s = x1arr
    cdef double[::1] fxs = fxarr
    cdef Py_ssize_t dx, dy, c, x0, x1, y0, y1, b00, b01, b10, b11, row0, row1, pos
    cdef double sx, sy, fx, fy, v, t
    for dx in range(new_width):
        sx = (dx + 0.5) * scale_x - 0.5
        if sx < 0.0:
            sx = 0.0
        x0 = <Py_ssize_t> sx
        x1 = x0 + 1
        if x1 >= width:
            x1 = width - 1
        x0s[dx] = <double> (x0 * channels)
        x1s[dx] = <double> (x1 * channels)
        fxs[dx] = sx - <double> x0
    pos = 0
    for dy in range(new_height):
        sy = (dy + 0.5) * scale_y - 0.5
        if sy < 0.0:
            sy = 0.0
        y0 = <Py_ssize_t> sy
        fy = sy - <double> y0
        y1 = y0 + 1
        if y1 >= height:
            y1 = height - 1
        row0 = y0 * width * channels
        row1 = y1 * width * channels
        for dx in range(new_width):
            b00 = row0 + <Py_ssize_t> x0s[dx]
            b01 = row0 + <Py_ssize_t> x1s[dx]
            b10 = row1 + <Py_ssize_t> x0s[dx]
            b11 = row1 + <Py_ssize_t> x1s[dx]
            fx = fxs[dx]
            for c in range(channels):
                v = (1.0 - fy) * ((1.0 - fx) * data[b00 + c] + fx * data[b01 + c]) + fy * (
                    (1.0 - fx) * data[b10 + c] + fx * data[b11 + c]
                )
                t = floor(v + 0.5)
                if t < 0.0:
                    t = 0.0
                elif t > 255.0:
                    t = 255.0
                out[pos] = <unsigned char> t
                pos += 1
    return out_obj


def channel_sums(const unsigned char[::1] data, Py_ssize_t width,
                 Py_ssize_t height, Py_ssize_t channels):
    """Per-channel (sum, sum of squares) over all pixels."""
    cdef Py_ssize_t total_len = width * height * channels
    cdef Py_ssize_t c, i
    cdef double s, ss, v
    sums = []
    sumsqs = []
    for c in range(channels):
        s = 0.0
        ss = 0.0
        for i in range(c, total_len, channels):
            v = <double> data[i]
            s += v
            ss += v * v
        sums.append(s)
        sumsqs.append(ss)
    return sums, sumsqs


def mse(const double[::1] x, const double[::1] y):
    """Mean squared difference of two equal-length float64 buffers."""
    cdef Py_ssize_t n = x.shape[0]
    cdef double s = 0.0
    cdef double d
    cdef Py_ssize_t i
    for i in range(n):
        d = x[i] - y[i]
        s += d * d
    return s / <double> n


def global_moments(const double[::1] x, const double[::1] y):
    """Whole-buffer means, population variances and covariance."""
    cdef Py_ssize_t n = x.shape[0]
    cdef double sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0
    cdef double a, b, mx, my
    cdef Py_ssize_t i
    for i in range(n):
        a = x[i]
        b = y[i]
        sx += a
        sy += b
        sxx += a * a
        syy += b * b
        sxy += a * b
    mx = sx / <double> n
    my = sy / <double> n
    return (
        mx,
        my,
        sxx / <double> n - mx * mx,
        syy / <double> n - my * my,
        sxy / <double> n - mx * my,
    )


def ssim_windowed_mean(const double[::1] x, const double[::1] y,
                       Py_ssize_t width, Py_ssize_t height, Py_ssize_t window,
                       double c1, double c2):
    """Mean single-statistic SSIM over all fully contained stride-1 windows."""
    cdef double area = <double> (window * window)
    cdef Py_ssize_t span_x = width - window + 1
    cdef Py_ssize_t span_y = height - window + 1
    cdef double total = 0.0
    cdef double sx, sy, sxx, syy, sxy, a, b, mx, my, vx, vy, cov
    cdef Py_ssize_t tx, ty, wx, wy, base
    for ty in range(span_y):
        for tx in range(span_x):
            sx = 0.0
            sy = 0.0
            sxx = 0.0
            syy = 0.0
            sxy = 0.0
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
    return total / <double> (span_x * span_y)


def scale_shift_u8(const unsigned char[::1] data, Py_ssize_t channels,
                   scales, offsets):
    """Per-channel affine remap of 8-bit samples, clamped, rounded half-up."""
    cdef Py_ssize_t n = data.shape[0]
    out_obj = bytearray(n)
    cdef unsigned char[::1] out = out_obj
    cdef unsigned char lut[256]
    cdef double k, b, t
    cdef Py_ssize_t c, i
    cdef int v
    for c in range(channels):
        k = <double> scales[c]
        b = <double> offsets[c]
        for v in range(256):
            t = floor(v * k + b + 0.5)
            if t < 0.0:
                lut[v] = 0
            elif t > 255.0:
                lut[v] = 255
            else:
                lut[v] = <unsigned char> t
        for i in range(c, n, channels):
            out[i] = lut[data[i]]
    return out_obj
