#!/usr/bin/env python3
"""Regenerate the committed test fixture images (deterministic patterns)."""

from pathlib import Path

from stylebench.image import RasterImage, save_image

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def red_2x2():
    return RasterImage(2, 2, 3, bytes([255, 0, 0]) * 4)


def content_64x48():
    # smooth two-axis gradient with a diagonal band: non-constant variance
    # on every channel, full 0..255 range
    w, h = 64, 48
    data = bytearray()
    for y in range(h):
        for x in range(w):
            r = x * 255 // (w - 1)
            g = y * 255 // (h - 1)
            b = 255 if (x + y) % 16 < 8 else 64
            data += bytes((r, g, b))
    return RasterImage(w, h, 3, bytes(data))


def style_32x32():
    # mid-range palette (keeps statistical transfer away from clamping)
    w = h = 32
    data = bytearray()
    for y in range(h):
        for x in range(w):
            r = 96 + (x % 8) * 12
            g = 80 + (y % 8) * 14
            b = 120 + ((x * y) % 7) * 10
            data += bytes((r, g, b))
    return RasterImage(w, h, 3, bytes(data))


def main():
    FIXTURES.mkdir(parents=True, exist_ok=True)
    save_image(red_2x2(), FIXTURES / "red_2x2.png")
    save_image(content_64x48(), FIXTURES / "content_64x48.png")
    save_image(style_32x32(), FIXTURES / "style_32x32.png")
    print(f"fixtures written to {FIXTURES}")


if __name__ == "__main__":
    main()
