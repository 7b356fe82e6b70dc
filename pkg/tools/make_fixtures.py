#!/usr/bin/env python3
"""Regenerate the PGM test fixtures under fixtures/."""
import sys
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT))

from pgm_io import ImageBuffer, write_pgm  # noqa: E402

FIXTURES = ROOT / "fixtures"


def build_image(width, height, pixel):
    y, x = np.mgrid[0:height, 0:width]
    return ImageBuffer(samples=(pixel(x, y) % 256).astype(np.uint8))


def main():
    FIXTURES.mkdir(exist_ok=True)
    images = {
        "gradient8.pgm": build_image(8, 8, lambda x, y: (x + y) * 16),
        "pattern24x16.pgm": build_image(24, 16, lambda x, y: x * 9 + y * 5 + (x * y) % 31),
        "odd9x9.pgm": build_image(9, 9, lambda x, y: x * 28 + y * 3),
        "black16.pgm": build_image(16, 16, lambda x, y: x * 0),
    }
    for name, image in images.items():
        write_pgm(FIXTURES / name, image)
        print(f"Wrote {name} ({image.width}x{image.height})")
    print("Done.")


if __name__ == "__main__":
    main()
