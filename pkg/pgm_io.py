"""
PGM (P5, 8-bit) reader/writer and the ImageBuffer the image pipeline works on.
"""

import logging
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np

from errors import PgmFormatError, UnsupportedFormatError

logger = logging.getLogger(__name__)

_WHITESPACE = b" \t\n\r\v\f"


@dataclass(frozen=True)
class ImageBuffer:
    """Row-major 8-bit grayscale samples; `original_size` is (width, height) before padding."""
    samples: np.ndarray
    maxval: int = 255
    original_size: Optional[Tuple[int, int]] = None

    def __post_init__(self):
        if self.samples.ndim != 2:
            raise PgmFormatError(f"image samples must be 2-D, got shape {self.samples.shape}")

    @property
    def width(self) -> int:
        return int(self.samples.shape[1])

    @property
    def height(self) -> int:
        return int(self.samples.shape[0])

    @property
    def padded(self) -> bool:
        return self.original_size is not None and self.original_size != (self.width, self.height)

    def pad_to_blocks(self, block: int = 8) -> "ImageBuffer":
        """Edge-replicate right and bottom so both sides are multiples of `block`."""
        pad_h = -self.height % block
        pad_w = -self.width % block
        padded = np.pad(self.samples, ((0, pad_h), (0, pad_w)), mode="edge")
        return replace(self, samples=padded, original_size=self.original_size or (self.width, self.height))

    def crop(self) -> "ImageBuffer":
        if self.original_size is None:
            return self
        width, height = self.original_size
        return replace(self, samples=self.samples[:height, :width].copy(), original_size=None)

    def with_samples(self, samples: np.ndarray) -> "ImageBuffer":
        return replace(self, samples=samples)


class PgmParser:
    """Parser for binary PGM files, one image per file."""

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def _skip_whitespace_and_comments(self):
        data = self.data
        while self.pos < len(data):
            byte = data[self.pos:self.pos + 1]
            if byte == b"#":
                end = data.find(b"\n", self.pos)
                self.pos = len(data) if end < 0 else end + 1
            elif byte in _WHITESPACE:
                self.pos += 1
            else:
                return

    def _read_int(self, what: str) -> int:
        self._skip_whitespace_and_comments()
        start = self.pos
        while self.pos < len(self.data) and self.data[self.pos:self.pos + 1].isdigit():
            self.pos += 1
        if start == self.pos:
            raise PgmFormatError(f"expected {what}", offset=start)
        return int(self.data[start:self.pos])

    def parse(self) -> ImageBuffer:
        magic = self.data[:2]
        if magic != b"P5":
            if magic[:1] == b"P":
                raise UnsupportedFormatError(f"unsupported netpbm type {magic.decode('ascii', 'replace')}, only P5")
            raise PgmFormatError("missing PGM magic number", offset=0)
        self.pos = 2
        width = self._read_int("width")
        height = self._read_int("height")
        maxval = self._read_int("maxval")
        if width == 0 or height == 0:
            raise PgmFormatError(f"empty image {width}x{height}", offset=self.pos)
        if not 0 < maxval <= 255:
            raise UnsupportedFormatError(f"maxval {maxval} not supported, need 1..255", offset=self.pos)
        if self.pos >= len(self.data) or self.data[self.pos:self.pos + 1] not in _WHITESPACE:
            raise PgmFormatError("expected a single whitespace byte after maxval", offset=self.pos)
        self.pos += 1

        count = width * height
        payload = self.data[self.pos:self.pos + count]
        if len(payload) < count:
            raise PgmFormatError(
                f"truncated payload: need {count} bytes, found {len(payload)}", offset=len(self.data)
            )
        extra = len(self.data) - (self.pos + count)
        if extra:
            logger.warning(f"Ignoring {extra} trailing bytes after the PGM payload")
        samples = np.frombuffer(payload, dtype=np.uint8).reshape(height, width).copy()
        return ImageBuffer(samples=samples, maxval=maxval)


def read_pgm(path: Union[str, Path]) -> ImageBuffer:
    data = Path(path).read_bytes()
    image = PgmParser(data).parse()
    logger.debug(f"Read {path}: {image.width}x{image.height}, maxval {image.maxval}")
    return image


def encode_pgm(image: ImageBuffer) -> bytes:
    header = f"P5\n{image.width} {image.height}\n{image.maxval}\n".encode("ascii")
    return header + np.ascontiguousarray(image.samples, dtype=np.uint8).tobytes()


def write_pgm(path: Union[str, Path], image: ImageBuffer):
    Path(path).write_bytes(encode_pgm(image))
    logger.info(f"Wrote {path} ({image.width}x{image.height})")
