import logging

import numpy as np
import pytest

from errors import PgmFormatError, UnsupportedFormatError
from pgm_io import ImageBuffer, PgmParser, encode_pgm, read_pgm, write_pgm


def test_read_gradient_fixture(fixtures_dir):
    image = read_pgm(fixtures_dir / "gradient8.pgm")
    assert (image.width, image.height, image.maxval) == (8, 8, 255)
    assert image.samples[0, 0] == 0
    assert image.samples[7, 7] == 224
    assert image.samples[2, 5] == 112


def test_read_pattern_fixture(fixtures_dir):
    image = read_pgm(fixtures_dir / "pattern24x16.pgm")
    assert image.samples.shape == (16, 24)
    x, y = 10, 3
    assert image.samples[y, x] == (x * 9 + y * 5 + (x * y) % 31) % 256


def test_header_with_comments_and_odd_whitespace():
    data = b"P5\n# made by hand\n3  2\n# maxval next\n255\t" + bytes(range(6))
    image = PgmParser(data).parse()
    assert image.samples.tolist() == [[0, 1, 2], [3, 4, 5]]


def test_write_then_read(tmp_path):
    samples = np.arange(12, dtype=np.uint8).reshape(3, 4) * 20
    path = tmp_path / "out.pgm"
    write_pgm(path, ImageBuffer(samples=samples))
    assert path.read_bytes().startswith(b"P5\n4 3\n255\n")
    assert np.array_equal(read_pgm(path).samples, samples)


def test_encode_header_uses_maxval():
    image = ImageBuffer(samples=np.zeros((1, 2), dtype=np.uint8), maxval=100)
    assert encode_pgm(image) == b"P5\n2 1\n100\n\x00\x00"


def test_ascii_pgm_is_unsupported():
    with pytest.raises(UnsupportedFormatError):
        PgmParser(b"P2\n2 2\n255\n0 0 0 0\n").parse()


def test_sixteen_bit_pgm_is_unsupported():
    with pytest.raises(UnsupportedFormatError):
        PgmParser(b"P5\n1 1\n65535\n\x00\x00").parse()


def test_missing_magic():
    with pytest.raises(PgmFormatError) as exc:
        PgmParser(b"GIF89a").parse()
    assert exc.value.offset == 0
    assert not isinstance(exc.value, UnsupportedFormatError)


def test_truncated_payload_reports_offset():
    data = b"P5\n4 4\n255\n" + bytes(10)
    with pytest.raises(PgmFormatError) as exc:
        PgmParser(data).parse()
    assert exc.value.offset == len(data)
    assert "truncated" in str(exc.value)


def test_missing_dimension():
    with pytest.raises(PgmFormatError) as exc:
        PgmParser(b"P5\n4 \n").parse()
    assert "height" in str(exc.value)


def test_empty_image_rejected():
    with pytest.raises(PgmFormatError):
        PgmParser(b"P5\n0 4\n255\n").parse()


def test_trailing_bytes_are_ignored_with_a_warning(caplog):
    data = b"P5\n2 1\n255\n\x01\x02extra"
    with caplog.at_level(logging.WARNING):
        image = PgmParser(data).parse()
    assert image.samples.tolist() == [[1, 2]]
    assert "trailing" in caplog.text


def test_pad_and_crop(fixtures_dir):
    image = read_pgm(fixtures_dir / "odd9x9.pgm")
    padded = image.pad_to_blocks()
    assert padded.samples.shape == (16, 16)
    assert padded.original_size == (9, 9)
    assert padded.padded
    assert np.array_equal(padded.samples[:9, 15], image.samples[:, 8])
    assert np.array_equal(padded.samples[15, :9], image.samples[8, :])
    cropped = padded.crop()
    assert np.array_equal(cropped.samples, image.samples)
    assert cropped.original_size is None


def test_pad_is_a_no_op_on_block_multiples(fixtures_dir):
    image = read_pgm(fixtures_dir / "pattern24x16.pgm")
    padded = image.pad_to_blocks()
    assert not padded.padded
    assert np.array_equal(padded.samples, image.samples)


def test_image_buffer_must_be_2d():
    with pytest.raises(PgmFormatError):
        ImageBuffer(samples=np.zeros(8, dtype=np.uint8))
