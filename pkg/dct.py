"""
8-point DCT-II built from CORDIC-generated cosines: coefficient error reports,
8x8 matrices, 2-D block transforms and the blockwise image round trip.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from cordic_core import EngineConfig
from errors import UsageError
from functions import sin_cos

logger = logging.getLogger(__name__)

BLOCK = 8
LABELS = "abcdefg"
LEVEL_SHIFT = 128


@dataclass(frozen=True)
class DctAngleSet:
    """k*pi/16 for k = 1..7 labelled a..g; d is 45 degrees."""
    angles: Tuple[Tuple[str, float], ...] = tuple((label, k * math.pi / 16) for k, label in enumerate(LABELS, start=1))

    def as_dict(self) -> Dict[str, float]:
        return dict(self.angles)

    def degrees(self, label: str) -> float:
        return math.degrees(self.as_dict()[label])


@dataclass(frozen=True)
class CoefficientRow:
    label: str
    angle: float
    approx: float
    exact: float

    @property
    def percent_error(self) -> float:
        return abs(self.approx - self.exact) / abs(self.exact) * 100.0


@dataclass
class CoefficientReport:
    variant: str
    config_snapshot: str
    rows: List[CoefficientRow] = field(default_factory=list)
    quantized: bool = False

    def values(self) -> Dict[str, float]:
        return {row.label: row.approx for row in self.rows}

    def percent_errors(self) -> Dict[str, float]:
        return {row.label: row.percent_error for row in self.rows}

    def max_relative_error(self) -> float:
        return max(row.percent_error for row in self.rows) / 100.0


def dct_coefficients(variant: str, config: Optional[EngineConfig] = None, quantized: bool = False,
                     angle_set: Optional[DctAngleSet] = None) -> CoefficientReport:
    """
    cos(k*pi/16) for the seven DCT angles through the chosen variant.

    Args:
        variant: registered variant name ("exact" gives the reference column)
        config: engine configuration; its snapshot is stored on the report
        quantized: report output words instead of the pre-quantization values

    Returns:
        CoefficientReport with one row per label a..g
    """
    config = config or EngineConfig()
    angle_set = angle_set or DctAngleSet()
    report = CoefficientReport(variant=variant, config_snapshot=config.snapshot(), quantized=quantized)
    for label, angle in angle_set.angles:
        result = sin_cos(angle, config, variant)
        approx = result.values["cos"] if quantized else result.prequant["cos"]
        report.rows.append(CoefficientRow(label=label, angle=angle, approx=approx, exact=math.cos(angle)))
    logger.debug(f"DCT coefficients for {variant}: {report.percent_errors()}")
    return report


@dataclass(frozen=True)
class DctMatrix8:
    matrix: np.ndarray
    source: str = "exact"

    def orthogonality_error(self) -> float:
        """max |C*C^T - I|."""
        return float(np.max(np.abs(self.matrix @ self.matrix.T - np.eye(BLOCK))))


def _cosine_entry(coefficients: Dict[int, float], m: int) -> float:
    """cos(m*pi/16) from the seven coefficients by symmetry."""
    m %= 32
    if m > 16:
        m = 32 - m
    if m <= 8:
        return coefficients[m]
    return -coefficients[16 - m]


def build_matrix(report: Optional[CoefficientReport] = None) -> DctMatrix8:
    """C[i][j] = c(i)*cos((2j+1)*i*pi/16); None builds the exact orthonormal matrix."""
    if report is None:
        coefficients = {k: math.cos(k * math.pi / 16) for k in range(1, 8)}
        source = "exact"
    else:
        values = report.values()
        missing = [label for label in LABELS if label not in values]
        if missing:
            raise UsageError(f"coefficient report is missing labels {missing}")
        coefficients = {k: values[label] for k, label in enumerate(LABELS, start=1)}
        source = report.variant
    coefficients[8] = 0.0

    matrix = np.empty((BLOCK, BLOCK), dtype=np.float64)
    matrix[0, :] = 1.0 / math.sqrt(BLOCK)
    for i in range(1, BLOCK):
        for j in range(BLOCK):
            matrix[i, j] = 0.5 * _cosine_entry(coefficients, (2 * j + 1) * i)
    return DctMatrix8(matrix=matrix, source=source)


def transform_2d(block: np.ndarray, m: DctMatrix8, direction: str = "forward") -> np.ndarray:
    """forward = M.B.M^T, inverse = M^T.B.M; accepts a stack of blocks in the last two axes."""
    block = np.asarray(block, dtype=np.float64)
    if block.shape[-2:] != (BLOCK, BLOCK):
        raise UsageError(f"transform_2d takes {BLOCK}x{BLOCK} blocks, got shape {block.shape}")
    if direction == "forward":
        return m.matrix @ block @ m.matrix.T
    if direction == "inverse":
        return m.matrix.T @ block @ m.matrix
    raise UsageError(f"Unknown transform direction '{direction}', expected forward or inverse")


class BlockTransformer:
    """Forward with one matrix, inverse with another, over every 8x8 block of an image."""

    def __init__(self, forward: DctMatrix8, inverse: Optional[DctMatrix8] = None):
        """
        Args:
            forward: matrix for the forward transform (usually a variant's)
            inverse: matrix for the inverse; defaults to the exact matrix
        """
        self.forward = forward
        self.inverse = inverse or build_matrix()

    @staticmethod
    def to_blocks(samples: np.ndarray) -> np.ndarray:
        height, width = samples.shape
        if height % BLOCK or width % BLOCK:
            raise UsageError(f"image {width}x{height} is not padded to {BLOCK}-pixel blocks")
        return samples.reshape(height // BLOCK, BLOCK, width // BLOCK, BLOCK).swapaxes(1, 2)

    @staticmethod
    def from_blocks(blocks: np.ndarray) -> np.ndarray:
        rows, cols = blocks.shape[:2]
        return blocks.swapaxes(1, 2).reshape(rows * BLOCK, cols * BLOCK)

    def round_trip(self, samples: np.ndarray) -> np.ndarray:
        """
        Level shift, forward, inverse, round and clamp back to 8 bits.

        Args:
            samples: 2-D uint8 array with both sides multiples of 8

        Returns:
            Reconstructed uint8 array of the same shape
        """
        blocks = self.to_blocks(np.asarray(samples, dtype=np.float64) - LEVEL_SHIFT)
        coefficients = transform_2d(blocks, self.forward, "forward")
        restored = transform_2d(coefficients, self.inverse, "inverse")
        pixels = np.clip(np.rint(self.from_blocks(restored) + LEVEL_SHIFT), 0, 255)
        return pixels.astype(np.uint8)
