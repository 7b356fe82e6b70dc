"""
Comparison harness behind the cordic-kit commands: function evaluation with
reference errors, angle sweeps, DCT coefficient tables and the image pipeline
with MSE/PSNR metrics.

Every cmd_* returns an exit code and writes data to stdout or `out`; logs go to stderr.
"""

import csv
import io
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from cordic_core import EngineConfig, OpCount, Status
from dct import BlockTransformer, CoefficientReport, DctAngleSet, build_matrix, dct_coefficients
from errors import UsageError
from fixnum import ANGLE_WORD, FixedWord
from functions import Function, FunctionRequest, evaluate, recipe_snapshot, reference, sin_cos
from pgm_io import ImageBuffer, read_pgm, write_pgm
from variants import VARIANTS, get_variant, lob_detect

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_BUDGET = 2
EXIT_IO = 3

# Argument positions given in degrees on the command line.
ANGLE_ARGS = {Function.SIN_COS: (0,), Function.TAN: (0,), Function.POLAR_TO_RECT: (1,)}
ANGLE_OUTPUTS = {"angle", "phase"}

COMPARE_COLUMNS = ["variant", "angle_deg", "cos_err", "sin_err", "adds", "shifts", "multiplies", "iterations"]
IMAGE_COLUMNS = ["variant", "mse", "psnr", "adds", "shifts", "multiplies", "iterations"]


# ---------- metrics ----------

def mse(reference_samples: np.ndarray, test_samples: np.ndarray) -> float:
    if reference_samples.shape != test_samples.shape:
        raise UsageError(f"image shapes differ: {reference_samples.shape} vs {test_samples.shape}")
    diff = reference_samples.astype(np.float64) - test_samples.astype(np.float64)
    return float(np.mean(diff * diff))


def psnr(mse_value: float, peak: int = 255) -> float:
    """10*log10(peak^2 / mse); +inf when the images are identical."""
    if mse_value == 0:
        return math.inf
    return 10.0 * math.log10(peak * peak / mse_value)


def format_psnr(value: float) -> str:
    return "inf" if math.isinf(value) else f"{value:.4f}"


@dataclass
class MetricsReport:
    variant: str
    mse: float
    psnr: float
    ops: OpCount = field(default_factory=OpCount)

    def row(self) -> List[str]:
        return [self.variant, f"{self.mse:.6f}", format_psnr(self.psnr), str(self.ops.adds),
                str(self.ops.shifts), str(self.ops.multiplies), str(self.ops.iterations)]


# ---------- output ----------

def emit(text: str, out: Optional[str] = None):
    """Data goes to `out` when given, stdout otherwise; LF line endings either way."""
    if out:
        with open(out, "w", newline="\n", encoding="utf-8") as handle:
            handle.write(text)
        logger.info(f"Wrote {out}")
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def csv_text(header: Sequence[str], rows: Sequence[Sequence[str]], preamble: Sequence[str] = ()) -> str:
    buffer = io.StringIO()
    for line in preamble:
        buffer.write(f"# {line}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def markdown_table(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    lines = ["| " + " | ".join(header) + " |", "|" + "|".join("---" for _ in header) + "|"]
    lines.extend("| " + " | ".join(row) + " |" for row in rows)
    return "\n".join(lines) + "\n"


def _fmt(value: float) -> str:
    return f"{value:.6e}"


def _ops_cells(ops: OpCount) -> List[str]:
    return [str(ops.adds), str(ops.shifts), str(ops.multiplies), str(ops.iterations)]


# ---------- compute ----------

def cmd_compute(function_name: str, args: Sequence[float], variant: str, config: EngineConfig,
                as_csv: bool = False, out: Optional[str] = None) -> int:
    """Evaluate one function and print value, reference and error per output."""
    function = Function.parse(function_name)
    api_args = list(args)
    for position in ANGLE_ARGS.get(function, ()):
        if position < len(api_args):
            api_args[position] = math.radians(api_args[position])
    request = FunctionRequest(function=function, args=tuple(api_args), config=config, variant=variant)
    result = evaluate(request)
    expected = reference(function, request.args)

    rows = []
    for name, value in result.values.items():
        ref = expected[name]
        if name in ANGLE_OUTPUTS:
            value, ref = math.degrees(value), math.degrees(ref)
        rows.append([name, f"{value:.6f}", f"{ref:.6f}", _fmt(abs(value - ref))])
    header = ["output", "value", "reference", "error"]
    preamble = [f"{function.value} {' '.join(str(a) for a in args)} variant={variant}",
                recipe_snapshot(function, config),
                f"status={result.status.value} " + " ".join(f"{k}={v}" for k, v in result.ops.as_dict().items())]
    if as_csv:
        emit(csv_text(header, rows, preamble), out)
    else:
        emit("\n".join(preamble) + "\n" + markdown_table(header, rows), out)

    if result.status is Status.BUDGET_EXHAUSTED:
        logger.warning(f"{function.value} did not converge within {config.max_iterations} iterations")
        return EXIT_BUDGET
    return EXIT_OK


# ---------- compare ----------

def parse_sweep(text: str) -> List[float]:
    """START:STOP:COUNT in degrees, endpoints included."""
    try:
        start, stop, count = text.split(":")
        start_deg, stop_deg, n = float(start), float(stop), int(count)
    except ValueError:
        raise UsageError(f"Cannot parse sweep '{text}', expected START:STOP:COUNT such as -90:90:256")
    if n < 1:
        raise UsageError(f"sweep needs at least one angle, got {n}")
    return [float(a) for a in np.linspace(start_deg, stop_deg, n)]


def sweep_rows(variants: Sequence[str], angles_deg: Sequence[float], config: EngineConfig) -> List[List[str]]:
    rows = []
    for name in variants:
        get_variant(name)
        exhausted = 0
        for angle in angles_deg:
            theta = math.radians(angle)
            result = sin_cos(theta, config, name)
            cos_pre, sin_pre = result.prequant["cos"], result.prequant["sin"]
            if result.status is Status.BUDGET_EXHAUSTED:
                exhausted += 1
            rows.append([name, f"{angle:.6f}", _fmt(abs(cos_pre - math.cos(theta))),
                         _fmt(abs(sin_pre - math.sin(theta)))] + _ops_cells(result.ops))
        if exhausted:
            logger.warning(f"{name}: {exhausted} of {len(angles_deg)} angles exhausted the budget")
        logger.info(f"Compared {name} over {len(angles_deg)} angles")
    return rows


def cmd_compare(angles_deg: Sequence[float], variants: Sequence[str], config: EngineConfig,
                out: Optional[str] = None) -> int:
    """CSV of pre-quantization cos/sin errors and op counts per (variant, angle)."""
    rows = sweep_rows(variants, angles_deg, config)
    emit(csv_text(COMPARE_COLUMNS, rows), out)
    return EXIT_OK


# ---------- dct-table ----------

def dct_reports(variants: Sequence[str], config: EngineConfig, quantized: bool = False) -> List[CoefficientReport]:
    return [dct_coefficients(name, config, quantized=quantized) for name in variants]


def cmd_dct_table(variants: Sequence[str], config: EngineConfig, quantized: bool = False,
                  as_csv: bool = False, out: Optional[str] = None) -> int:
    """Percent error of each DCT coefficient a..g per variant."""
    for name in variants:
        get_variant(name)
    reports = dct_reports(variants, config, quantized)
    angle_set = DctAngleSet()
    header = ["label", "angle_deg"] + list(variants)
    rows = []
    for index, (label, _) in enumerate(angle_set.angles):
        cells = [label, f"{angle_set.degrees(label):.2f}"]
        cells.extend(_fmt(report.rows[index].percent_error) for report in reports)
        rows.append(cells)
    kind = "after output quantization" if quantized else "before output quantization"
    preamble = [f"config: {config.snapshot()}", f"percent error {kind}"]
    if as_csv:
        emit(csv_text(header, rows, preamble), out)
    else:
        emit("\n".join(preamble) + "\n" + markdown_table(header, rows), out)
    return EXIT_OK


# ---------- image ----------

def _coefficient_ops(report_variant: str, config: EngineConfig) -> OpCount:
    total = OpCount()
    for _, angle in DctAngleSet().angles:
        total = total + sin_cos(angle, config, report_variant).ops
    return total


def image_metrics(image: ImageBuffer, variant: str, config: EngineConfig,
                  approximate_inverse: bool = False) -> Tuple[MetricsReport, ImageBuffer]:
    """Blockwise forward (variant matrix) then inverse (exact unless asked otherwise)."""
    matrix = build_matrix(dct_coefficients(variant, config))
    transformer = BlockTransformer(matrix, matrix if approximate_inverse else None)
    padded = image.pad_to_blocks()
    restored = padded.with_samples(transformer.round_trip(padded.samples)).crop()
    error = mse(image.samples, restored.samples)
    report = MetricsReport(variant=variant, mse=error, psnr=psnr(error), ops=_coefficient_ops(variant, config))
    return report, restored


def cmd_image(input_path: str, variants: Sequence[str], config: EngineConfig,
              out_dir: Optional[str] = None, approximate_inverse: bool = False,
              out: Optional[str] = None) -> int:
    """Reconstruct `input_path` per variant, write `<stem>.<variant>.pgm` and a metrics CSV."""
    for name in variants:
        get_variant(name)
    source = Path(input_path)
    image = read_pgm(source)
    target_dir = Path(out_dir) if out_dir else source.parent

    with ThreadPoolExecutor(max_workers=max(1, len(variants))) as pool:
        futures = [pool.submit(image_metrics, image, name, config, approximate_inverse) for name in variants]
        results = [f.result() for f in futures]

    rows = []
    for name, (report, restored) in zip(variants, results):
        write_pgm(target_dir / f"{source.stem}.{name}.pgm", restored)
        logger.info(f"{name}: MSE {report.mse:.6f}, PSNR {format_psnr(report.psnr)} dB")
        rows.append(report.row())
    emit(csv_text(IMAGE_COLUMNS, rows), out)
    return EXIT_OK


# ---------- lob-trace ----------

def parse_angle_word(text: str) -> FixedWord:
    """'0x78A3' as a raw 16-bit angle word, anything else as degrees."""
    text = text.strip()
    try:
        if text.lower().startswith("0x"):
            return FixedWord(raw=int(text, 16), fmt=ANGLE_WORD)
        return FixedWord.from_real(math.radians(float(text)), ANGLE_WORD)
    except ValueError as e:
        raise UsageError(f"Cannot parse angle '{text}': {e}")


def cmd_lob_trace(value: str, as_csv: bool = False, out: Optional[str] = None) -> int:
    """Leading-one detector stages for one angle word."""
    word = parse_angle_word(value)
    _, trace = lob_detect(word)
    header = ["stage", "z_i", "lead_one", "shift", "z_next"]
    rows = [[str(cell) for cell in row] for row in trace.rows()]
    preamble = [f"angle word 0x{word.raw:04X} = {math.degrees(word.to_real()):.4f} deg"]
    if as_csv:
        emit(csv_text(header, rows, preamble), out)
    else:
        emit("\n".join(preamble) + "\n" + markdown_table(header, rows), out)
    return EXIT_OK


def all_variant_names() -> List[str]:
    return list(VARIANTS)
