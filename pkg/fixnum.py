"""
Bit-exact two's-complement fixed-point arithmetic (Q-format).
Every CORDIC datapath in cordic-kit is built on FixedWord.

Conventions:
  - qI.F names a word of I + F bits; I counts the sign bit, so Q2.14 is 16 bits wide.
  - real -> fixed rounds half away from zero and refuses to wrap.
  - right shifts floor toward -inf (arithmetic shift); this is the only rounding
    rule inside the datapaths.
  - add/sub/neg/mul saturate and set a sticky `overflow` flag on the result.
"""

import logging
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real
from typing import Optional, Union

from errors import RangeError, UsageError

logger = logging.getLogger(__name__)

_FORMAT_PATTERN = re.compile(r"^[qQ](\d+)\.(\d+)$")


@dataclass(frozen=True)
class QFormat:
    """Signed two's-complement word of `total_bits`, `frac_bits` of them fractional."""
    total_bits: int
    frac_bits: int

    def __post_init__(self):
        if not 8 <= self.total_bits <= 64:
            raise UsageError(f"total_bits must be 8..64, got {self.total_bits}")
        if not 0 <= self.frac_bits < self.total_bits:
            raise UsageError(f"frac_bits must satisfy 0 <= frac_bits < total_bits, got {self.frac_bits}")

    @classmethod
    def parse(cls, text: str) -> "QFormat":
        """Parse 'q2.14' / 'Q2.14' (integer bits include the sign)."""
        match = _FORMAT_PATTERN.match((text or "").strip())
        if not match:
            raise UsageError(f"Cannot parse Q-format '{text}', expected qI.F such as q2.14")
        int_bits, frac_bits = int(match.group(1)), int(match.group(2))
        return cls(total_bits=int_bits + frac_bits, frac_bits=frac_bits)

    @property
    def int_bits(self) -> int:
        return self.total_bits - self.frac_bits

    @property
    def min_raw(self) -> int:
        return -(1 << (self.total_bits - 1))

    @property
    def max_raw(self) -> int:
        return (1 << (self.total_bits - 1)) - 1

    @property
    def ulp(self) -> float:
        return math.ldexp(1.0, -self.frac_bits)

    @property
    def min_real(self) -> float:
        return math.ldexp(self.min_raw, -self.frac_bits)

    @property
    def max_real(self) -> float:
        return math.ldexp(self.max_raw, -self.frac_bits)

    def contains_raw(self, raw: int) -> bool:
        return self.min_raw <= raw <= self.max_raw

    def __str__(self) -> str:
        return f"Q{self.int_bits}.{self.frac_bits}"


# Coordinates: 16-bit word, integer range covers the CORDIC gain (~1.647) on unit vectors.
Q2_14 = QFormat(total_bits=16, frac_bits=14)

# Scale-free angle word: 16 magnitude bits of radians (0x78A3 ~ 27 degrees) plus sign.
ANGLE_WORD = QFormat(total_bits=17, frac_bits=16)


def saturate(raw: int, fmt: QFormat):
    """Clamp an unbounded raw integer into fmt; returns (raw, overflowed)."""
    if raw > fmt.max_raw:
        return fmt.max_raw, True
    if raw < fmt.min_raw:
        return fmt.min_raw, True
    return raw, False


@dataclass(frozen=True)
class FixedWord:
    """One Q-format sample: real value = raw * 2**-fmt.frac_bits."""
    raw: int
    fmt: QFormat
    overflow: bool = False

    def __post_init__(self):
        if not self.fmt.contains_raw(self.raw):
            raise RangeError(f"raw {self.raw} does not fit {self.fmt}")

    # ---- construction ----

    @classmethod
    def from_real(cls, value: Union[Real, Fraction], fmt: QFormat) -> "FixedWord":
        if isinstance(value, float) and not math.isfinite(value):
            raise RangeError(f"{value} is not representable in {fmt}")
        exact = Fraction(value) * (1 << fmt.frac_bits)
        magnitude = math.floor(abs(exact) + Fraction(1, 2))
        raw = -magnitude if exact < 0 else magnitude
        if not fmt.contains_raw(raw):
            raise RangeError(
                f"{float(value):.6g} is outside {fmt} range [{fmt.min_real:.6g}, {fmt.max_real:.6g}]"
            )
        return cls(raw=raw, fmt=fmt)

    @classmethod
    def saturating(cls, raw: int, fmt: QFormat, overflow: bool = False) -> "FixedWord":
        clamped, overflowed = saturate(raw, fmt)
        return cls(raw=clamped, fmt=fmt, overflow=overflow or overflowed)

    @classmethod
    def zero(cls, fmt: QFormat) -> "FixedWord":
        return cls(raw=0, fmt=fmt)

    @classmethod
    def ulps(cls, count: int, fmt: QFormat) -> "FixedWord":
        return cls.saturating(count, fmt)

    # ---- readout ----

    def to_real(self) -> float:
        return math.ldexp(self.raw, -self.fmt.frac_bits)

    def to_fraction(self) -> Fraction:
        return Fraction(self.raw, 1 << self.fmt.frac_bits)

    def is_negative(self) -> bool:
        return self.raw < 0

    def magnitude_raw(self) -> int:
        return abs(self.raw)

    def __float__(self) -> float:
        return self.to_real()

    # ---- operators ----

    def __add__(self, other: "FixedWord") -> "FixedWord":
        return fx_arith(self, other, "add")

    def __sub__(self, other: "FixedWord") -> "FixedWord":
        return fx_arith(self, other, "sub")

    def __neg__(self) -> "FixedWord":
        return fx_arith(self, None, "neg")

    def __rshift__(self, shift: int) -> "FixedWord":
        return fx_shr(self, shift)

    def __mul__(self, other: "FixedWord") -> "FixedWord":
        return fx_mul(self, other)

    def __repr__(self) -> str:
        flag = ", overflow" if self.overflow else ""
        return f"FixedWord({self.to_real():.6f} raw={self.raw} {self.fmt}{flag})"


def fx_convert(value, fmt: Optional[QFormat] = None):
    """real -> FixedWord (needs fmt) or FixedWord -> real."""
    if isinstance(value, FixedWord):
        return value.to_real()
    if fmt is None:
        raise UsageError("fx_convert needs a target QFormat for real input")
    return FixedWord.from_real(value, fmt)


def _check_same_format(a: FixedWord, b: FixedWord):
    if a.fmt != b.fmt:
        raise UsageError(f"Format mismatch: {a.fmt} vs {b.fmt}")


def fx_arith(a: FixedWord, b: Optional[FixedWord], op: str) -> FixedWord:
    """add / sub / neg with saturation; the overflow flag is sticky across operands."""
    if op == "neg":
        return FixedWord.saturating(-a.raw, a.fmt, a.overflow)
    if b is None:
        raise UsageError(f"'{op}' needs two operands")
    _check_same_format(a, b)
    sticky = a.overflow or b.overflow
    if op == "add":
        return FixedWord.saturating(a.raw + b.raw, a.fmt, sticky)
    if op == "sub":
        return FixedWord.saturating(a.raw - b.raw, a.fmt, sticky)
    raise UsageError(f"Unknown fixed-point op '{op}', expected add, sub or neg")


def fx_shr(a: FixedWord, shift: int) -> FixedWord:
    """Arithmetic right shift: floor(raw / 2**shift)."""
    if not 0 <= shift < a.fmt.total_bits:
        raise UsageError(f"shift {shift} out of range for {a.fmt}")
    return FixedWord(raw=a.raw >> shift, fmt=a.fmt, overflow=a.overflow)


def fx_mul(a: FixedWord, b: FixedWord) -> FixedWord:
    """Double-width product, floor back to fmt, saturate. Used for scale correction only."""
    _check_same_format(a, b)
    product = (a.raw * b.raw) >> a.fmt.frac_bits
    return FixedWord.saturating(product, a.fmt, a.overflow or b.overflow)
