"""
Function catalog on top of the CORDIC engines: each function is a (mode, trajectory,
initialization, readout) recipe plus quadrant folding and input pre-scaling.

Angles are radians here; the command line converts from degrees.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Sequence, Tuple

from cordic_core import (
    CordicState,
    EngineConfig,
    Mode,
    OpCount,
    RunResult,
    Status,
    Trajectory,
    convergence_bound,
    run,
)
from errors import CordicZeroDivisionError, DomainError, RangeError, UsageError
from fixnum import FixedWord, QFormat
from variants import get_variant, rotate_with

logger = logging.getLogger(__name__)


class Function(Enum):
    SIN_COS = "sin_cos"
    TAN = "tan"
    POLAR_TO_RECT = "polar_to_rect"
    SINH_COSH = "sinh_cosh"
    TANH = "tanh"
    EXP = "exp"
    ATAN = "atan"
    RECT_TO_POLAR = "rect_to_polar"
    DIVIDE = "divide"
    LN = "ln"
    SQRT = "sqrt"
    LN_SQRT = "ln_sqrt"

    @classmethod
    def parse(cls, name: str) -> "Function":
        key = (name or "").strip().lower().replace("-", "_")
        for f in cls:
            if f.value == key:
                return f
        valid = ", ".join(f.value.replace("_", "-") for f in cls)
        raise UsageError(f"Unknown function '{name}', expected one of: {valid}")


ARITY: Dict[Function, int] = {
    Function.SIN_COS: 1,
    Function.TAN: 1,
    Function.POLAR_TO_RECT: 2,
    Function.SINH_COSH: 1,
    Function.TANH: 1,
    Function.EXP: 1,
    Function.ATAN: 1,
    Function.RECT_TO_POLAR: 2,
    Function.DIVIDE: 2,
    Function.LN: 1,
    Function.SQRT: 1,
    Function.LN_SQRT: 1,
}

# Functions any rotation variant can serve; the rest are vectoring or hyperbolic recipes.
ROTATION_FUNCTIONS = {Function.SIN_COS, Function.TAN, Function.POLAR_TO_RECT}

_ROT_CIRC = (Mode.ROTATION, Trajectory.CIRCULAR)
_ROT_HYP = (Mode.ROTATION, Trajectory.HYPERBOLIC)
_VEC_CIRC = (Mode.VECTORING, Trajectory.CIRCULAR)
_VEC_LIN = (Mode.VECTORING, Trajectory.LINEAR)
_VEC_HYP = (Mode.VECTORING, Trajectory.HYPERBOLIC)

# Engine passes per function, in execution order.
RECIPES: Dict[Function, Tuple[Tuple[Mode, Trajectory], ...]] = {
    Function.SIN_COS: (_ROT_CIRC,),
    Function.TAN: (_ROT_CIRC, _VEC_LIN),
    Function.POLAR_TO_RECT: (_ROT_CIRC,),
    Function.SINH_COSH: (_ROT_HYP,),
    Function.TANH: (_ROT_HYP, _VEC_LIN),
    Function.EXP: (_ROT_HYP,),
    Function.ATAN: (_VEC_CIRC,),
    Function.RECT_TO_POLAR: (_VEC_CIRC,),
    Function.DIVIDE: (_VEC_LIN,),
    Function.LN: (_VEC_HYP,),
    Function.SQRT: (_VEC_HYP,),
    Function.LN_SQRT: (_VEC_HYP,),
}


def recipe_snapshot(function: Function, config: EngineConfig) -> str:
    """config.snapshot() with the mode and trajectory the function really runs."""
    passes = RECIPES[function]
    line = config.with_mode(*passes[0]).snapshot()
    for mode, trajectory in passes[1:]:
        line += f" then mode={mode.value} trajectory={trajectory.value}"
    return line


@dataclass(frozen=True)
class FunctionRequest:
    function: Function
    args: Tuple[float, ...]
    config: EngineConfig = field(default_factory=EngineConfig)
    variant: str = "conventional"

    def __post_init__(self):
        expected = ARITY[self.function]
        if len(self.args) != expected:
            raise UsageError(
                f"{self.function.value} takes {expected} argument(s), got {len(self.args)}"
            )
        get_variant(self.variant)
        if self.variant not in ("conventional", "exact") and self.function not in ROTATION_FUNCTIONS:
            raise UsageError(
                f"variant '{self.variant}' is rotation-only; {self.function.value} needs the conventional engine"
            )


@dataclass
class FunctionResult:
    """Named outputs read back from the engine's words; `prequant` holds values before output quantization."""
    values: Dict[str, float]
    ops: OpCount
    status: Status
    fmt: QFormat
    prequant: Dict[str, float] = field(default_factory=dict)

    @property
    def converged(self) -> bool:
        return self.status is Status.CONVERGED


def _merge_status(*statuses: Status) -> Status:
    if any(s is Status.BUDGET_EXHAUSTED for s in statuses):
        return Status.BUDGET_EXHAUSTED
    return Status.CONVERGED


def _check_finite(*args: float):
    for a in args:
        if not math.isfinite(a):
            raise RangeError(f"argument {a} is not finite")


def _unit_x(fmt: QFormat) -> Tuple[FixedWord, FixedWord]:
    return FixedWord.from_real(1.0, fmt), FixedWord.zero(fmt)


def _power_of_two_scale(magnitude: float, target_top: float) -> int:
    """Exponent e such that magnitude * 2^-e lies in [target_top/2, target_top)."""
    if magnitude == 0:
        return 0
    _, e = math.frexp(magnitude)
    return e - int(math.log2(target_top))


def quadrant_fold(theta: float) -> Tuple[float, bool]:
    """Map theta into [-pi/2, pi/2]; the flag says both outputs must be negated."""
    theta = math.remainder(theta, 2 * math.pi)
    if theta > math.pi / 2:
        return theta - math.pi, True
    if theta < -math.pi / 2:
        return theta + math.pi, True
    return theta, False


# ---------- circular rotation ----------

def _rotate(theta: float, vector, config: EngineConfig, variant: str) -> Tuple[RunResult, bool]:
    folded, negate = quadrant_fold(theta)
    result = rotate_with(variant, folded, vector, config)
    return result, negate


def sin_cos(theta: float, config: Optional[EngineConfig] = None, variant: str = "conventional") -> FunctionResult:
    """cos and sin from rotation mode, circular, (x, y, z) = (1, 0, theta)."""
    config = config or EngineConfig()
    _check_finite(theta)
    result, negate = _rotate(theta, _unit_x(config.fmt), config, variant)
    sign = -1.0 if negate else 1.0
    px, py = result.prequant()
    return FunctionResult(
        values={"cos": sign * result.state.x.to_real(), "sin": sign * result.state.y.to_real()},
        ops=result.ops,
        status=result.status,
        fmt=config.fmt,
        prequant={"cos": sign * px, "sin": sign * py},
    )


def polar_to_rect(r: float, theta: float, config: Optional[EngineConfig] = None,
                  variant: str = "conventional") -> FunctionResult:
    """(R cos theta, R sin theta) from rotation mode with x = R, y = 0; R is pre-scaled by a power of two."""
    config = config or EngineConfig()
    _check_finite(r, theta)
    if r < 0:
        raise RangeError(f"polar radius must be >= 0, got {r}")
    e = _power_of_two_scale(r, 1.0)
    vector = (FixedWord.from_real(math.ldexp(r, -e), config.fmt), FixedWord.zero(config.fmt))
    result, negate = _rotate(theta, vector, config, variant)
    sign = -1.0 if negate else 1.0
    px, py = result.prequant()
    return FunctionResult(
        values={"x": sign * math.ldexp(result.state.x.to_real(), e),
                "y": sign * math.ldexp(result.state.y.to_real(), e)},
        ops=result.ops,
        status=result.status,
        fmt=config.fmt,
        prequant={"x": sign * math.ldexp(px, e), "y": sign * math.ldexp(py, e)},
    )


def tan(theta: float, config: Optional[EngineConfig] = None, variant: str = "conventional") -> FunctionResult:
    """sin/cos through one extra linear-vectoring pass."""
    config = config or EngineConfig()
    sc = sin_cos(theta, config, variant)
    quotient = divide(sc.values["sin"], sc.values["cos"], config)
    return FunctionResult(
        values={"tan": quotient.values["quotient"]},
        ops=sc.ops + quotient.ops,
        status=_merge_status(sc.status, quotient.status),
        fmt=config.fmt,
    )


# ---------- circular / linear vectoring ----------

def _vectoring(x: float, y: float, config: EngineConfig, trajectory: Trajectory) -> RunResult:
    fmt = config.fmt
    init = CordicState(x=FixedWord.from_real(x, fmt), y=FixedWord.from_real(y, fmt), z=FixedWord.zero(fmt))
    return run(config.with_mode(Mode.VECTORING, trajectory), init)


def atan(a: float, config: Optional[EngineConfig] = None) -> FunctionResult:
    """Vectoring, circular, x = 1, y = a; both pre-scaled by the same power of two."""
    config = config or EngineConfig()
    _check_finite(a)
    e = _power_of_two_scale(max(1.0, abs(a)), 0.5)
    result = _vectoring(math.ldexp(1.0, -e), math.ldexp(a, -e), config, Trajectory.CIRCULAR)
    return FunctionResult(values={"angle": result.state.z.to_real()}, ops=result.ops,
                          status=result.status, fmt=config.fmt)


def rect_to_polar(a: float, b: float, config: Optional[EngineConfig] = None) -> FunctionResult:
    """Magnitude and phase in (-pi, pi]; a < 0 is pre-rotated by pi."""
    config = config or EngineConfig()
    _check_finite(a, b)
    if a == 0 and b == 0:
        raise DomainError("phase of (0, 0) is undefined")
    flipped = a < 0
    x, y = (-a, -b) if flipped else (a, b)
    e = _power_of_two_scale(math.hypot(x, y), 1.0)
    result = _vectoring(math.ldexp(x, -e), math.ldexp(y, -e), config, Trajectory.CIRCULAR)
    phase = result.state.z.to_real()
    if flipped:
        phase = phase + math.pi if b >= 0 else phase - math.pi
    magnitude = math.ldexp(result.state.x.to_real(), e)
    return FunctionResult(
        values={"magnitude": magnitude, "phase": phase},
        ops=result.ops,
        status=result.status,
        fmt=config.fmt,
        prequant={"magnitude": math.ldexp(result.prequant()[0], e), "phase": phase},
    )


def divide_limit(config: EngineConfig) -> float:
    """Largest quotient the linear z-accumulator reaches in the budget."""
    return min(2.0 - math.ldexp(1.0, 1 - config.max_iterations), config.fmt.max_real)


def divide(b: float, a: float, config: Optional[EngineConfig] = None) -> FunctionResult:
    """b / a from vectoring, linear, x = a, y = b, z = 0."""
    config = config or EngineConfig()
    _check_finite(a, b)
    if a == 0:
        raise CordicZeroDivisionError(f"division of {b} by zero")
    if abs(b / a) >= divide_limit(config):
        raise RangeError(f"quotient {b}/{a} exceeds the linear range {divide_limit(config):.6f}")
    if a < 0:
        a, b = -a, -b
    e = _power_of_two_scale(max(a, abs(b)), 1.0)
    result = _vectoring(math.ldexp(a, -e), math.ldexp(b, -e), config, Trajectory.LINEAR)
    return FunctionResult(values={"quotient": result.state.z.to_real()}, ops=result.ops,
                          status=result.status, fmt=config.fmt)


# ---------- hyperbolic ----------

def hyperbolic_bound(config: EngineConfig) -> float:
    return convergence_bound(Trajectory.HYPERBOLIC, config.max_iterations)


def sinh_cosh(theta: float, config: Optional[EngineConfig] = None) -> FunctionResult:
    """Rotation, hyperbolic, (1, 0, theta); the hyperbolic k undoes the shrink."""
    config = config or EngineConfig()
    _check_finite(theta)
    bound = hyperbolic_bound(config)
    if abs(theta) > bound:
        raise DomainError(f"|theta| = {abs(theta):.6f} exceeds the hyperbolic bound {bound:.6f}")
    fmt = config.fmt
    init = CordicState(x=FixedWord.from_real(1.0, fmt), y=FixedWord.zero(fmt), z=FixedWord.from_real(theta, fmt))
    result = run(config.with_mode(Mode.ROTATION, Trajectory.HYPERBOLIC), init)
    px, py = result.prequant()
    return FunctionResult(
        values={"cosh": result.state.x.to_real(), "sinh": result.state.y.to_real()},
        ops=result.ops,
        status=result.status,
        fmt=fmt,
        prequant={"cosh": px, "sinh": py},
    )


def exp(theta: float, config: Optional[EngineConfig] = None) -> FunctionResult:
    """cosh + sinh."""
    hc = sinh_cosh(theta, config)
    return FunctionResult(values={"exp": hc.values["cosh"] + hc.values["sinh"]}, ops=hc.ops,
                          status=hc.status, fmt=hc.fmt)


def tanh(theta: float, config: Optional[EngineConfig] = None) -> FunctionResult:
    config = config or EngineConfig()
    hc = sinh_cosh(theta, config)
    quotient = divide(hc.values["sinh"], hc.values["cosh"], config)
    return FunctionResult(
        values={"tanh": quotient.values["quotient"]},
        ops=hc.ops + quotient.ops,
        status=_merge_status(hc.status, quotient.status),
        fmt=config.fmt,
    )


def ln_sqrt_region(config: EngineConfig) -> Tuple[float, float]:
    bound = hyperbolic_bound(config)
    return math.exp(-2 * bound), math.exp(2 * bound)


def ln_sqrt(a: float, config: Optional[EngineConfig] = None) -> FunctionResult:
    """
    Vectoring, hyperbolic, x = (a+1)/2^s, y = (a-1)/2^s with the least s making x < 1.
    ln a = 2*z_n and sqrt(a) = x_n*k_h*2^s / 2.
    """
    config = config or EngineConfig()
    _check_finite(a)
    if a <= 0:
        raise DomainError(f"ln and sqrt need a > 0, got {a}")
    low, high = ln_sqrt_region(config)
    if not low <= a <= high:
        raise RangeError(f"{a} is outside the hyperbolic vectoring region [{low:.6f}, {high:.6f}]")
    s = 0
    while math.ldexp(a + 1, -s) >= 1:
        s += 1
    result = _vectoring(math.ldexp(a + 1, -s), math.ldexp(a - 1, -s), config, Trajectory.HYPERBOLIC)
    return FunctionResult(
        values={"ln": 2 * result.state.z.to_real(), "sqrt": math.ldexp(result.state.x.to_real(), s - 1)},
        ops=result.ops,
        status=result.status,
        fmt=config.fmt,
    )


def ln(a: float, config: Optional[EngineConfig] = None) -> FunctionResult:
    r = ln_sqrt(a, config)
    return FunctionResult(values={"ln": r.values["ln"]}, ops=r.ops, status=r.status, fmt=r.fmt)


def sqrt(a: float, config: Optional[EngineConfig] = None) -> FunctionResult:
    r = ln_sqrt(a, config)
    return FunctionResult(values={"sqrt": r.values["sqrt"]}, ops=r.ops, status=r.status, fmt=r.fmt)


# ---------- reference and dispatch ----------

def reference(function: Function, args: Sequence[float]) -> Dict[str, float]:
    """Double-precision values the engines are compared against."""
    if function is Function.SIN_COS:
        return {"cos": math.cos(args[0]), "sin": math.sin(args[0])}
    if function is Function.TAN:
        return {"tan": math.tan(args[0])}
    if function is Function.POLAR_TO_RECT:
        return {"x": args[0] * math.cos(args[1]), "y": args[0] * math.sin(args[1])}
    if function is Function.SINH_COSH:
        return {"cosh": math.cosh(args[0]), "sinh": math.sinh(args[0])}
    if function is Function.TANH:
        return {"tanh": math.tanh(args[0])}
    if function is Function.EXP:
        return {"exp": math.exp(args[0])}
    if function is Function.ATAN:
        return {"angle": math.atan(args[0])}
    if function is Function.RECT_TO_POLAR:
        return {"magnitude": math.hypot(args[0], args[1]), "phase": math.atan2(args[1], args[0])}
    if function is Function.DIVIDE:
        if args[1] == 0:
            raise CordicZeroDivisionError(f"division of {args[0]} by zero")
        return {"quotient": args[0] / args[1]}
    if args[0] <= 0:
        raise DomainError(f"ln and sqrt need a > 0, got {args[0]}")
    if function is Function.LN:
        return {"ln": math.log(args[0])}
    if function is Function.SQRT:
        return {"sqrt": math.sqrt(args[0])}
    return {"ln": math.log(args[0]), "sqrt": math.sqrt(args[0])}


_DISPATCH = {
    Function.SIN_COS: sin_cos,
    Function.TAN: tan,
    Function.POLAR_TO_RECT: polar_to_rect,
    Function.SINH_COSH: sinh_cosh,
    Function.TANH: tanh,
    Function.EXP: exp,
    Function.ATAN: atan,
    Function.RECT_TO_POLAR: rect_to_polar,
    Function.DIVIDE: divide,
    Function.LN: ln,
    Function.SQRT: sqrt,
    Function.LN_SQRT: ln_sqrt,
}


def evaluate(request: FunctionRequest) -> FunctionResult:
    """Run one request; the exact variant answers from the reference."""
    function, args, config = request.function, request.args, request.config
    if request.variant == "exact":
        values = reference(function, args)
        return FunctionResult(values=values, ops=OpCount(), status=Status.CONVERGED, fmt=config.fmt,
                              prequant=dict(values))
    handler = _DISPATCH[function]
    logger.debug(f"Evaluating {function.value}{tuple(args)} with {request.variant}: "
                 f"{recipe_snapshot(function, config)}")
    if function in ROTATION_FUNCTIONS:
        return handler(*args, config=config, variant=request.variant)
    return handler(*args, config=config)
