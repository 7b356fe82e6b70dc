"""
Conventional CORDIC engine: micro-rotation step, sigma selection, scale factor,
and the rotation/vectoring driver over circular, linear and hyperbolic trajectories.

The engine is reconfigured at run time through EngineConfig (mode, trajectory,
word format, iteration budget), which is how the reconfigurable architecture
is realized here.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from errors import DomainError, UsageError
from fixnum import Q2_14, FixedWord, QFormat, fx_mul, fx_shr

logger = logging.getLogger(__name__)

# Hyperbolic iterations executed twice; without them atanh(2^-i) does not cover its own tail.
HYPERBOLIC_REPEATS = (4, 13, 40)

DEFAULT_ITERATIONS = 16
DEFAULT_EPSILON_ULPS = 4


class Trajectory(Enum):
    CIRCULAR = "circular"
    LINEAR = "linear"
    HYPERBOLIC = "hyperbolic"

    @property
    def m(self) -> int:
        return {"circular": 1, "linear": 0, "hyperbolic": -1}[self.value]


class Mode(Enum):
    ROTATION = "rotation"
    VECTORING = "vectoring"


class Status(Enum):
    CONVERGED = "converged"
    BUDGET_EXHAUSTED = "budget_exhausted"


@dataclass
class OpCount:
    """Hardware-cost proxy: adds/subs, shifts, multiplies (scale correction only), iterations."""
    adds: int = 0
    shifts: int = 0
    multiplies: int = 0
    iterations: int = 0

    def record(self, adds: int = 0, shifts: int = 0, multiplies: int = 0, iterations: int = 0):
        self.adds += adds
        self.shifts += shifts
        self.multiplies += multiplies
        self.iterations += iterations

    def __add__(self, other: "OpCount") -> "OpCount":
        return OpCount(
            adds=self.adds + other.adds,
            shifts=self.shifts + other.shifts,
            multiplies=self.multiplies + other.multiplies,
            iterations=self.iterations + other.iterations,
        )

    def as_dict(self) -> Dict[str, int]:
        return {
            "adds": self.adds,
            "shifts": self.shifts,
            "multiplies": self.multiplies,
            "iterations": self.iterations,
        }


@dataclass(frozen=True)
class ScheduleEntry:
    i: int
    sigma: int
    angle: Optional[FixedWord] = None


@dataclass(frozen=True)
class MicroRotationSchedule:
    """Ordered micro-rotations; sigma in {-1, 0, +1} unless source == 'radix4'."""
    entries: Tuple[ScheduleEntry, ...] = ()
    source: str = "conventional"

    def __post_init__(self):
        limit = 2 if self.source == "radix4" else 1
        for entry in self.entries:
            if abs(entry.sigma) > limit:
                raise UsageError(f"sigma {entry.sigma} not allowed in a {self.source} schedule")

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def nonzero_count(self) -> int:
        return sum(1 for e in self.entries if e.sigma != 0)

    def shifts(self) -> List[int]:
        return [e.i for e in self.entries]


@dataclass(frozen=True)
class CordicState:
    """(x, y, z, i) threaded through every iteration; all words share one format."""
    x: FixedWord
    y: FixedWord
    z: FixedWord
    i: int = 0

    def __post_init__(self):
        if not (self.x.fmt == self.y.fmt == self.z.fmt):
            raise UsageError(f"CordicState words disagree on format: {self.x.fmt}, {self.y.fmt}, {self.z.fmt}")
        if self.i < 0:
            raise UsageError(f"iteration index must be >= 0, got {self.i}")

    @classmethod
    def from_reals(cls, x: float, y: float, z: float, fmt: QFormat = Q2_14) -> "CordicState":
        return cls(
            x=FixedWord.from_real(x, fmt),
            y=FixedWord.from_real(y, fmt),
            z=FixedWord.from_real(z, fmt),
        )

    @property
    def fmt(self) -> QFormat:
        return self.x.fmt

    @property
    def overflow(self) -> bool:
        return self.x.overflow or self.y.overflow or self.z.overflow

    def reals(self) -> Tuple[float, float, float]:
        return self.x.to_real(), self.y.to_real(), self.z.to_real()


@dataclass(frozen=True)
class EngineConfig:
    mode: Mode = Mode.ROTATION
    trajectory: Trajectory = Trajectory.CIRCULAR
    fmt: QFormat = Q2_14
    max_iterations: int = DEFAULT_ITERATIONS
    z_epsilon_ulps: int = DEFAULT_EPSILON_ULPS
    y_epsilon_ulps: int = DEFAULT_EPSILON_ULPS
    scale_correction: bool = True

    def __post_init__(self):
        # Past total_bits every shift is pure noise (and fx_shr refuses it).
        if not 1 <= self.max_iterations <= self.fmt.total_bits:
            raise UsageError(
                f"max_iterations must be 1..{self.fmt.total_bits} for {self.fmt}, got {self.max_iterations}"
            )
        if self.z_epsilon_ulps < 1 or self.y_epsilon_ulps < 1:
            raise UsageError("convergence thresholds must be at least one ulp")

    @property
    def z_epsilon(self) -> FixedWord:
        return FixedWord.ulps(self.z_epsilon_ulps, self.fmt)

    @property
    def y_epsilon(self) -> FixedWord:
        return FixedWord.ulps(self.y_epsilon_ulps, self.fmt)

    def with_mode(self, mode: Mode, trajectory: Trajectory) -> "EngineConfig":
        return replace(self, mode=mode, trajectory=trajectory)

    def snapshot(self) -> str:
        """One line that suffices to reproduce a run."""
        return (
            f"mode={self.mode.value} trajectory={self.trajectory.value} format={self.fmt} "
            f"iterations={self.max_iterations} epsilon_ulps={self.z_epsilon_ulps}/{self.y_epsilon_ulps} "
            f"scale_correction={'on' if self.scale_correction else 'off'}"
        )


@dataclass
class RunResult:
    """Outcome of one engine run. `state` is scale-corrected, `raw_state` is not."""
    state: CordicState
    raw_state: CordicState
    k: float
    ops: OpCount
    status: Status
    schedule: MicroRotationSchedule = field(default_factory=MicroRotationSchedule)
    detail: Dict[str, object] = field(default_factory=dict)

    @property
    def converged(self) -> bool:
        return self.status is Status.CONVERGED

    def prequant(self) -> Tuple[float, float]:
        """x, y before the correction multiply and its output quantization."""
        if "prequant" in self.detail:
            return self.detail["prequant"]
        return self.raw_state.x.to_real() * self.k, self.raw_state.y.to_real() * self.k


# ---------- elementary angles ----------

def _reference_angle(trajectory: Trajectory, i: int) -> float:
    t = math.ldexp(1.0, -i)
    if trajectory is Trajectory.CIRCULAR:
        return math.atan(t)
    if trajectory is Trajectory.LINEAR:
        return t
    return math.atanh(t)


@lru_cache(maxsize=None)
def _angle_table(trajectory: Trajectory, fmt: QFormat) -> Tuple[Optional[int], ...]:
    """Raw elementary angles for i = 0 .. 2*total_bits, built once per (trajectory, format)."""
    table: List[Optional[int]] = []
    for i in range(2 * fmt.total_bits + 1):
        if trajectory is Trajectory.HYPERBOLIC and i == 0:
            table.append(None)
            continue
        table.append(FixedWord.from_real(_reference_angle(trajectory, i), fmt).raw)
    logger.debug(f"Built {trajectory.value} angle table for {fmt} ({len(table)} entries)")
    return tuple(table)


def elementary_angle(trajectory: Trajectory, i: int, fmt: QFormat = Q2_14) -> FixedWord:
    """atan(2^-i), 2^-i or atanh(2^-i), quantized to fmt."""
    if i < 0:
        raise UsageError(f"iteration index must be >= 0, got {i}")
    if trajectory is Trajectory.HYPERBOLIC and i == 0:
        raise DomainError("hyperbolic elementary angle at i = 0 is atanh(1), which diverges")
    table = _angle_table(trajectory, fmt)
    if i < len(table):
        return FixedWord(raw=table[i], fmt=fmt)
    return FixedWord.from_real(_reference_angle(trajectory, i), fmt)


def index_sequence(trajectory: Trajectory, max_iterations: int) -> List[int]:
    """Shift indices a budget of `max_iterations` executes (hyperbolic repeats included)."""
    if trajectory is not Trajectory.HYPERBOLIC:
        return list(range(max_iterations))
    indices: List[int] = []
    for i in range(1, max_iterations):
        indices.append(i)
        if i in HYPERBOLIC_REPEATS:
            indices.append(i)
    return indices


def convergence_bound(trajectory: Trajectory, max_iterations: int) -> float:
    """Largest |angle| (or |quotient| for linear) the budget can reach."""
    return math.fsum(_reference_angle(trajectory, i) for i in index_sequence(trajectory, max_iterations))


# ---------- one step ----------

def sigma_select(mode: Mode, state: CordicState) -> int:
    """Rotation drives z to zero, vectoring drives y to zero (x > 0 assumed). Ties pick +1."""
    if mode is Mode.ROTATION:
        return 1 if state.z.raw >= 0 else -1
    return 1 if state.y.raw < 0 else -1


def _signed(word: FixedWord, sigma: int) -> FixedWord:
    return word if sigma > 0 else -word


def micro_rotate(state: CordicState, sigma: int, trajectory: Trajectory) -> CordicState:
    """
    x' = x - m*sigma*(y >> i)
    y' = y + sigma*(x >> i)
    z' = z - sigma*angle(i)
    """
    if sigma not in (-1, 0, 1):
        raise UsageError(f"micro_rotate takes sigma in {{-1, 0, +1}}, got {sigma}")
    i = state.i
    if sigma == 0:
        return replace(state, i=i + 1)
    x, y, z = state.x, state.y, state.z
    x_shift = fx_shr(x, i)
    y_shift = fx_shr(y, i)
    m = trajectory.m
    if m == 0:
        x_next = x
    else:
        x_next = x - _signed(y_shift, sigma * m)
    y_next = y + _signed(x_shift, sigma)
    z_next = z - _signed(elementary_angle(trajectory, i, z.fmt), sigma)
    return CordicState(x=x_next, y=y_next, z=z_next, i=i + 1)


def record_micro_rotation(ops: OpCount, trajectory: Trajectory, sigma: int = 1):
    if sigma == 0:
        ops.record(iterations=1)
    elif trajectory is Trajectory.LINEAR:
        ops.record(adds=2, shifts=1, iterations=1)
    else:
        ops.record(adds=3, shifts=2, iterations=1)


# ---------- scale factor ----------

def _factor_term(trajectory: Trajectory, i: int, sigma: int, radix4: bool) -> float:
    if sigma == 0 or trajectory is Trajectory.LINEAR:
        return 1.0
    if radix4:
        return math.sqrt(1.0 / (1.0 + sigma * sigma * math.ldexp(1.0, -4 * i)))
    if trajectory is Trajectory.HYPERBOLIC:
        return math.sqrt(1.0 / (1.0 - math.ldexp(1.0, -2 * i)))
    return math.sqrt(1.0 / (1.0 + math.ldexp(1.0, -2 * i)))


def scale_factor(n: int, applied: Optional[MicroRotationSchedule] = None,
                 trajectory: Trajectory = Trajectory.CIRCULAR) -> float:
    """
    Product of per-rotation length corrections.

    Args:
        n: number of rotations for the uniform schedule (ignored when `applied` is given)
        applied: executed schedule; sigma = 0 entries contribute 1, radix-4 uses 4^-2i
        trajectory: circular (1/sqrt(1+2^-2i)) or hyperbolic (1/sqrt(1-2^-2i))

    Returns:
        k as a real number; quantize once for the fx_mul correction.
    """
    if applied is None:
        if n < 1:
            raise UsageError(f"scale_factor needs n >= 1, got {n}")
        if trajectory is Trajectory.HYPERBOLIC:
            indices = hyperbolic_indices(n)
        else:
            indices = list(range(n))
        return math.prod(_factor_term(trajectory, i, 1, False) for i in indices)
    radix4 = applied.source == "radix4"
    return math.prod(_factor_term(trajectory, e.i, e.sigma, radix4) for e in applied.entries)


def hyperbolic_indices(count: int) -> List[int]:
    """First `count` executed hyperbolic shift indices (1, 2, 3, 4, 4, 5, ...)."""
    indices: List[int] = []
    i = 1
    while len(indices) < count:
        indices.append(i)
        if i in HYPERBOLIC_REPEATS and len(indices) < count:
            indices.append(i)
        i += 1
    return indices


def apply_scale(state: CordicState, k: float, ops: OpCount) -> CordicState:
    """One quantized multiply per coordinate, never inside the loop."""
    if k == 1.0:
        return state
    k_word = FixedWord.from_real(k, state.fmt)
    ops.record(multiplies=2)
    return replace(state, x=fx_mul(state.x, k_word), y=fx_mul(state.y, k_word))


# ---------- driver ----------

def _converged(config: EngineConfig, state: CordicState) -> bool:
    if config.mode is Mode.ROTATION:
        return state.z.magnitude_raw() <= config.z_epsilon_ulps
    return state.y.magnitude_raw() <= config.y_epsilon_ulps


def run(config: EngineConfig, init: CordicState) -> RunResult:
    """Iterate sigma_select + micro_rotate until converged or the budget is spent."""
    if init.fmt != config.fmt:
        raise UsageError(f"initial state is {init.fmt} but the engine is configured for {config.fmt}")
    if config.mode is Mode.VECTORING and config.trajectory is Trajectory.HYPERBOLIC:
        if init.y.magnitude_raw() >= init.x.magnitude_raw():
            raise DomainError("hyperbolic vectoring needs |y| < |x|")

    trace = logger.isEnabledFor(logging.DEBUG)
    ops = OpCount()
    executed: List[ScheduleEntry] = []
    state = init
    for idx in index_sequence(config.trajectory, config.max_iterations):
        if _converged(config, state):
            break
        state = replace(state, i=idx)
        sigma = sigma_select(config.mode, state)
        state = micro_rotate(state, sigma, config.trajectory)
        record_micro_rotation(ops, config.trajectory)
        executed.append(ScheduleEntry(i=idx, sigma=sigma))
        if trace:
            logger.debug(f"i={idx} sigma={sigma:+d} x={state.x.raw} y={state.y.raw} z={state.z.raw}")

    status = Status.CONVERGED if _converged(config, state) else Status.BUDGET_EXHAUSTED
    schedule = MicroRotationSchedule(entries=tuple(executed), source="conventional")
    k = scale_factor(len(executed), schedule, config.trajectory) if executed else 1.0
    raw_state = state
    if config.scale_correction:
        state = apply_scale(state, k, ops)
    if state.overflow:
        logger.warning(f"Saturation during {config.mode.value}/{config.trajectory.value} run")
    return RunResult(state=state, raw_state=raw_state, k=k, ops=ops, status=status, schedule=schedule)


def rotate(theta: float, vector: Sequence[FixedWord], config: EngineConfig) -> RunResult:
    """Circular rotation of `vector` by `theta` radians (the conventional variant)."""
    fmt = config.fmt
    init = CordicState(x=vector[0], y=vector[1], z=FixedWord.from_real(theta, fmt))
    return run(config.with_mode(Mode.ROTATION, Trajectory.CIRCULAR), init)
