"""
Alternative rotation engines sharing the conventional engine's interface:
scale-free (leading-one detection), lookahead, hybrid (mixed / partitioned),
angle recoding, radix-4 and RICO, plus the named VARIANTS registry.

Every engine takes (theta in radians, vector of FixedWord, EngineConfig) and
returns a RunResult.
"""

import logging
import math
import threading
from collections import defaultdict
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from cordic_core import (
    CordicState,
    EngineConfig,
    MicroRotationSchedule,
    Mode,
    OpCount,
    RunResult,
    ScheduleEntry,
    Status,
    Trajectory,
    apply_scale,
    convergence_bound,
    elementary_angle,
    micro_rotate,
    record_micro_rotation,
    rotate as conventional_rotate,
    scale_factor,
)
from errors import DomainError, RangeError, UsageError
from fixnum import ANGLE_WORD, FixedWord, QFormat, fx_mul, fx_shr, saturate

logger = logging.getLogger(__name__)

Vector = Tuple[FixedWord, FixedWord]

LOB_WORD_BITS = 16
RICO_PREROTATION_DEGREES = 7.0


class ScheduleCache:
    """Read-mostly map of computed schedules; inserts are serialized, results never depend on it."""

    def __init__(self, name: str):
        self.name = name
        self._entries: Dict[tuple, object] = {}
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    def get_or_build(self, key: tuple, builder: Callable[[], object]):
        with self._lock:
            if key in self._entries:
                self.hits += 1
                return self._entries[key]
        value = builder()
        with self._lock:
            self.misses += 1
            self._entries.setdefault(key, value)
            logger.debug(f"{self.name} cache: stored {key} ({len(self._entries)} entries)")
            return self._entries[key]

    def clear(self):
        with self._lock:
            self._entries.clear()
            self.hits = 0
            self.misses = 0

    def __len__(self) -> int:
        with self._lock:
            return len(self._entries)


LOB_CACHE = ScheduleCache("lobd")
RECODING_CACHE = ScheduleCache("recoding")


def _vector_state(vector: Sequence[FixedWord], z: FixedWord, i: int = 0) -> CordicState:
    if len(vector) != 2:
        raise UsageError(f"rotation takes a 2-vector, got {len(vector)} components")
    return CordicState(x=vector[0], y=vector[1], z=z, i=i)


def _finish(config: EngineConfig, state: CordicState, schedule: MicroRotationSchedule,
            ops: OpCount, status: Status, detail: Optional[dict] = None,
            trajectory: Trajectory = Trajectory.CIRCULAR) -> RunResult:
    """Single end-of-run correction from the executed schedule, as the conventional engine does."""
    k = scale_factor(len(schedule), schedule, trajectory) if len(schedule) else 1.0
    corrected = apply_scale(state, k, ops) if config.scale_correction else state
    if corrected.overflow:
        logger.warning(f"Saturation during {schedule.source} rotation")
    return RunResult(state=corrected, raw_state=state, k=k, ops=ops, status=status,
                     schedule=schedule, detail=detail or {})


# ---------- scale-free (leading-one bit detection) ----------

@dataclass(frozen=True)
class LobStage:
    stage: int
    z_in: int
    position: int
    shift: int
    z_out: int


@dataclass(frozen=True)
class LobTrace:
    stages: Tuple[LobStage, ...] = ()

    def shifts(self) -> List[int]:
        return [s.shift for s in self.stages]

    def rows(self) -> List[Tuple[int, str, int, int, str]]:
        """Stage, z_i, lead-one position, shift, z_(i+1) with hex words."""
        return [(s.stage, f"0x{s.z_in:04X}", s.position, s.shift, f"0x{s.z_out:04X}") for s in self.stages]


def _build_lob(raw: int) -> Tuple[MicroRotationSchedule, LobTrace]:
    entries: List[ScheduleEntry] = []
    stages: List[LobStage] = []
    z = raw
    while z:
        position = z.bit_length() - 1
        shift = LOB_WORD_BITS - position
        z_out = z - (1 << position)
        stages.append(LobStage(stage=len(stages) + 1, z_in=z, position=position, shift=shift, z_out=z_out))
        entries.append(ScheduleEntry(i=shift, sigma=1, angle=FixedWord(raw=1 << position, fmt=ANGLE_WORD)))
        logger.debug(f"LOBD stage {len(stages)}: z=0x{z:04X} lead-one={position} shift={shift}")
        z = z_out
    return MicroRotationSchedule(entries=tuple(entries), source="lobd"), LobTrace(stages=tuple(stages))


def lob_detect(z: FixedWord) -> Tuple[MicroRotationSchedule, LobTrace]:
    """Decompose a non-negative 16-bit angle word into its set bits, MSB first."""
    if z.fmt != ANGLE_WORD:
        raise UsageError(f"lob_detect takes a {ANGLE_WORD} angle word, got {z.fmt}")
    if z.raw < 0:
        raise DomainError("scale-free rotation is anticlockwise only; angle word must be >= 0")
    if z.raw >= 1 << LOB_WORD_BITS:
        raise RangeError(f"angle word 0x{z.raw:X} exceeds {LOB_WORD_BITS} bits")
    return LOB_CACHE.get_or_build((z.raw,), lambda: _build_lob(z.raw))


def _shifted_terms(word: FixedWord, shifts: Sequence[int]) -> List[FixedWord]:
    # terms at or past the word width are below the LSB
    return [fx_shr(word, s) for s in shifts if s < word.fmt.total_bits]


def _sum_terms(base: FixedWord, add: Sequence[FixedWord], sub: Sequence[FixedWord]) -> FixedWord:
    out = base
    for term in add:
        out = out + term
    for term in sub:
        out = out - term
    return out


def scale_free_rotate(theta, vector: Sequence[FixedWord], config: Optional[EngineConfig] = None,
                      min_shift: int = 1) -> RunResult:
    """
    Third-order Taylor rotation per detected bit, no scale correction.

    Per stage with shift i (theta_i = 2^-i):
        x' = x - x*2^-(2i+1) - y*2^-i + y*(2^-(3i+3) + 2^-(3i+5))
        y' = y - y*2^-(2i+1) + x*2^-i - x*(2^-(3i+3) + 2^-(3i+5))
    2^-3 + 2^-5 stands in for the 1/6 coefficient.
    """
    config = config or EngineConfig(fmt=vector[0].fmt)
    if isinstance(theta, FixedWord):
        angle = theta
    elif theta < 0:
        raise DomainError("scale-free rotation is anticlockwise only; fold the angle to [0, 1) rad first")
    else:
        angle = FixedWord.from_real(theta, ANGLE_WORD)
    schedule, trace = lob_detect(angle)
    state = _vector_state(vector, FixedWord.zero(config.fmt))
    ops = OpCount()
    worst_shift = None
    for entry in schedule:
        i = entry.i
        if i < min_shift:
            raise DomainError(
                f"shift {i} is below the scale-free minimum {min_shift}; angle outside the small-angle region"
            )
        worst_shift = i if worst_shift is None else min(worst_shift, i)
        x, y = state.x, state.y
        x_half = _shifted_terms(x, [2 * i + 1])
        y_half = _shifted_terms(y, [2 * i + 1])
        x_lin = _shifted_terms(x, [i])
        y_lin = _shifted_terms(y, [i])
        x_cub = _shifted_terms(x, [3 * i + 3, 3 * i + 5])
        y_cub = _shifted_terms(y, [3 * i + 3, 3 * i + 5])
        x_next = _sum_terms(x, add=y_cub, sub=x_half + y_lin)
        y_next = _sum_terms(y, add=x_lin, sub=y_half + x_cub)
        terms = len(x_half) + len(y_lin) + len(y_cub) + len(y_half) + len(x_lin) + len(x_cub)
        ops.record(adds=terms, shifts=terms, iterations=1)
        state = CordicState(x=x_next, y=y_next, z=state.z, i=i)
    detail = {"worst_shift": worst_shift, "lob_trace": trace}
    return RunResult(state=state, raw_state=state, k=1.0, ops=ops, status=Status.CONVERGED,
                     schedule=schedule, detail=detail)


# ---------- lookahead ----------

@dataclass(frozen=True)
class DyadicTerm:
    coeff: int
    exponent: int

    @property
    def value(self) -> float:
        return math.ldexp(self.coeff, -self.exponent)


@dataclass(frozen=True)
class LookaheadBlock:
    """P + jV = prod_t (1 + j*sigma_t*2^-(start+t)); for start 0 the weights are 2^0 .. 2^-6."""
    sigmas: Tuple[int, ...]
    P: Tuple[DyadicTerm, ...]
    V: Tuple[DyadicTerm, ...]
    start: int = 0

    @classmethod
    def build(cls, sigmas: Sequence[int], start: int = 0) -> "LookaheadBlock":
        if not 1 <= len(sigmas) <= 4 or any(s not in (-1, 1) for s in sigmas):
            raise UsageError(f"lookahead block takes 1..4 sigmas in {{-1, +1}}, got {tuple(sigmas)}")
        real: Dict[int, int] = {0: 1}
        imag: Dict[int, int] = {}
        for t, sigma in enumerate(sigmas):
            e = start + t
            next_real: Dict[int, int] = defaultdict(int)
            next_imag: Dict[int, int] = defaultdict(int)
            for exp, c in real.items():
                next_real[exp] += c
                next_imag[exp + e] += c * sigma
            for exp, c in imag.items():
                next_imag[exp] += c
                next_real[exp + e] -= c * sigma
            real, imag = next_real, next_imag
        P = tuple(DyadicTerm(coeff=real[e], exponent=e) for e in sorted(real))
        V = tuple(DyadicTerm(coeff=imag[e], exponent=e) for e in sorted(imag))
        return cls(sigmas=tuple(sigmas), P=P, V=V, start=start)

    @property
    def p_value(self) -> float:
        return math.fsum(t.value for t in self.P)

    @property
    def v_value(self) -> float:
        return math.fsum(t.value for t in self.V)


def lookahead_sigmas(z0: FixedWord, start: int = 0, count: int = 4) -> Tuple[int, ...]:
    """Replay only the z-recurrence for `count` steps from shift index `start`."""
    sigmas = []
    z = z0
    for t in range(count):
        sigma = 1 if z.raw >= 0 else -1
        angle = elementary_angle(Trajectory.CIRCULAR, start + t, z.fmt)
        z = z - angle if sigma > 0 else z + angle
        sigmas.append(sigma)
    return tuple(sigmas)


def _dyadic_numerator(terms: Sequence[DyadicTerm], top: int) -> int:
    return sum(t.coeff << (top - t.exponent) for t in terms)


def lookahead_merge(x0: FixedWord, y0: FixedWord, block: LookaheadBlock) -> Tuple[FixedWord, FixedWord, OpCount]:
    """x4 = x0*P - y0*V, y4 = y0*P + x0*V, evaluated exactly and floored once."""
    if x0.fmt != y0.fmt:
        raise UsageError(f"Format mismatch: {x0.fmt} vs {y0.fmt}")
    top = max(t.exponent for t in block.P + block.V)
    p_num = _dyadic_numerator(block.P, top)
    v_num = _dyadic_numerator(block.V, top)
    sticky = x0.overflow or y0.overflow
    x4 = FixedWord.saturating((x0.raw * p_num - y0.raw * v_num) >> top, x0.fmt, sticky)
    y4 = FixedWord.saturating((y0.raw * p_num + x0.raw * v_num) >> top, x0.fmt, sticky)

    live = [t for t in block.P + block.V if t.coeff != 0]
    ops = OpCount()
    per_output_adds = max(len(live) - 1, 0)
    per_output_shifts = sum(1 for t in live if t.exponent > 0)
    ops.record(adds=2 * per_output_adds, shifts=2 * per_output_shifts, iterations=len(block.sigmas))
    return x4, y4, ops


def lookahead_rotate(theta: float, vector: Sequence[FixedWord], config: EngineConfig) -> RunResult:
    """Blocks of four merged micro-rotations, sigmas precomputed from the z-recurrence."""
    fmt = config.fmt
    state = _vector_state(vector, FixedWord.from_real(theta, fmt))
    ops = OpCount()
    entries: List[ScheduleEntry] = []
    n = config.max_iterations
    start = 0
    while start < n and state.z.magnitude_raw() > config.z_epsilon_ulps:
        count = min(4, n - start)
        sigmas = lookahead_sigmas(state.z, start, count)
        block = LookaheadBlock.build(sigmas, start)
        x, y, block_ops = lookahead_merge(state.x, state.y, block)
        z = state.z
        for t, sigma in enumerate(sigmas):
            angle = elementary_angle(Trajectory.CIRCULAR, start + t, fmt)
            z = z - angle if sigma > 0 else z + angle
            entries.append(ScheduleEntry(i=start + t, sigma=sigma))
        block_ops.record(adds=count)
        ops = ops + block_ops
        state = CordicState(x=x, y=y, z=z, i=start + count)
        logger.debug(f"lookahead block at {start}: sigmas={sigmas} P={block.p_value:.6f} V={block.v_value:.6f}")
        start += count
    status = Status.CONVERGED if state.z.magnitude_raw() <= config.z_epsilon_ulps else Status.BUDGET_EXHAUSTED
    schedule = MicroRotationSchedule(entries=tuple(entries), source="conventional")
    return _finish(config, state, schedule, ops, status)


# ---------- radix-4 ----------

@lru_cache(maxsize=None)
def _radix4_angle_raw(i: int, sigma: int, fmt: QFormat) -> int:
    return FixedWord.from_real(math.atan(sigma * math.ldexp(1.0, -2 * i)), fmt).raw


RADIX4_CANDIDATES = (0, 1, -1, 2, -2)


def radix4_select(z: FixedWord, i: int) -> int:
    """Nearest radix-4 angle to z; candidates tried in order 0, +1, -1, +2, -2, first minimum wins."""
    best_sigma, best_err = 0, None
    for sigma in RADIX4_CANDIDATES:
        err = abs(z.raw - _radix4_angle_raw(i, sigma, z.fmt))
        if best_err is None or err < best_err:
            best_sigma, best_err = sigma, err
    return best_sigma


def _radix4_term(word: FixedWord, sigma: int, i: int) -> FixedWord:
    """sigma * 4^-i * word; |sigma| = 2 is one shift less (a doubling at i = 0)."""
    if abs(sigma) == 2:
        term = word + word if i == 0 else fx_shr(word, 2 * i - 1)
    else:
        term = fx_shr(word, 2 * i)
    return term if sigma > 0 else -term


def widen(fmt: QFormat, extra_int_bits: int = 2) -> QFormat:
    if fmt.total_bits + extra_int_bits > 64:
        raise UsageError(f"{fmt} cannot be widened by {extra_int_bits} guard bits within 64 bits")
    return QFormat(total_bits=fmt.total_bits + extra_int_bits, frac_bits=fmt.frac_bits)


def _recast(word: FixedWord, fmt: QFormat) -> FixedWord:
    raw, overflowed = saturate(word.raw, fmt)
    return FixedWord(raw=raw, fmt=fmt, overflow=word.overflow or overflowed)


def radix4_rotate(theta: float, vector: Sequence[FixedWord], config: EngineConfig,
                  iterations: Optional[int] = None) -> RunResult:
    """
    x' = x + sigma*4^-i*y
    y' = y - sigma*4^-i*x
    z' = z - atan(sigma*4^-i)
    The recurrence turns clockwise, so z starts at -theta. Runs two integer bits wider than config.fmt.
    """
    fmt = config.fmt
    wide = widen(fmt)
    n = iterations if iterations is not None else (config.max_iterations + 1) // 2
    if n < 1 or 2 * (n - 1) >= wide.total_bits:
        raise UsageError(f"radix-4 iteration count {n} out of range for {fmt}")
    state = CordicState(x=_recast(vector[0], wide), y=_recast(vector[1], wide),
                        z=FixedWord.from_real(-theta, wide))
    ops = OpCount()
    entries: List[ScheduleEntry] = []
    for i in range(n):
        if state.z.magnitude_raw() <= config.z_epsilon_ulps:
            break
        sigma = radix4_select(state.z, i)
        entries.append(ScheduleEntry(i=i, sigma=sigma))
        if sigma == 0:
            ops.record(iterations=1)
            state = replace(state, i=i + 1)
            continue
        x, y = state.x, state.y
        angle = FixedWord(raw=_radix4_angle_raw(i, sigma, wide), fmt=wide)
        state = CordicState(x=x + _radix4_term(y, sigma, i), y=y - _radix4_term(x, sigma, i),
                            z=state.z - angle, i=i + 1)
        ops.record(adds=3, shifts=2, iterations=1)
        logger.debug(f"radix-4 i={i} sigma={sigma:+d} z={state.z.raw}")
    status = Status.CONVERGED if state.z.magnitude_raw() <= config.z_epsilon_ulps else Status.BUDGET_EXHAUSTED
    schedule = MicroRotationSchedule(entries=tuple(entries), source="radix4")
    wide_result = _finish(config, state, schedule, ops, status)

    def narrow(s: CordicState) -> CordicState:
        return CordicState(x=_recast(s.x, fmt), y=_recast(s.y, fmt), z=_recast(s.z, fmt), i=s.i)

    return replace(wide_result, state=narrow(wide_result.state), raw_state=narrow(wide_result.raw_state))


# ---------- angle recoding ----------

def _greedy_schedule(theta: float, n: int, fmt: QFormat) -> Tuple[MicroRotationSchedule, float]:
    angles = [math.atan(math.ldexp(1.0, -i)) for i in range(n)]
    tolerance = math.ldexp(1.0, -n)
    residual = theta
    entries: List[ScheduleEntry] = []
    # the same i may repeat; n entries is the cap
    while abs(residual) >= tolerance and len(entries) < n:
        sigma = 1 if residual >= 0 else -1
        i = min(range(n), key=lambda k: abs(abs(residual) - angles[k]))
        residual -= sigma * angles[i]
        entries.append(ScheduleEntry(i=i, sigma=sigma, angle=elementary_angle(Trajectory.CIRCULAR, i, fmt)))
    return MicroRotationSchedule(entries=tuple(entries), source="recoding"), residual


def angle_recode_greedy(theta, n: int, fmt: Optional[QFormat] = None) -> MicroRotationSchedule:
    """Short signed combination of elementary angles reaching theta within 2^-n, cached per angle."""
    schedule, _ = _recode_with_residual(theta, n, fmt)
    return schedule


def _recode_with_residual(theta, n: int, fmt: Optional[QFormat]) -> Tuple[MicroRotationSchedule, float]:
    if isinstance(theta, FixedWord):
        fmt = fmt or theta.fmt
        theta = theta.to_real()
    fmt = fmt or ANGLE_WORD
    if n < 1:
        raise UsageError(f"recoding accuracy n must be >= 1, got {n}")
    if abs(theta) > convergence_bound(Trajectory.CIRCULAR, n):
        raise RangeError(f"angle {theta:.6f} rad is outside the circular convergence range")
    return RECODING_CACHE.get_or_build((theta, n, fmt), lambda: _greedy_schedule(theta, n, fmt))


def recoded_rotate(theta: float, vector: Sequence[FixedWord], config: EngineConfig) -> RunResult:
    """
    Apply the recoded schedule through micro_rotate at explicit shift indices.

    Past pi/4 the greedy schedule can repeat i = 0 and push a unit vector out of Q2.14;
    the registry entry octant-folds so the engine only sees [0, pi/4].
    """
    fmt = config.fmt
    schedule, residual = _recode_with_residual(theta, config.max_iterations, fmt)
    state = _vector_state(vector, FixedWord.from_real(theta, fmt))
    ops = OpCount()
    for entry in schedule:
        state = micro_rotate(replace(state, i=entry.i), entry.sigma, Trajectory.CIRCULAR)
        record_micro_rotation(ops, Trajectory.CIRCULAR)
    converged = abs(residual) < math.ldexp(1.0, -config.max_iterations)
    status = Status.CONVERGED if converged else Status.BUDGET_EXHAUSTED
    return _finish(config, state, schedule, ops, status, detail={"residual": residual})


# ---------- hybrid ----------

@dataclass(frozen=True)
class HybridConfig:
    m: int
    total_bits: int

    def __post_init__(self):
        if not 0 < self.m < self.total_bits:
            raise UsageError(f"hybrid split m must satisfy 0 < m < {self.total_bits}, got {self.m}")

    @classmethod
    def default(cls, total_bits: int) -> "HybridConfig":
        # atan(2^-i) equals 2^-i to within 2^-3i/3 from i = W/3 on
        return cls(m=math.ceil(total_bits / 3), total_bits=total_bits)


def hybrid_fine_sigmas(theta_r: FixedWord, m: int, n: int) -> List[int]:
    """
    sigma_i in {-1, +1} for i = m .. n-1 read from the bits of the residual.

    With N = n-1 and V = theta_r in units of 2^-N:
        B = floor((V + 2^(N-m+1) - 1) / 2), b_i = bit (N-i) of B, sigma_i = 2*b_i - 1
    """
    if not 0 < m < n:
        raise UsageError(f"fine block needs 0 < m < n, got m={m}, n={n}")
    N = n - 1
    frac = theta_r.fmt.frac_bits
    if N >= frac:
        v = theta_r.raw << (N - frac)
    else:
        v = (theta_r.raw + (1 << (frac - N - 1))) >> (frac - N)
    width = N - m + 1
    b = (v + (1 << width) - 1) >> 1
    b = min(max(b, 0), (1 << width) - 1)
    return [2 * ((b >> (N - i)) & 1) - 1 for i in range(m, n)]


def _coarse(theta: float, vector: Sequence[FixedWord], config: EngineConfig, iterations: int) -> RunResult:
    coarse_config = replace(config, mode=Mode.ROTATION, trajectory=Trajectory.CIRCULAR,
                            max_iterations=iterations, scale_correction=False)
    return conventional_rotate(theta, vector, coarse_config)


def hybrid_rotate(theta: float, vector: Sequence[FixedWord], config: EngineConfig,
                  cfg: Optional[HybridConfig] = None, flavor: str = "mixed") -> RunResult:
    """Coarse conventional block plus a fine block whose sigmas come straight from angle bits."""
    fmt = config.fmt
    cfg = cfg or HybridConfig.default(fmt.total_bits)
    if cfg.total_bits != fmt.total_bits:
        raise UsageError(f"HybridConfig is for {cfg.total_bits}-bit words, engine uses {fmt}")
    if flavor == "mixed":
        return _hybrid_mixed(theta, vector, config, cfg)
    if flavor == "partitioned":
        return _hybrid_partitioned(theta, vector, config, cfg)
    raise UsageError(f"Unknown hybrid flavor '{flavor}', expected mixed or partitioned")


def _hybrid_mixed(theta, vector, config: EngineConfig, cfg: HybridConfig) -> RunResult:
    n = config.max_iterations
    if cfg.m >= n:
        raise UsageError(f"hybrid split m={cfg.m} leaves no fine iterations out of {n}")
    coarse = _coarse(theta, vector, config, cfg.m)
    ops = coarse.ops
    entries = list(coarse.schedule.entries)
    theta_r = coarse.raw_state.z
    state = coarse.raw_state
    residual = theta_r.to_real()
    for offset, sigma in enumerate(hybrid_fine_sigmas(theta_r, cfg.m, n)):
        i = cfg.m + offset
        state = micro_rotate(replace(state, i=i), sigma, Trajectory.CIRCULAR)
        # fine block has no z adders
        ops.record(adds=2, shifts=2, iterations=1)
        entries.append(ScheduleEntry(i=i, sigma=sigma))
        residual -= sigma * math.ldexp(1.0, -i)
    state = replace(state, z=FixedWord.from_real(residual, config.fmt))
    status = Status.CONVERGED if state.z.magnitude_raw() <= config.z_epsilon_ulps else Status.BUDGET_EXHAUSTED
    schedule = MicroRotationSchedule(entries=tuple(entries), source="hybrid")
    return _finish(config, state, schedule, ops, status, detail={"theta_r": theta_r.to_real(), "m": cfg.m})


def _hybrid_partitioned(theta, vector, config: EngineConfig, cfg: HybridConfig) -> RunResult:
    fmt = config.fmt
    frac = fmt.frac_bits
    word = FixedWord.from_real(theta, fmt)
    if cfg.m >= frac:
        low_raw = 0
    else:
        low_raw = word.raw & ((1 << (frac - cfg.m)) - 1)
    high = FixedWord(raw=word.raw - low_raw, fmt=fmt)
    coarse = _coarse(high.to_real(), vector, config, config.max_iterations)
    ops = coarse.ops
    entries = list(coarse.schedule.entries)
    state = coarse.raw_state
    for i in range(cfg.m + 1, frac + 1):
        if (low_raw >> (frac - i)) & 1:
            state = micro_rotate(replace(state, i=i), 1, Trajectory.CIRCULAR)
            ops.record(adds=2, shifts=2, iterations=1)
            entries.append(ScheduleEntry(i=i, sigma=1))
    status = coarse.status
    schedule = MicroRotationSchedule(entries=tuple(entries), source="hybrid")
    detail = {"theta_high": high.to_real(), "theta_low": math.ldexp(low_raw, -frac), "m": cfg.m}
    return _finish(config, state, schedule, ops, status, detail=detail)


# ---------- RICO ----------

@dataclass(frozen=True)
class RicoConfig:
    """Fixed-latency engine; merged_head maps (direction, s0, s1, s2) to the rotated IV."""
    total_iterations: int
    prerotation_angle: FixedWord
    merged_head: Dict[Tuple[int, int, int, int], Vector] = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        if not 4 <= self.total_iterations <= self.fmt.total_bits:
            raise UsageError(
                f"RICO needs 4..{self.fmt.total_bits} iterations for {self.fmt}, got {self.total_iterations}"
            )

    @property
    def fmt(self) -> QFormat:
        return self.prerotation_angle.fmt

    @classmethod
    def build(cls, total_iterations: int, fmt: QFormat) -> "RicoConfig":
        return _build_rico(total_iterations, fmt)


@lru_cache(maxsize=None)
def _build_rico(total_iterations: int, fmt: QFormat) -> RicoConfig:
    step = math.radians(RICO_PREROTATION_DEGREES)
    head: Dict[Tuple[int, int, int, int], Vector] = {}
    for direction in (1, -1):
        # IV = (1, 0) rotated twice by 7 degrees
        x0, y0 = math.cos(2 * step), direction * math.sin(2 * step)
        for s0 in (1, -1):
            for s1 in (1, -1):
                for s2 in (1, -1):
                    x, y = x0, y0
                    for t, sigma in enumerate((s0, s1, s2)):
                        x, y = x - sigma * math.ldexp(y, -t), y + sigma * math.ldexp(x, -t)
                    head[(direction, s0, s1, s2)] = (FixedWord.from_real(x, fmt), FixedWord.from_real(y, fmt))
    logger.debug(f"Built RICO head table for {fmt}, {total_iterations} iterations")
    return RicoConfig(total_iterations=total_iterations, prerotation_angle=FixedWord.from_real(step, fmt),
                      merged_head=head)


def _is_unit_x(vector: Sequence[FixedWord]) -> bool:
    return vector[0].raw == 1 << vector[0].fmt.frac_bits and vector[1].raw == 0


def rico_rotate(theta: float, vector: Optional[Sequence[FixedWord]], cfg: RicoConfig,
                config: Optional[EngineConfig] = None) -> RunResult:
    """All sigmas generated up front; iterations 0..2 applied as one merged step; fixed op count."""
    fmt = cfg.fmt
    config = config or EngineConfig(fmt=fmt, max_iterations=cfg.total_iterations)
    if vector is None:
        vector = (FixedWord.from_real(1.0, fmt), FixedWord.zero(fmt))
    direction = 1 if theta >= 0 else -1
    ops = OpCount()

    # sigma generation: z-recurrence replay on theta minus the two pre-rotations
    pre = cfg.prerotation_angle + cfg.prerotation_angle
    z = FixedWord.from_real(theta, fmt)
    z = z - pre if direction > 0 else z + pre
    ops.record(adds=2)
    sigmas: List[int] = []
    for i in range(cfg.total_iterations):
        sigma = 1 if z.raw >= 0 else -1
        angle = elementary_angle(Trajectory.CIRCULAR, i, fmt)
        z = z - angle if sigma > 0 else z + angle
        sigmas.append(sigma)
    ops.record(adds=cfg.total_iterations)

    if _is_unit_x(vector):
        x, y = cfg.merged_head[(direction, sigmas[0], sigmas[1], sigmas[2])]
        ops.record(iterations=3)
    else:
        c = FixedWord.from_real(math.cos(2 * math.radians(RICO_PREROTATION_DEGREES)), fmt)
        s = FixedWord.from_real(direction * math.sin(2 * math.radians(RICO_PREROTATION_DEGREES)), fmt)
        vx, vy = vector
        px, py = fx_mul(vx, c) - fx_mul(vy, s), fx_mul(vx, s) + fx_mul(vy, c)
        ops.record(adds=2, multiplies=4)
        x, y, head_ops = lookahead_merge(px, py, LookaheadBlock.build(sigmas[:3]))
        ops = ops + head_ops

    state = CordicState(x=x, y=y, z=z, i=3)
    for i in range(3, cfg.total_iterations):
        sigma = sigmas[i]
        shifted_y, shifted_x = fx_shr(state.y, i), fx_shr(state.x, i)
        x_next = state.x - shifted_y if sigma > 0 else state.x + shifted_y
        y_next = state.y + shifted_x if sigma > 0 else state.y - shifted_x
        state = CordicState(x=x_next, y=y_next, z=state.z, i=i + 1)
        ops.record(adds=2, shifts=2, iterations=1)

    schedule = MicroRotationSchedule(entries=tuple(ScheduleEntry(i=i, sigma=s) for i, s in enumerate(sigmas)),
                                     source="conventional")
    limit = elementary_angle(Trajectory.CIRCULAR, cfg.total_iterations - 1, fmt).raw + config.z_epsilon_ulps
    status = Status.CONVERGED if z.magnitude_raw() <= limit else Status.BUDGET_EXHAUSTED
    return _finish(config, state, schedule, ops, status, detail={"direction": direction})


# ---------- exact reference ----------

def exact_rotate(theta: float, vector: Sequence[FixedWord], config: EngineConfig) -> RunResult:
    """Real-arithmetic rotation, quantized once; the zero-error reference column."""
    vx, vy = vector[0].to_real(), vector[1].to_real()
    c, s = math.cos(theta), math.sin(theta)
    x, y = vx * c - vy * s, vx * s + vy * c
    fmt = config.fmt
    state = CordicState(x=FixedWord.from_real(x, fmt), y=FixedWord.from_real(y, fmt), z=FixedWord.zero(fmt))
    return RunResult(state=state, raw_state=state, k=1.0, ops=OpCount(), status=Status.CONVERGED,
                     detail={"prequant": (x, y)})


# ---------- registry ----------

Engine = Callable[[float, Sequence[FixedWord], EngineConfig], RunResult]


@dataclass(frozen=True)
class Variant:
    name: str
    engine: Engine
    octant_fold: bool = False
    description: str = ""


def _scale_free_engine(theta, vector, config):
    return scale_free_rotate(theta, vector, config)


def _rico_engine(theta, vector, config):
    return rico_rotate(theta, vector, RicoConfig.build(config.max_iterations, config.fmt), config)


VARIANTS: Dict[str, Variant] = {
    v.name: v
    for v in (
        Variant("exact", exact_rotate, description="real arithmetic reference"),
        Variant("conventional", lambda t, v, c: conventional_rotate(t, v, c),
                description="radix-2 shift-add with final scale correction"),
        Variant("scale-free", _scale_free_engine, octant_fold=True,
                description="leading-one detection, third-order Taylor stages, no correction"),
        Variant("lookahead", lookahead_rotate, description="four micro-rotations merged per block"),
        Variant("hybrid-mixed", lambda t, v, c: hybrid_rotate(t, v, c, flavor="mixed"),
                description="conventional coarse block, bit-read fine block"),
        Variant("hybrid-partitioned", lambda t, v, c: hybrid_rotate(t, v, c, flavor="partitioned"),
                description="angle split into MSB/LSB blocks before iterating"),
        Variant("angle-recoding", recoded_rotate, octant_fold=True,
                description="greedy elementary-angle recoding"),
        Variant("radix-4", radix4_rotate, description="sigma in {-2..2}, two bits per iteration"),
        Variant("rico", _rico_engine, description="fixed latency, merged first three iterations"),
    )
}


def get_variant(name: str) -> Variant:
    variant = VARIANTS.get(name)
    if variant is None:
        raise UsageError(f"Unknown variant '{name}', expected one of: {', '.join(VARIANTS)}")
    return variant


def _swap_mirror(state: CordicState, complement: bool, mirror: bool) -> CordicState:
    x, y = state.x, state.y
    if complement:
        x, y = y, x
    if mirror:
        y = -y
    return replace(state, x=x, y=y)


def octant_fold_rotate(engine: Engine, theta: float, vector: Sequence[FixedWord], config: EngineConfig) -> RunResult:
    """
    Rotate with an engine that only accepts [0, pi/4]:
      theta < 0      -> conjugate in, conjugate out
      theta > pi/4   -> rotate the conjugate by pi/2 - theta, swap x and y out
    """
    if abs(theta) > math.pi / 2:
        raise RangeError(f"octant fold takes |theta| <= pi/2, got {theta:.6f}; fold the quadrant first")
    x, y = vector[0], vector[1]
    mirror = theta < 0
    if mirror:
        theta, y = -theta, -y
    complement = theta > math.pi / 4
    if complement:
        theta, y = math.pi / 2 - theta, -y
    result = engine(theta, (x, y), config)
    detail = dict(result.detail)
    if "prequant" in detail:
        px, py = detail["prequant"]
        if complement:
            px, py = py, px
        detail["prequant"] = (px, -py if mirror else py)
    return replace(result,
                   state=_swap_mirror(result.state, complement, mirror),
                   raw_state=_swap_mirror(result.raw_state, complement, mirror),
                   detail=detail)


def rotate_with(name: str, theta: float, vector: Sequence[FixedWord], config: EngineConfig) -> RunResult:
    """Rotate `vector` by `theta` radians with the named variant."""
    variant = get_variant(name)
    if variant.octant_fold:
        return octant_fold_rotate(variant.engine, theta, vector, config)
    return variant.engine(theta, vector, config)
