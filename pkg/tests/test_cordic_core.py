import math
import random
from dataclasses import replace

import pytest

from cordic_core import (
    CordicState,
    EngineConfig,
    MicroRotationSchedule,
    Mode,
    ScheduleEntry,
    Status,
    Trajectory,
    elementary_angle,
    index_sequence,
    micro_rotate,
    rotate,
    run,
    scale_factor,
    sigma_select,
)
from errors import DomainError, UsageError
from fixnum import Q2_14, FixedWord, QFormat

TOL = 2 ** -10


def state(x, y, z, fmt=Q2_14, i=0):
    return replace(CordicState.from_reals(x, y, z, fmt), i=i)


def test_elementary_angles():
    assert elementary_angle(Trajectory.CIRCULAR, 0).raw == FixedWord.from_real(math.pi / 4, Q2_14).raw
    assert elementary_angle(Trajectory.LINEAR, 3).raw == 2048
    assert elementary_angle(Trajectory.HYPERBOLIC, 1).to_real() == pytest.approx(math.atanh(0.5), abs=Q2_14.ulp)
    with pytest.raises(DomainError):
        elementary_angle(Trajectory.HYPERBOLIC, 0)


def test_hyperbolic_index_sequence_repeats_4_and_13():
    indices = index_sequence(Trajectory.HYPERBOLIC, 16)
    assert indices[:5] == [1, 2, 3, 4, 4]
    assert indices.count(13) == 2
    assert len(indices) == 17
    assert max(indices) == 15


def test_sigma_selection():
    assert sigma_select(Mode.ROTATION, state(1, 0, 0.3)) == 1
    assert sigma_select(Mode.ROTATION, state(1, 0, 0.0)) == 1
    assert sigma_select(Mode.ROTATION, state(1, 0, -0.3)) == -1
    assert sigma_select(Mode.VECTORING, state(1, -0.2, 0)) == 1
    assert sigma_select(Mode.VECTORING, state(1, 0.2, 0)) == -1


def test_first_circular_micro_rotation_exhausts_45_degrees():
    out = micro_rotate(state(1, 0, math.pi / 4), 1, Trajectory.CIRCULAR)
    assert (out.x.to_real(), out.y.to_real(), out.z.raw, out.i) == (1.0, 1.0, 0, 1)


def test_linear_micro_rotation_leaves_x_alone():
    out = micro_rotate(state(0.5, 0.25, 0), -1, Trajectory.LINEAR)
    assert out.x.to_real() == 0.5
    assert out.y.to_real() == -0.25
    assert out.z.to_real() == 1.0


def test_two_steps_match_integer_replay():
    s = micro_rotate(state(1, 0, 0.4712), 1, Trajectory.CIRCULAR)
    s = micro_rotate(s, 1, Trajectory.CIRCULAR)
    # x: 16384 -> 16384 -> 16384 - 8192; y: 0 -> 16384 -> 16384 + 8192
    assert (s.x.raw, s.y.raw) == (8192, 24576)
    assert s.x.raw ** 2 + s.y.raw ** 2 == (16384 ** 2) * 2 * 5 // 4


@pytest.mark.parametrize("i", [0, 1, 2, 3])
def test_pseudo_rotation_norm_growth_is_exact_without_lost_bits(i):
    rng = random.Random(i)
    for _ in range(20):
        x = rng.randint(-1000, 1000) << 4
        y = rng.randint(-1000, 1000) << 4
        s = CordicState(x=FixedWord(x, Q2_14), y=FixedWord(y, Q2_14), z=FixedWord.zero(Q2_14), i=i)
        out = micro_rotate(s, rng.choice((-1, 1)), Trajectory.CIRCULAR)
        assert (out.x.raw ** 2 + out.y.raw ** 2) * 4 ** i == (x * x + y * y) * (4 ** i + 1)


def test_micro_rotate_rejects_radix4_digits():
    with pytest.raises(UsageError):
        micro_rotate(state(1, 0, 0), 2, Trajectory.CIRCULAR)


def test_scale_factor_values():
    assert scale_factor(1) == pytest.approx(1 / math.sqrt(2), abs=1e-15)
    assert scale_factor(30) == pytest.approx(0.60725, abs=5e-4)
    with pytest.raises(UsageError):
        scale_factor(0)


def test_scale_factor_decreases_with_n():
    values = [scale_factor(n) for n in range(1, 31)]
    assert all(b <= a for a, b in zip(values, values[1:]))
    assert all(b < a for a, b in zip(values[:20], values[1:20]))


def test_scale_factor_over_schedules():
    skipped = MicroRotationSchedule(entries=(ScheduleEntry(0, 0), ScheduleEntry(3, 0)), source="recoding")
    assert scale_factor(2, skipped) == 1.0
    radix4 = MicroRotationSchedule(entries=(ScheduleEntry(0, 2),), source="radix4")
    assert scale_factor(1, radix4) == pytest.approx(1 / math.sqrt(5), rel=1e-15)
    assert scale_factor(17, trajectory=Trajectory.HYPERBOLIC) == pytest.approx(1.2075, rel=1e-3)


def test_schedule_rejects_radix4_digit_outside_radix4():
    with pytest.raises(UsageError):
        MicroRotationSchedule(entries=(ScheduleEntry(0, 2),), source="recoding")


def test_zero_angle_is_identity(config, unit_x):
    result = rotate(0.0, unit_x, config)
    assert result.ops.iterations == 0
    assert result.k == 1.0
    assert result.status is Status.CONVERGED
    assert (result.state.x.raw, result.state.y.raw) == (unit_x[0].raw, 0)


def test_rotation_60_degrees(config, unit_x):
    result = rotate(math.radians(60), unit_x, config)
    assert abs(result.state.x.to_real() - 0.5) < TOL
    assert abs(result.state.y.to_real() - math.sqrt(3) / 2) < TOL
    n = result.ops.iterations
    assert (result.ops.adds, result.ops.shifts, result.ops.multiplies) == (3 * n, 2 * n, 2)


def test_rotation_sweep_stays_within_2_to_minus_10(config, unit_x):
    worst = 0.0
    for k in range(256):
        theta = math.radians(-90 + 180 * k / 255)
        result = rotate(theta, unit_x, config)
        worst = max(worst, abs(result.state.x.to_real() - math.cos(theta)),
                    abs(result.state.y.to_real() - math.sin(theta)))
    assert worst < TOL


def test_rotation_residual_bound(config, unit_x):
    limit = elementary_angle(Trajectory.CIRCULAR, 15).raw + 16
    for k in range(64):
        theta = math.radians(-99 + 198 * k / 63)
        assert abs(rotate(theta, unit_x, config).raw_state.z.raw) <= limit


def test_vectoring_recovers_angle_and_magnitude():
    fmt = QFormat(18, 14)
    cfg = EngineConfig(mode=Mode.VECTORING, fmt=fmt)
    result = run(cfg, state(1, 1, 0, fmt))
    assert abs(result.state.z.to_real() - math.pi / 4) < TOL
    assert abs(result.state.x.to_real() - math.sqrt(2)) < TOL


def test_vectoring_then_rotation_round_trip(config):
    tol = 2 ** -9
    a, b = 0.6, 0.3
    polar = run(replace(config, mode=Mode.VECTORING), state(a, b, 0))
    back = rotate(polar.state.z.to_real(), (polar.state.x, FixedWord.zero(Q2_14)), config)
    assert abs(back.state.x.to_real() - a) < tol
    assert abs(back.state.y.to_real() - b) < tol


def test_budget_exhaustion_is_reported_not_raised(unit_x):
    result = rotate(math.radians(60), unit_x, EngineConfig(max_iterations=3))
    assert result.status is Status.BUDGET_EXHAUSTED
    assert result.ops.iterations == 3


def test_config_validation():
    with pytest.raises(UsageError):
        EngineConfig(max_iterations=17)
    with pytest.raises(UsageError):
        EngineConfig(max_iterations=0)
    with pytest.raises(UsageError):
        EngineConfig(z_epsilon_ulps=0)
    assert "iterations=16" in EngineConfig().snapshot()


def test_state_words_share_a_format():
    with pytest.raises(UsageError):
        CordicState(x=FixedWord.zero(Q2_14), y=FixedWord.zero(QFormat(16, 12)), z=FixedWord.zero(Q2_14))


def test_hyperbolic_vectoring_needs_y_smaller_than_x():
    cfg = EngineConfig(mode=Mode.VECTORING, trajectory=Trajectory.HYPERBOLIC)
    with pytest.raises(DomainError):
        run(cfg, state(0.5, 0.5, 0))


def test_engine_format_must_match_state(unit_x):
    with pytest.raises(UsageError):
        run(EngineConfig(fmt=QFormat(16, 12)), state(1, 0, 0))
