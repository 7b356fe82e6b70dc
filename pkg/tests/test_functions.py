import math
import random

import pytest

from cordic_core import EngineConfig, Status
from errors import CordicZeroDivisionError, DomainError, RangeError, UsageError
from functions import (
    RECIPES,
    Function,
    FunctionRequest,
    atan,
    divide,
    divide_limit,
    evaluate,
    exp,
    ln,
    ln_sqrt,
    ln_sqrt_region,
    polar_to_rect,
    quadrant_fold,
    recipe_snapshot,
    rect_to_polar,
    reference,
    sin_cos,
    sinh_cosh,
    sqrt,
    tan,
    tanh,
)
from variants import RECODING_CACHE

TOL = 2 ** -10


def test_parse_accepts_hyphens():
    assert Function.parse("sin-cos") is Function.SIN_COS
    assert Function.parse(" LN_SQRT ") is Function.LN_SQRT
    with pytest.raises(UsageError):
        Function.parse("cosec")


def test_request_checks_arity_and_variant(config):
    with pytest.raises(UsageError):
        FunctionRequest(function=Function.DIVIDE, args=(1.0,), config=config)
    with pytest.raises(UsageError):
        FunctionRequest(function=Function.ATAN, args=(1.0,), config=config, variant="rico")
    with pytest.raises(UsageError):
        FunctionRequest(function=Function.SIN_COS, args=(1.0,), config=config, variant="nope")
    FunctionRequest(function=Function.SIN_COS, args=(1.0,), config=config, variant="rico")


def test_recipe_snapshot_uses_the_function_mode(config):
    assert recipe_snapshot(Function.DIVIDE, config).startswith("mode=vectoring trajectory=linear ")
    assert recipe_snapshot(Function.SIN_COS, config) == config.snapshot()
    tanh_line = recipe_snapshot(Function.TANH, config)
    assert tanh_line.startswith("mode=rotation trajectory=hyperbolic ")
    assert tanh_line.endswith(" then mode=vectoring trajectory=linear")
    assert set(RECIPES) == set(Function)


def test_quadrant_fold():
    assert quadrant_fold(0.3) == (0.3, False)
    folded, negate = quadrant_fold(math.pi)
    assert negate and abs(folded) < 1e-15
    folded, negate = quadrant_fold(-2.5)
    assert negate and folded == pytest.approx(-2.5 + math.pi)
    folded, negate = quadrant_fold(2 * math.pi + 0.2)
    assert not negate and folded == pytest.approx(0.2)


# ---------- circular ----------

def test_sin_cos_all_quadrants(config):
    for degrees in range(-360, 361, 15):
        theta = math.radians(degrees)
        result = sin_cos(theta, config)
        assert abs(result.values["cos"] - math.cos(theta)) < TOL
        assert abs(result.values["sin"] - math.sin(theta)) < TOL


def test_sin_cos_prequant_is_close_to_output(config):
    result = sin_cos(0.4, config)
    assert abs(result.prequant["cos"] - result.values["cos"]) <= 2 * config.fmt.ulp
    assert abs(result.prequant["sin"] - result.values["sin"]) <= 2 * config.fmt.ulp


def test_sin_cos_budget_exhausted():
    result = sin_cos(1.0, EngineConfig(max_iterations=3))
    assert result.status is Status.BUDGET_EXHAUSTED
    assert result.ops.iterations == 3


def test_sin_cos_rejects_non_finite(config):
    with pytest.raises(RangeError):
        sin_cos(math.inf, config)


def test_polar_to_rect(config):
    exact = polar_to_rect(1.0, 0.0, config)
    assert exact.values == {"x": 1.0, "y": 0.0}
    assert polar_to_rect(0.0, 1.2, config).values == {"x": 0.0, "y": 0.0}
    result = polar_to_rect(3.0, math.radians(120), config)
    assert abs(result.values["x"] - 3 * math.cos(math.radians(120))) < 4 * TOL
    assert abs(result.values["y"] - 3 * math.sin(math.radians(120))) < 4 * TOL
    with pytest.raises(RangeError):
        polar_to_rect(-1.0, 0.0, config)


def test_tan(config):
    assert abs(tan(math.radians(30), config).values["tan"] - math.tan(math.radians(30))) < 2 ** -9
    with pytest.raises(RangeError):
        tan(math.radians(80), config)


def test_rotation_functions_accept_any_variant(config):
    theta = math.radians(35)
    for variant in ("lookahead", "radix-4", "rico", "hybrid-mixed"):
        result = sin_cos(theta, config, variant)
        assert abs(result.values["cos"] - math.cos(theta)) < 2 ** -9


def test_recoding_cache_is_transparent(config):
    first = sin_cos(1.1, config, "angle-recoding")
    RECODING_CACHE.clear()
    second = sin_cos(1.1, config, "angle-recoding")
    assert first.values == second.values
    assert first.ops == second.ops


# ---------- vectoring ----------

def test_atan(config):
    for a in (-8.0, -1.0, -0.3, 0.0, 0.5, 1.0, 3.0):
        assert abs(atan(a, config).values["angle"] - math.atan(a)) < 2 ** -9


def test_rect_to_polar(config):
    result = rect_to_polar(3.0, 4.0, config)
    assert abs(result.values["magnitude"] / 5.0 - 1) < 2 ** -9
    assert abs(result.values["phase"] - math.atan2(4, 3)) < TOL


def test_polar_round_trip(config):
    for r in (0.75, 0.9, 1.5):
        for degrees in range(-165, 166, 15):
            theta = math.radians(degrees)
            rect = polar_to_rect(r, theta, config).values
            polar = rect_to_polar(rect["x"], rect["y"], config).values
            assert abs(polar["magnitude"] - r) < 2 ** -9 * max(1.0, r)
            assert abs(polar["phase"] - theta) < 2 ** -9


def test_rect_to_polar_left_half_plane(config):
    assert rect_to_polar(-1.0, 0.0, config).values == {"magnitude": 1.0, "phase": math.pi}
    result = rect_to_polar(-0.5, -0.5, config)
    assert abs(result.values["phase"] - math.atan2(-0.5, -0.5)) < TOL
    with pytest.raises(DomainError):
        rect_to_polar(0.0, 0.0, config)


def test_divide_exact_cases(config):
    assert divide(1.0, 2.0, config).values["quotient"] == 0.5
    assert divide(0.0, 5.0, config).values["quotient"] == 0.0


def test_divide_sweep(config):
    for i in range(32):
        a = 0.5 + i * 2 ** -6
        for b in (-0.9 * a, -0.3 * a, 0.1 * a, 0.7 * a):
            assert abs(divide(b, a, config).values["quotient"] * a - b) < TOL


def test_divide_random_pairs(config):
    rng = random.Random(10)
    for _ in range(1000):
        a = rng.uniform(0.55, 1.0)
        b = rng.uniform(-1.0, 1.0)
        assert abs(divide(b, a, config).values["quotient"] * a - b) < TOL


def test_divide_negative_denominator(config):
    assert abs(divide(0.75, -1.5, config).values["quotient"] + 0.5) < TOL


def test_divide_errors(config):
    with pytest.raises(CordicZeroDivisionError):
        divide(1.0, 0.0, config)
    with pytest.raises(RangeError):
        divide(3.0, 1.0, config)
    assert divide_limit(config) < 2.0


# ---------- hyperbolic ----------

def test_cosh_sinh_identity(config):
    for k in range(23):
        theta = -1.1 + 0.1 * k
        result = sinh_cosh(theta, config)
        c, s = result.values["cosh"], result.values["sinh"]
        assert abs(c * c - s * s - 1) < 2 ** -7
        assert abs(c - math.cosh(theta)) < 2 ** -8


def test_exp_product(config):
    for k in range(23):
        theta = -1.1 + 0.1 * k
        assert abs(exp(theta, config).values["exp"] * exp(-theta, config).values["exp"] - 1) < 2 ** -6


def test_tanh(config):
    assert abs(tanh(0.5, config).values["tanh"] - math.tanh(0.5)) < 2 ** -8


def test_hyperbolic_out_of_range(config):
    with pytest.raises(DomainError):
        sinh_cosh(2.0, config)


def test_ln_sqrt_of_one(config):
    assert ln_sqrt(1.0, config).values == {"ln": 0.0, "sqrt": 1.0}


def test_sqrt_squares_back(config):
    for k in range(23):
        a = 0.15 + 0.1 * k
        assert abs(sqrt(a, config).values["sqrt"] ** 2 - a) < 2 ** -6


def test_ln(config):
    for a in (0.25, 0.5, 2.0, 4.0):
        assert abs(ln(a, config).values["ln"] - math.log(a)) < 2 ** -7


def test_ln_domain_and_region(config):
    with pytest.raises(DomainError):
        ln(0.0, config)
    with pytest.raises(DomainError):
        sqrt(-4.0, config)
    low, high = ln_sqrt_region(config)
    assert low < 0.15 and high > 8
    with pytest.raises(RangeError):
        ln(high * 2, config)


# ---------- dispatch ----------

def test_evaluate_exact_uses_reference(config):
    request = FunctionRequest(function=Function.EXP, args=(0.5,), config=config, variant="exact")
    result = evaluate(request)
    assert result.values == {"exp": math.exp(0.5)}
    assert result.ops.iterations == 0


def test_evaluate_matches_direct_call(config):
    request = FunctionRequest(function=Function.SIN_COS, args=(0.25,), config=config, variant="lookahead")
    assert evaluate(request).values == sin_cos(0.25, config, "lookahead").values
    request = FunctionRequest(function=Function.DIVIDE, args=(0.25, 0.75), config=config)
    assert evaluate(request).values == divide(0.25, 0.75, config).values


def test_reference_values():
    assert reference(Function.RECT_TO_POLAR, (3.0, 4.0)) == {"magnitude": 5.0, "phase": math.atan2(4, 3)}
    with pytest.raises(CordicZeroDivisionError):
        reference(Function.DIVIDE, (1.0, 0.0))


def test_divide_one_third(config):
    assert abs(divide(1.0, 3.0, config).values["quotient"] - 1 / 3) < TOL
