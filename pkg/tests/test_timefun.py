import json
import math

import numpy as np
import pytest

from caustica.timefun import (
    Constant,
    DomainError,
    FunctionProfile,
    PiecewiseConstant,
    Polynomial,
    ProfileParseError,
    ProfileValidationError,
    Tabulated,
    parse_profile,
    profile_from_dict,
    zero,
)


def test_constant():
    assert Constant(4.0).eval(0.3) == 4.0
    assert np.all(Constant(4.0).eval(np.linspace(0, 1, 5)) == 4.0)


def test_tabulated_midpoint():
    assert Tabulated([0, 1], [0, 2]).eval(0.5) == pytest.approx(1.0)


def test_tabulated_exact_at_samples():
    t = np.array([0.0, 0.3, 0.7, 1.0])
    v = np.array([1.0, -2.5, 3.25, 0.125])
    prof = Tabulated(t, v)
    assert np.array_equal(prof.eval(t), v)


def test_polynomial():
    assert Polynomial([1, -2], horizon=1.0).eval(0.25) == pytest.approx(0.5)


def test_piecewise_polynomial_left_continuous():
    prof = Polynomial([[0.0, 1.0], [5.0]], breakpoints=[0.0, 1.0, 2.0])
    assert prof.eval(1.0) == pytest.approx(1.0)
    assert prof.eval(1.0, side="right") == pytest.approx(5.0)


def test_piecewise_constant_left_continuous():
    prof = PiecewiseConstant([0.0, 1.0, 2.0], [3.0, -1.0])
    assert prof.eval(1.0) == 3.0
    assert prof.eval(1.0, side="right") == -1.0
    assert prof.eval(0.0) == 3.0
    assert prof.eval(2.0) == -1.0
    assert prof.breakpoints() == (1.0,)


def test_domain_error():
    with pytest.raises(DomainError):
        Tabulated([0, 1], [0, 2]).eval(1.5)
    with pytest.raises(DomainError):
        Constant(1.0).eval(-0.1)


@pytest.mark.parametrize("spec", [
    {"kind": "constant", "value": 1.0},
    {"kind": "tabulated", "t": [0, 1], "v": [0, 2]},
    {"kind": "piecewise_constant", "breakpoints": [0, 0.5, 2], "values": [1, 2]},
    {"kind": "polynomial", "coefficients": [1, 0, -0.5], "horizon": 3.0},
])
def test_round_trip(spec):
    prof = parse_profile(spec)
    again = parse_profile(prof.to_json())
    t = np.linspace(0, 0.5, 11)
    assert np.array_equal(prof.eval(t), again.eval(t))
    assert again.to_dict() == prof.to_dict()


def test_parse_kinds():
    assert isinstance(parse_profile('{"kind":"constant","value":1.0}'), Constant)
    assert isinstance(parse_profile({"kind": "tabulated", "t": [0, 1], "v": [0, 2]}), Tabulated)


def test_non_monotone_rejected():
    with pytest.raises(ProfileValidationError):
        parse_profile({"kind": "tabulated", "t": [1, 0], "v": [0, 2]})


def test_empty_piece_rejected():
    with pytest.raises(ProfileValidationError):
        parse_profile({"kind": "piecewise_constant", "breakpoints": [0, 1, 1], "values": [1, 2]})


def test_parse_error_has_position():
    with pytest.raises(ProfileParseError) as info:
        parse_profile('{"kind": "constant",\n "value": }')
    assert info.value.lineno == 2


def test_validation_error_names_field():
    with pytest.raises(ProfileValidationError) as info:
        profile_from_dict({"kind": "constant"}, "lambda")
    assert "lambda" in str(info.value)
    with pytest.raises(ProfileValidationError):
        profile_from_dict({"kind": "cubic"})


def test_covers_and_horizon():
    prof = Tabulated([0, 2], [1, 1])
    assert prof.covers(2.0) and not prof.covers(2.5)
    assert Constant(1.0).covers(1e9)


def test_function_profile_is_in_process_only():
    prof = FunctionProfile(np.sin, math.pi)
    assert prof.eval(math.pi / 2) == pytest.approx(1.0)
    with pytest.raises(Exception):
        prof.to_json()


def test_zero_and_max_abs():
    assert zero().eval(3.0) == 0.0
    assert Tabulated([0, 1], [-3, 2]).max_abs() == pytest.approx(3.0)


def test_profiles_are_hashable_and_frozen():
    prof = Constant(2.0)
    hash(prof)
    with pytest.raises(Exception):
        prof.value = 3.0
    json.loads(prof.to_json())
