import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from inc_anneal.schedule import (
    ConfigError,
    FractionalFactor,
    Schedule,
    ScheduleState,
    bg_voltage_for,
    fractional_factor_value,
    schedule_step,
)

from oracles import fractional


def test_default_factor_anchor_values():
    f = FractionalFactor()
    assert f(0) == pytest.approx(0.0, abs=1e-15)
    assert f(500) == pytest.approx(0.3, abs=1e-12)
    assert f(700) == pytest.approx(1.05, abs=1e-12)


def test_factor_matches_reference_on_grid():
    f = FractionalFactor()
    for T in Schedule().grid():
        assert f(T) == fractional(T)


def test_grid_shape():
    s = Schedule()
    g = s.grid()
    assert s.steps == 70 and s.levels == 71 and g.size == 71
    assert g[0] == 700.0 and g[-1] == 0.0
    assert np.allclose(np.diff(g), -10.0)
    assert s.v_bg(0) == 0.7 and s.v_bg(70) == 0.0
    assert s.v_bg(35) == pytest.approx(0.35)


def test_voltage_temperature_map():
    s = Schedule()
    for lv in range(s.levels):
        assert s.level_for_voltage(s.v_bg(lv)) == lv
        assert bg_voltage_for(s.temperature(lv), s) == s.v_bg(lv)
    assert s.temperature_for_voltage(0.35) == pytest.approx(350.0)
    with pytest.raises(ValueError):
        s.level_for_voltage(0.355)
    with pytest.raises(ValueError):
        s.level_for_temperature(1000.0)


def test_schedule_validation():
    with pytest.raises(ConfigError):
        Schedule(t_max=0)
    with pytest.raises(ConfigError):
        Schedule(v_bg_step=0.03)


def test_schedule_state_walk():
    st_ = ScheduleState(Schedule(), iterations_per_level=3)
    seen = []
    while True:
        T, V, done = schedule_step(st_)
        if done:
            break
        seen.append(T)
    assert len(seen) == 70 * 3
    assert seen[:4] == [700.0, 700.0, 700.0, 690.0]
    assert seen[-1] == 10.0
    assert st_.step() == (0.0, 0.0, True)
    with pytest.raises(ConfigError):
        ScheduleState(Schedule(), 0)


def test_default_iterations_per_level():
    s = Schedule()
    assert s.default_iterations_per_level(700) == 10
    assert s.default_iterations_per_level(701) == 11
    assert s.default_iterations_per_level(5) == 1


@pytest.mark.parametrize("params, msg", [
    ({"b": -1 / 140}, "pole"),
    ({"b": 0.006, "d": 0.0}, "increasing"),
    ({"d": -0.5}, "positive"),
    ({"a": float("nan")}, "finite"),
])
def test_factor_rejections(params, msg):
    with pytest.raises(ConfigError, match=msg):
        FractionalFactor(**params)


def _accepted(a, b, c, d):
    try:
        FractionalFactor(a, b, c, d)
        return True
    except ConfigError:
        return False


@settings(max_examples=300, deadline=None)
@given(st.floats(-3, 3), st.floats(-0.02, 0.02), st.floats(-10, 10), st.floats(-1, 1))
def test_factor_constructor_matches_contract(a, b, c, d):
    grid = np.linspace(0, 700, 71)
    den = b * grid + c
    ok = bool(np.all(den != 0)) and (c > 0) == (b * 700 + c > 0) and c != 0 and b * 700 + c != 0
    if ok:
        with np.errstate(over="ignore"):
            f = a / den + d
        ok = bool(np.all(np.isfinite(f)) and np.all(f[1:] > 0) and np.all(np.diff(f) > 0))
    assert _accepted(a, b, c, d) == ok


def test_factor_value_range():
    f = FractionalFactor()
    assert fractional_factor_value(f, 350) == f(350)
    with pytest.raises(ValueError):
        fractional_factor_value(f, 701)
    assert math.isfinite(fractional_factor_value(f, 0))
