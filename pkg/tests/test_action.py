import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from resolab.action import (action, action_derivatives, action_prime_direct,
                            bohr_sommerfeld_energy, turning_points)
from resolab.errors import RangeError
from resolab.model import CrossingModel, default_model

# mpmath quadratures of the default well
A0 = 0.37980981551320503
A1 = 1.6580906319783955
# mpmath finite differences of the mpmath action at 40 digits
A2 = 0.95832953563923911
A3 = 2.5668181651874746


def test_action_at_crossing(default_actions):
    assert default_actions.a0 == pytest.approx(A0, rel=1e-13)
    assert action(default_model(), 0.0) == pytest.approx(A0, rel=1e-13)


def test_derivatives(default_actions):
    assert default_actions.a1 == pytest.approx(A1, rel=1e-10)
    assert default_actions.a1_direct == pytest.approx(A1, rel=1e-13)
    assert default_actions.a2 == pytest.approx(A2, rel=1e-8)
    assert default_actions.a3 == pytest.approx(A3, rel=1e-6)


def test_direct_slope_matches_differences():
    m = default_model()
    assert action_prime_direct(m) == pytest.approx(A1, rel=1e-13)


def test_polynomial_well_exact():
    # V = x^2 + x, so the area is pi R^2 / 2 with R^2 = E + 1/4
    m = CrossingModel(family="polynomial")
    for e in (-0.2, -0.1, 0.0, 0.3):
        assert action(m, e) == pytest.approx(math.pi * (e + 0.25) / 2, rel=1e-13)
    act = action_derivatives(m)
    assert act.a1 == pytest.approx(math.pi / 2, rel=1e-10)
    assert abs(act.a2) < 1e-6 and abs(act.a3) < 1e-4


def test_turning_points():
    m = default_model()
    assert turning_points(m, 0.0) == (-1.0, 0.0)
    for e in (-0.05, 0.02):
        a, b = turning_points(m, e)
        assert float(m.v1(a)) == pytest.approx(e, abs=1e-14)
        assert float(m.v1(b)) == pytest.approx(e, abs=1e-14)
        assert a < -0.5 < b
    a, b = turning_points(m, -0.05)
    assert -1.0 < a and b < 0.0


@pytest.mark.parametrize("e", [-0.3, 1.0, math.nan])
def test_outside_window(e):
    with pytest.raises(RangeError):
        action(default_model(), e)


@settings(max_examples=15)
@given(st.floats(min_value=-0.03, max_value=0.03))
def test_taylor_remainder_is_fourth_order(default_actions, e):
    # the cubic Taylor polynomial is accurate to O(E^4)
    err = abs(action(default_model(), e) - default_actions.taylor(e))
    assert err <= 2.0 * e ** 4 + 1e-14


def test_action_increasing(default_actions):
    es = np.linspace(-0.2, 0.5, 15)
    vals = [action(default_model(), e) for e in es]
    assert np.all(np.diff(vals) > 0)


@pytest.mark.parametrize("h,k", [(0.02, 6), (0.04, 2), (0.01, 11)])
def test_bohr_sommerfeld_root(default_actions, h, k):
    m = default_model()
    e, slope = bohr_sommerfeld_energy(m, default_actions, h, k)
    assert action(m, e) == pytest.approx((k + 0.5) * math.pi * h, rel=1e-14)
    fd = (action(m, e + 1e-5) - action(m, e - 1e-5)) / 2e-5
    assert slope == pytest.approx(fd, rel=1e-7)
