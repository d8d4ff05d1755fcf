import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from resolab.crossing_integrals import (T_MAX, SlopePair, airy_product_closed_form,
                                        airy_product_derivative, crossing_integrals,
                                        full_line_product, mu, nu, nu_sum)
from resolab.errors import RangeError

from oracles import half_line_mp

S11 = SlopePair(1.0, 1.0)
S05 = SlopePair(0.5, 1.5)

# mpmath values: (t = 0 with slopes (1, 1), t = -1.3 with slopes (0.5, 1.5))
FROZEN_NU = {
    (1, "R", "A"): (-0.144545463263635, -0.011273616792686156),
    (1, "R", "B"): (-0.06209077375856948, -0.0280829237257462),
    (2, "R", "A"): (-0.018500544216264132, -0.004036922960227053),
    (2, "R", "B"): (0.156225430067383, 0.013745687638303177),
    (1, "L", "A"): (-0.018500544216264132, -0.007659400541077259),
    (1, "L", "B"): (0.156225430067383, 0.22661577979853512),
    (2, "L", "A"): (-0.144545463263635, -0.009090498065613805),
    (2, "L", "B"): (-0.06209077375856948, -0.26908808006964907),
}


@pytest.mark.parametrize("key", sorted(FROZEN_NU))
def test_frozen_nu(key):
    j, side, kind = key
    at0, at13 = FROZEN_NU[key]
    assert nu(j, side, kind, 0.0, S11) == pytest.approx(at0, rel=1e-10, abs=1e-13)
    assert nu(j, side, kind, -1.3, S05) == pytest.approx(at13, rel=1e-10, abs=1e-13)


def test_frozen_mu():
    assert mu(1, 0.0, S11) == pytest.approx(0.14089297655493593, rel=1e-10)
    assert mu(1, 0.7, SlopePair(1.0, 2.0)) == pytest.approx(0.20165190137682412, rel=1e-10)


def test_mu2_is_mu1_with_slopes_swapped():
    sl = SlopePair(0.8, 1.7)
    assert mu(2, 0.4, sl) == mu(1, 0.4, sl.swapped())


def test_symmetric_slopes_exchange_sides():
    # with equal slopes at t = 0 the substitution y -> -y swaps R and L
    for (j, side, kind) in [(1, "R", "A"), (2, "R", "A")]:
        other = 2 if j == 1 else 1
        assert nu(j, side, kind, 0.0, S11) == pytest.approx(nu(other, "L", kind, 0.0, S11),
                                                            rel=1e-12)


def test_slope_pair():
    sl = SlopePair(1.0, 2.0)
    assert sl.tau3 == pytest.approx(2.0 / 3.0, rel=1e-15)
    with pytest.raises(ValueError):
        SlopePair(-1.0, 1.0)
    with pytest.raises(TypeError):
        SlopePair(1.0, 1.0, 0.5)


@pytest.mark.parametrize("t", [-T_MAX - 0.1, 11.0, math.nan])
def test_range(t):
    with pytest.raises(RangeError):
        nu(1, "R", "A", t, S11)
    with pytest.raises(RangeError):
        mu(1, t, S11)


def test_record():
    ci = crossing_integrals(0.0, S11)
    assert ci.nuA1R == pytest.approx(FROZEN_NU[(1, "R", "A")][0], rel=1e-10)
    assert ci.mu1 == pytest.approx(ci.mu2, rel=1e-12)


@settings(max_examples=12)
@given(st.floats(min_value=-3.0, max_value=3.0),
       st.sampled_from([(1.0, 1.0), (1.0, 2.0), (0.5, 1.5), (2.0, 0.7)]))
def test_product_identities(t, taus):
    sl = SlopePair(*taus)
    assert abs(full_line_product(t, sl) - airy_product_closed_form(t, sl)) < 1e-9
    assert abs(nu_sum(1, t, sl) * nu_sum(2, t, sl) - airy_product_derivative(t, sl)) < 1e-9


@settings(max_examples=6)
@given(st.floats(min_value=-2.5, max_value=2.5),
       st.sampled_from([("aip", "bi", "R", (1, "R", "B")), ("bi", "aip", "L", (2, "L", "B"))]))
def test_against_mpmath(t, case):
    first, second, side, key = case
    want = half_line_mp(first, second, side, t, 0.5, 1.5)
    assert nu(*key, t, S05) == pytest.approx(want, rel=1e-9, abs=1e-12)


def test_kind_a_sums_nonnegative_product():
    # Ai'^2 closed form is nonnegative, so the product of the sums is too
    for t in np.linspace(-3, 3, 7):
        assert nu_sum(1, t, S05) * nu_sum(2, t, S05) >= -1e-12
