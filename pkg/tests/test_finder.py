import cmath
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from resolab.action import action_derivatives
from resolab.asymptotics import k_window, predict_thm2
from resolab.errors import ConvergenceError, InconclusiveCountError, RangeError
from resolab.finder import (SearchBox, WronskianFunction, _refine, count_zeros, counting_box,
                            find_resonances, muller, seedless_search)
from resolab.model import default_contour, default_model

from oracles import single_channel_eigenvalue

H = 0.04


@pytest.fixture(scope="module")
def setup():
    m = default_model()
    c = default_contour(m, H)
    acts = action_derivatives(m)
    fn = WronskianFunction(m, c, H)
    res = find_resonances(m, c, acts, m.slopes, H, 1.5, fn=fn)
    return m, c, acts, fn, res


@settings(max_examples=30)
@given(st.complex_numbers(max_magnitude=3.0), st.complex_numbers(max_magnitude=3.0))
def test_muller_quadratic(a, b):
    # roots a, b; start next to a
    f = lambda z: (z - a) * (z - b)
    if abs(a - b) < 0.5:
        return
    root, _ = muller(f, a + 0.05, a - 0.05j, a + 0.02 + 0.02j)
    assert min(abs(root - a), abs(root - b)) < 1e-10


def test_muller_transcendental():
    root, it = muller(lambda z: cmath.exp(z) - 2.0, 0.5, 0.6, 0.7)
    assert abs(root - math.log(2.0)) < 1e-12
    assert it < 20


def test_muller_gives_up():
    with pytest.raises(ConvergenceError):
        muller(lambda z: cmath.exp(z), 0.0, 1.0, 2.0, maxiter=5)


def test_search_box():
    b = SearchBox(c0=1.5, h=0.001)
    assert b.corners[0] == pytest.approx(complex(-1.5, -0.15), abs=1e-15)
    assert b.contains(0.3 - 0.1j) and not b.contains(0.3 + 0.01j)
    left, right = b.split()
    assert left.re_hi == right.re_lo == 0.0
    top, bottom = SearchBox(c0=1.0, h=1.0, re_lo=0, re_hi=1, im_lo=-3, im_hi=0).split(0.25)
    assert top.im_hi == -2.25
    with pytest.raises(ValueError):
        SearchBox(c0=1.0, h=0.01, re_lo=1.0, re_hi=0.0)


def test_counting_box_brackets_window(setup):
    _, _, acts, _, _ = setup
    box = counting_box(acts, H, 1.5)
    ks = k_window(acts, H, 1.5)
    spacing = math.pi * H ** (1 / 3) / acts.a1
    assert box.re_hi - box.re_lo == pytest.approx(len(ks) * spacing, rel=1e-12)
    assert box.im_hi == -box.im_lo == pytest.approx(1.5 * H ** (1 / 3))


def test_one_per_level(setup):
    _, _, acts, _, res = setup
    assert [r.k for r in res] == list(k_window(acts, H, 1.5))
    assert not res.unresolved and not res.boundary
    assert all(r.provenance == "numeric" and r.rho.imag < 0 for r in res)


def test_close_to_vector_field_prediction(setup):
    m, _, acts, _, res = setup
    for r in res:
        p = predict_thm2(m, acts, m.slopes, H, r.k)
        assert abs(r.e.real - p.e.real) < H ** 2
        assert abs(r.e.imag / p.e.imag - 1) < 3 * H ** (1 / 3)


def test_refinement_idempotent(setup):
    _, _, _, fn, res = setup
    for r in res:
        again, _ = _refine(fn, r.rho, 1e-6)
        assert abs(again - r.rho) < 1e-12


def test_count_matches_window(setup):
    m, c, acts, fn, res = setup
    assert count_zeros(m, c, H, 1.5, actions=acts, fn=fn) == len(res)


def test_count_additive_under_split(setup):
    m, c, acts, fn, res = setup
    box = counting_box(acts, H, 1.5)
    r = res[1].rho
    spacing = math.pi * H ** (1 / 3) / acts.a1
    cut = (r.real + 0.5 * spacing - box.re_lo) / (box.re_hi - box.re_lo)
    left, right = box.split(cut)
    nl = count_zeros(m, c, H, 1.5, box=left, fn=fn)
    nr = count_zeros(m, c, H, 1.5, box=right, fn=fn)
    assert nl == 2 and nl + nr == len(res)


def test_box_without_zeros(setup):
    m, c, acts, fn, res = setup
    box = counting_box(acts, H, 1.5)
    shallow = SearchBox(c0=1.5, h=H, re_lo=box.re_lo, re_hi=box.re_hi,
                        im_lo=0.2 * box.im_lo, im_hi=0.1 * box.im_lo)
    assert all(not shallow.contains(r.rho) for r in res)
    assert count_zeros(m, c, H, 1.5, box=shallow, fn=fn) == 0


def test_edge_through_zero_is_inconclusive(setup):
    m, c, acts, fn, res = setup
    r = res[0].rho
    box = SearchBox(c0=1.5, h=H, re_lo=r.real, re_hi=r.real + 0.3, im_lo=-0.5, im_hi=0.3)
    with pytest.raises(InconclusiveCountError) as info:
        count_zeros(m, c, H, 1.5, box=box, fn=fn)
    assert info.value.nearest is not None
    assert abs(info.value.nearest - r) < 1e-3


def test_count_needs_a_box(setup):
    m, c, _, _, _ = setup
    with pytest.raises(ValueError):
        count_zeros(m, c, H, 1.5)


def test_h_range(setup):
    m, _, acts, _, _ = setup
    c = default_contour(m, 0.2)
    with pytest.raises(RangeError):
        find_resonances(m, c, acts, m.slopes, 0.2, 1.5)


def test_seedless_agrees_with_seeded(setup):
    m, c, acts, fn, res = setup
    free = seedless_search(m, c, acts, H, 1.5, fn=fn)
    assert [r.k for r in free] == [r.k for r in res]
    assert max(abs(a.rho - b.rho) for a, b in zip(free, res)) < 1e-10


def test_decoupled_level_matches_shooting():
    m = default_model(rbar=0.0)
    c = default_contour(m, 0.02)
    acts = action_derivatives(m)
    res = find_resonances(m, c, acts, m.slopes, 0.02, 1.5, ks=[6])
    e = res[0].e
    ref = single_channel_eigenvalue(0.02, e.real, 2e-3)
    assert abs(e.imag) < 1e-12
    assert e.real == pytest.approx(ref, rel=1e-10)


@settings(max_examples=15)
@given(st.floats(0.0, 1.0), st.floats(0.0, 1.0), st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_random_boxes_count_known_zeros(setup, a, b, c_, d):
    m, c, acts, fn, res = setup
    full = counting_box(acts, H, 1.5)
    x0, x1 = sorted((a, b))
    y0, y1 = sorted((c_, d))
    if x1 - x0 < 0.05 or y1 - y0 < 0.05:
        return
    w, hgt = full.re_hi - full.re_lo, full.im_hi - full.im_lo
    box = SearchBox(c0=1.5, h=H, re_lo=full.re_lo + x0 * w, re_hi=full.re_lo + x1 * w,
                    im_lo=full.im_lo + y0 * hgt, im_hi=full.im_lo + y1 * hgt)
    inside = sum(box.contains(r.rho) for r in res)
    try:
        n = count_zeros(m, c, H, 1.5, box=box, fn=fn)
    except InconclusiveCountError as exc:
        # only acceptable with a zero next to the boundary
        assert exc.nearest is not None
        assert min(abs(exc.nearest - r.rho) for r in res) < 1e-2
        return
    assert n == inside
