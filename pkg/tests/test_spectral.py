import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hexpoly.params import DimerWeights, PolygonParams
from hexpoly.spectral import (
    INF,
    OneTwoCase,
    Phase,
    char_poly_closed,
    char_poly_polygon,
    classify,
    from_one_two,
    ising_couplings,
    phase_boundaries,
    symmetry_orbit,
    torus_min,
    uvst,
)

pos = st.floats(0.05, 20.0)
C3 = 3**-0.5


def test_unit_dimer_poly_constant():
    P = char_poly_closed(1, 1, 1)
    assert P[0, 0] == 4
    assert all(P[j, k] == 0 for j in (-1, 0, 1) for k in (-1, 0, 1) if (j, k) != (0, 0))


def test_degenerate_dimer_poly():
    P = char_poly_closed(1, 0, 0)
    assert P[0, 0] == 2
    assert P[0, 1] == 0 and P[1, 0] == 0
    assert P[-1, 1] == P[1, -1] == -1


@settings(max_examples=50, deadline=None)
@given(pos, pos, pos)
def test_two_forms_agree(a, b, c):
    d = DimerWeights.from_polygon(PolygonParams(a, b, c))
    closed = char_poly_closed(d.A, d.B, d.C)
    direct = char_poly_polygon(a, b, c)
    scale = direct[0, 0]
    assert np.allclose(np.array(closed.coeff), np.array(direct.coeff), atol=1e-12 * scale, rtol=0)
    assert direct.is_reciprocal()


def test_uvst_examples():
    assert uvst(1, 1, 1).as_tuple() == (2, 2, 2, 2)
    ind = uvst(C3, C3, C3)
    assert ind.U == pytest.approx(0, abs=1e-15)
    assert ind.V == ind.S == ind.T == pytest.approx(4 / 3)


@settings(max_examples=100, deadline=None)
@given(pos, pos, pos)
def test_real_points_are_indicator_squares(a, b, c):
    P = char_poly_polygon(a, b, c)
    ind = uvst(a, b, c)
    for (z, w), val in zip([(1, 1), (1, -1), (-1, -1), (-1, 1)], ind.as_tuple()):
        assert P(z, w).real == pytest.approx(val * val, rel=1e-10, abs=1e-12 * P[0, 0])


def test_boundaries_examples():
    b = phase_boundaries(1, 1)
    assert b.gamma1 == 0 and b.gamma2 == INF and math.isinf(b.gamma2)
    b = phase_boundaries(2, 1)
    assert b.gamma1 == pytest.approx(1 / 3) and b.gamma2 == pytest.approx(3)


def test_classify_examples():
    assert classify(0.2, 0.2, 0.2).phase is Phase.SUBCRITICAL_R1
    v = classify(3 / 7, 3 / 7, 25 / 21)
    assert v.phase is Phase.SUPERCRITICAL and not v.critical
    v = classify(C3, C3, C3)
    assert v.critical and v.zero_factor == "U"


def test_classify_regions():
    assert classify(3, 3, 0.1).phase is Phase.SUBCRITICAL_R2
    assert classify(0.2, 3, 10).phase is Phase.SUBCRITICAL_R3
    assert classify(3, 0.2, 10).phase is Phase.SUBCRITICAL_R4
    with pytest.raises(ValueError):
        classify(0, 1, 1)


def test_classify_consistent_with_indicators():
    rng = np.random.default_rng(21)
    pts = np.exp(rng.uniform(np.log(0.05), np.log(20), (10_000, 3)))
    tol = 1e-9
    for a, b, c in pts:
        v = classify(a, b, c, tol)
        ind = uvst(a, b, c)
        scale = 1 + a * b + b * c + c * a
        assert v.critical == (ind.min_abs <= tol * scale)
        if v.critical:
            continue
        bounds = phase_boundaries(a, b)
        inside = bounds.gamma1 < c < bounds.gamma2
        assert (v.phase is Phase.SUPERCRITICAL) == inside
        # supercritical exactly when all four indicators are positive
        assert (min(ind.as_tuple()) > 0) == inside


def test_critical_band_on_surfaces():
    rng = np.random.default_rng(22)
    for a, b in rng.uniform(0.1, 5, (200, 2)):
        bounds = phase_boundaries(a, b)
        assert classify(a, b, bounds.gamma1).critical or bounds.gamma1 == 0
        if math.isfinite(bounds.gamma2):
            assert classify(a, b, bounds.gamma2).critical


def test_orbit_examples():
    assert symmetry_orbit(1, 1, 1) == [(1, 1, 1)] * 4
    orbit = symmetry_orbit(2, 3, 4)
    assert (2, 1 / 3, 1 / 4) in orbit and (1 / 2, 1 / 3, 4) in orbit


@settings(max_examples=100, deadline=None)
@given(pos, pos, pos)
def test_orbit_involution(a, b, c):
    for j, img in enumerate(symmetry_orbit(a, b, c)):
        back = symmetry_orbit(*img)[j]
        assert back == pytest.approx((a, b, c), rel=1e-15)


@settings(max_examples=100, deadline=None)
@given(pos, pos, pos)
def test_orbit_preserves_phase(a, b, c):
    v = classify(a, b, c)
    for img in symmetry_orbit(a, b, c):
        w = classify(*img)
        assert w.critical == v.critical or min(uvst(*img).min_abs, uvst(a, b, c).min_abs) < 1e-6
        if not (v.critical or w.critical):
            assert (w.phase is Phase.SUPERCRITICAL) == (v.phase is Phase.SUPERCRITICAL)


def test_from_one_two_examples():
    img = from_one_two(4, 2, 1)
    assert (img.A, img.B, img.C) == pytest.approx((1 / 7, -3 / 7, -5 / 7))
    assert (img.alpha2, img.beta2, img.gamma2) == pytest.approx((15 / 7, 5 / 21, 3 / 35))
    assert img.case is OneTwoCase.REAL and img.alpha2 > 1
    img = from_one_two(1, 1, 1)
    assert (img.A, img.B, img.C) == pytest.approx((-1 / 3,) * 3)
    assert (img.alpha2, img.beta2, img.gamma2) == pytest.approx((-1 / 3,) * 3)
    assert img.case is OneTwoCase.IMAGINARY_ALL_SMALL
    img = from_one_two(2, 1, 1)
    assert img.case is OneTwoCase.BOUNDARY
    assert img.alpha2 == INF and img.beta2 == 0 and img.gamma2 == 0


def test_from_one_two_unsorted_input():
    img = from_one_two(1, 4, 2)
    assert img.order == (1, 2, 0)
    assert img.beta2 == pytest.approx(15 / 7)
    assert from_one_two(5, 4, 3).case is OneTwoCase.IMAGINARY_UNIT
    assert from_one_two(5, 3, 3).case is OneTwoCase.IMAGINARY_LARGE


def test_from_one_two_recovers_A():
    rng = np.random.default_rng(23)
    for _ in range(100):
        b, c = rng.uniform(0.1, 3, 2)
        a = b + c + rng.uniform(0.05, 3)
        img = from_one_two(a, b, c)
        assert img.real
        assert min(img.alpha2, img.beta2, img.gamma2) > 0
        assert math.sqrt(img.beta2 * img.gamma2) == pytest.approx(abs(img.A), rel=1e-12)
        assert img.polygon().alpha == img.alpha2


def test_ising_examples():
    t = math.tanh(0.5) ** 2
    j = ising_couplings(t, t, t)
    assert (j.J_a, j.J_b, j.J_c) == pytest.approx((0.5, 0.5, 0.5))
    assert ising_couplings(1 / 3, 1 / 3, 1 / 3).indicator == pytest.approx(0, abs=1e-15)
    with pytest.raises(ValueError, match="gamma"):
        ising_couplings(0.5, 0.5, 1.5)


def test_torus_min_examples():
    tm = torus_min(char_poly_closed(1, 1, 1), 64)
    assert tm.value == pytest.approx(4)
    tm = torus_min(char_poly_polygon(C3, C3, C3), 512)
    assert tm.value <= 1e-6
    assert tm.z == 1 and tm.w == 1
    assert torus_min(char_poly_polygon(3 / 7, 3 / 7, 25 / 21), 512).value > 1e-3
    with pytest.raises(ValueError):
        torus_min(char_poly_closed(1, 1, 1), 2)


@settings(max_examples=60, deadline=None)
@given(pos, pos, pos, st.sampled_from([8, 64, 256]))
def test_torus_nonnegative(a, b, c, grid):
    P = char_poly_polygon(a, b, c)
    assert torus_min(P, grid).value >= -1e-10 * P[0, 0]
