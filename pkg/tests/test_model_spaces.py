import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from semicomp.errors import AntipodalOrCut, BranchOutOfRange, FlatSpace
from semicomp.model_spaces import (
    Kind,
    ModelSpace,
    angle_from_energies,
    ell,
    energy_between,
    energy_of,
    h,
    h_of_energy,
    law_of_cosines,
    length_between,
    model_exp,
    model_geodesic_between,
    nonnormalized_angle,
    signed_length,
)
from semicomp.series import cosc, dsinc, sinc, versc

SPHERE = ModelSpace(Kind.RIEMANNIAN, 1.0, 2)
DS2 = ModelSpace(Kind.LORENTZ, 1.0, 2)
FLAT_L = ModelSpace(Kind.LORENTZ, 0.0, 2)
FLAT_R = ModelSpace(Kind.RIEMANNIAN, 0.0, 2)


# --- series ------------------------------------------------------------------------

@pytest.mark.parametrize("x", [-30.0, -2.0, -0.7, -1e-9, 0.0, 1e-9, 0.5, 0.99, 1.01, 4.0, 9.5])
def test_series_match_closed_forms(x):
    if x > 0:
        r = math.sqrt(x)
        c, s, v = math.cos(r), math.sin(r) / r, (1 - math.cos(r)) / x
    elif x < 0:
        r = math.sqrt(-x)
        c, s, v = math.cosh(r), math.sinh(r) / r, (1 - math.cosh(r)) / x
    else:
        c, s, v = 1.0, 1.0, 0.5
    assert cosc(x) == pytest.approx(c, rel=1e-13, abs=1e-15)
    assert sinc(x) == pytest.approx(s, rel=1e-13)
    if abs(x) > 1e-6:
        assert versc(x) == pytest.approx(v, rel=1e-9)
    # vectorized path agrees with the scalar path
    assert float(cosc(np.array([x]))[0]) == pytest.approx(cosc(x), rel=1e-14, abs=1e-16)


def test_dsinc_is_derivative_of_sinc():
    for x in (-3.0, -0.2, 0.0, 0.4, 2.5):
        h_ = 1e-5
        fd = (sinc(x + h_) - sinc(x - h_)) / (2 * h_)
        assert dsinc(x) == pytest.approx(fd, rel=1e-7, abs=1e-10)


# --- signed length -----------------------------------------------------------------

def test_signed_length_examples():
    assert signed_length(9.0) == 3.0
    assert signed_length(-7.0) == pytest.approx(-2.6457513, abs=1e-7)
    assert signed_length(0.0) == 0.0


@given(st.floats(-1e6, 1e6, allow_nan=False).filter(lambda l: l == 0 or abs(l) > 1e-150))
def test_signed_length_inverts_energy(l):
    # |l| > 1e-150 keeps l*l out of the subnormal range
    assert signed_length(energy_of(l)) == pytest.approx(l, rel=1e-12)


# --- exponential map and its inverse ---------------------------------------------------

def test_exp_quarter_great_circle():
    p = SPHERE.point([1.0, 0.0, 0.0])
    q = model_exp(p, [0.0, math.pi / 2, 0.0], 1.0)
    np.testing.assert_allclose(q.coords, [0.0, 1.0, 0.0], atol=1e-15)


def test_exp_null_geodesic_is_a_line():
    p = DS2.point([1.0, 0.0, 0.0])
    q = model_exp(p, [0.0, 1.0, 1.0], 2.0)
    np.testing.assert_allclose(q.coords, [1.0, 2.0, 2.0], atol=1e-14)


def test_exp_flat():
    p = FLAT_R.point([0.0, 0.0])
    np.testing.assert_allclose(model_exp(p, [3.0, 4.0], 0.5).coords, [1.5, 2.0])


def test_log_examples():
    g = model_geodesic_between(FLAT_L.point([0.0, 0.0]), FLAT_L.point([3.0, 4.0]))
    np.testing.assert_allclose(g.velocity, [3.0, 4.0])
    assert g.energy == pytest.approx(-7.0)

    g = model_geodesic_between(SPHERE.point([1.0, 0, 0]), SPHERE.point([0, 1.0, 0]))
    np.testing.assert_allclose(g.velocity, [0.0, math.pi / 2, 0.0], atol=1e-12)
    assert g.energy == pytest.approx(math.pi ** 2 / 4)

    g = model_geodesic_between(DS2.point([1.0, 0, 0]), DS2.point([1.0, 2.0, 2.0]))
    np.testing.assert_allclose(g.velocity, [0.0, 2.0, 2.0], atol=1e-12)
    assert g.energy == pytest.approx(0.0, abs=1e-12)


def test_energy_and_length_examples():
    a, b = FLAT_L.point([0.0, 0.0]), FLAT_L.point([3.0, 4.0])
    assert energy_between(a, b) == pytest.approx(-7.0)
    assert length_between(a, b) == pytest.approx(-math.sqrt(7.0))
    p, q = SPHERE.point([1.0, 0, 0]), SPHERE.point([0, 1.0, 0])
    assert length_between(p, q) == pytest.approx(math.pi / 2)
    p, q = DS2.point([1.0, 0, 0]), DS2.point([1.0, 2.0, 2.0])
    assert length_between(p, q) == pytest.approx(0.0, abs=1e-6)


def test_antipodal_points_rejected():
    with pytest.raises(AntipodalOrCut):
        model_geodesic_between(SPHERE.point([1.0, 0, 0]), SPHERE.point([-1.0, 0, 0]))


def _random_pair(kind, K, dim, rng):
    sp = ModelSpace(kind, K, dim)
    p = sp.point(sp.base_point())
    v = sp.tangent_frame() @ rng.uniform(-1, 1, dim)
    E = sp.inner(v, v)
    if K != 0 and K * E > 0:
        v = v * min(1.0, 0.8 * math.pi / math.sqrt(K * E))
    return sp, p, v


@given(st.sampled_from(list(Kind)), st.sampled_from([-2.0, -0.5, 0.0, 0.7, 1.5]),
       st.integers(2, 4), st.integers(0, 2 ** 32 - 1))
def test_exp_log_round_trip(kind, K, dim, seed):
    sp, p, v = _random_pair(kind, K, dim, np.random.default_rng(seed))
    q = model_exp(p, v, 1.0)
    w = model_geodesic_between(p, q).velocity
    np.testing.assert_allclose(w, v, rtol=1e-10, atol=1e-10 * (1 + np.linalg.norm(v)))


@given(st.sampled_from(list(Kind)), st.sampled_from([-1.0, 0.5, 2.0]),
       st.floats(-2.0, 2.0), st.integers(0, 2 ** 32 - 1))
def test_quadric_constraint_preserved(kind, K, t, seed):
    sp, p, v = _random_pair(kind, K, 3, np.random.default_rng(seed))
    q = model_exp(p, v, t)
    assert sp.quadric_defect(q.coords) <= 1e-10 * max(1.0, 1.0 / abs(K))


# --- ell and h ----------------------------------------------------------------------------

def test_ell_examples():
    q = SPHERE.point([1.0, 0, 0])
    assert ell(q, q) == pytest.approx(1.0)
    assert ell(q, SPHERE.point([0, 1.0, 0])) == pytest.approx(0.0)
    ads = ModelSpace(Kind.LORENTZ, -1.0, 2)
    o = ads.point(ads.base_point())
    assert ell(o, o) == pytest.approx(-1.0)
    with pytest.raises(FlatSpace):
        ell(FLAT_R.point([0, 0]), FLAT_R.point([1, 0]))


def test_h_examples():
    assert h_of_energy(8.0, 0.0) == pytest.approx(4.0)
    assert h_of_energy(math.pi ** 2 / 4, 1.0) == pytest.approx(1.0)
    assert h_of_energy(-0.0, -1.0) == 0.0
    q, p = SPHERE.point([1.0, 0, 0]), SPHERE.point([0, 1.0, 0])
    assert h(q, p) == pytest.approx(1.0)


def _second_difference(fn, step):
    return (fn(step) - 2 * fn(0.0) + fn(-step)) / step ** 2


@given(st.sampled_from(list(Kind)), st.sampled_from([-1.0, 0.6, 1.3]), st.integers(0, 2 ** 32 - 1))
def test_ell_is_K_affine(kind, K, seed):
    rng = np.random.default_rng(seed)
    sp, q, _ = _random_pair(kind, K, 3, rng)
    # a geodesic not through q
    p0 = model_exp(q, sp.tangent_frame() @ rng.uniform(-0.3, 0.3, 3), 1.0)
    v = sp.project_tangent(p0.coords, rng.uniform(-0.4, 0.4, 4))
    E = sp.inner(v, v)
    u = lambda s: ell(q, model_exp(p0, v, s))
    step = 1e-3
    assert _second_difference(u, step) + K * E * u(0.0) == pytest.approx(0.0, abs=1e-5)


@given(st.sampled_from(list(Kind)), st.sampled_from([-1.0, 0.0, 0.6, 1.3]), st.integers(0, 2 ** 32 - 1))
def test_h_differential_equation(kind, K, seed):
    rng = np.random.default_rng(seed)
    sp, q, _ = _random_pair(kind, K, 3, rng)
    p0 = model_exp(q, sp.tangent_frame() @ rng.uniform(-0.3, 0.3, 3), 1.0)
    v = sp.project_tangent(p0.coords, rng.uniform(-0.4, 0.4, sp.ambient_dim))
    E = sp.inner(v, v)
    f = lambda s: h(q, model_exp(p0, v, s))
    step = 1e-3
    assert _second_difference(f, step) + K * E * f(0.0) == pytest.approx(E, abs=1e-5)


# --- angles and the law of cosines ----------------------------------------------------------

def test_nonnormalized_angle_examples():
    o = FLAT_R.point([0.0, 0.0])
    assert nonnormalized_angle(o, FLAT_R.point([3.0, 0]), FLAT_R.point([0, 4.0])) == 0.0
    p = FLAT_R.point([1.0, 2.0])
    assert nonnormalized_angle(o, p, p) == pytest.approx(5.0)
    o = FLAT_L.point([0.0, 0.0])
    assert nonnormalized_angle(o, FLAT_L.point([1.0, 0]), FLAT_L.point([0, 1.0])) == 0.0


def test_law_of_cosines_examples():
    assert law_of_cosines(9.0, 16.0, 0.0, 0.0) == pytest.approx(25.0)
    assert law_of_cosines(1.0, -1.0, 0.0, 0.0) == pytest.approx(0.0)


def test_law_of_cosines_equilateral_on_sphere():
    # three points pairwise pi/6 apart on the unit sphere
    S = ModelSpace(Kind.RIEMANNIAN, 1.0, 2)
    a = math.pi / 6
    # vertices on a small circle around the north pole: solve for the polar angle
    c = math.cos(a)
    th = math.acos(math.sqrt((2 * c + 1) / 3))
    pts = [S.point([math.cos(th), math.sin(th) * math.cos(k * 2 * math.pi / 3),
                    math.sin(th) * math.sin(k * 2 * math.pi / 3)]) for k in range(3)]
    p, q, r = pts
    for x, y in ((p, q), (q, r), (r, p)):
        assert length_between(x, y) == pytest.approx(a, rel=1e-12)
    ang = nonnormalized_angle(q, p, r)
    E = a * a
    assert law_of_cosines(E, E, ang, 1.0) == pytest.approx(math.pi ** 2 / 36, rel=1e-12)
    assert angle_from_energies(E, E, E, 1.0) == pytest.approx(ang, rel=1e-12)


def test_law_of_cosines_branch_error():
    with pytest.raises(BranchOutOfRange):
        law_of_cosines(1.0, 1.0, -50.0, 1.0)
