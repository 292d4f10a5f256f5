import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semicomp.conics import (
    CLOSED,
    OPEN,
    CurvatureQuadric,
    bivector,
    bound_gap,
    classify,
    null_contacts,
    null_curvature,
    null_curvature_tensor,
    null_sign,
    plane_frame,
    quadric_from_metric,
    sectional_on_plane,
)
from semicomp.errors import DegenerateInput, DegenerateInterval, NullConic
from semicomp.kernel import constant_metric, riemann, sectional_curvature
from semicomp.warped import FriedmannModel, rw_curvatures

Q2 = np.diag([-1.0, -1.0, 1.0])
X3SQ = CurvatureQuadric.from_upper([0, 0, 0, 0, 0, 1])


def random_quadric(rng, lorentz=True):
    A = rng.standard_normal((3, 3))
    return CurvatureQuadric(A + A.T, lorentz)


# --- brute-force oracle -------------------------------------------------------------------

_R = np.concatenate([np.linspace(0.0, 0.999, 300), 1 - np.geomspace(1e-3, 1e-9, 120)])
_PHI = np.linspace(0.0, 2 * math.pi, 721)
_S = np.concatenate([np.linspace(-0.999, 0.999, 400), -1 + np.geomspace(1e-3, 1e-9, 60),
                     1 - np.geomspace(1e-3, 1e-9, 60)])


def brute_ranges(q):
    """``(inf, sup)`` of ``Q1/Q2`` over definite and indefinite sections, by dense grids."""
    r, ph = np.meshgrid(_R, _PHI)
    X = np.stack([r * np.cos(ph), r * np.sin(ph), np.ones_like(r)], -1).reshape(-1, 3)
    s, ph = np.meshgrid(_S, _PHI)
    Y = np.stack([np.cos(ph), np.sin(ph), s], -1).reshape(-1, 3)
    kx = np.einsum("ki,ij,kj->k", X, q.Q1, X) / np.einsum("ki,ij,kj->k", X, Q2, X)
    ky = np.einsum("ki,ij,kj->k", Y, q.Q1, Y) / np.einsum("ki,ij,kj->k", Y, Q2, Y)
    return (kx.min(), kx.max()), (ky.min(), ky.max())


def _check_against_brute(q, rep):
    (sp_lo, sp_hi), (ti_lo, ti_hi) = brute_ranges(q)
    big = 1e4 * q.scale
    for iv, lo, hi in ((rep.I_sp, sp_lo, sp_hi), (rep.I_ti, ti_lo, ti_hi)):
        tol = 1e-3 * (1 + abs(lo) + abs(hi)) if math.isfinite(iv.lo) or math.isfinite(iv.hi) else 0
        if math.isfinite(iv.lo):
            assert lo >= iv.lo - 1e-9 * q.scale
            assert lo <= iv.lo + tol
        else:
            assert lo < -big
        if math.isfinite(iv.hi):
            assert hi <= iv.hi + 1e-9 * q.scale
            assert hi >= iv.hi - tol
        else:
            assert hi > big


@settings(max_examples=40)
@given(st.integers(0, 2 ** 32 - 1))
def test_classification_matches_brute_force(seed):
    q = random_quadric(np.random.default_rng(seed))
    rep = classify(q)
    assert rep.case in (2, 3)
    _check_against_brute(q, rep)


@pytest.mark.parametrize("seed", range(12))
def test_case3_matches_brute_force(seed):
    # a multiple of Q2 plus a definite form is positive (negative) on the null conic
    rng = np.random.default_rng(seed)
    B = rng.standard_normal((3, 3))
    sign = 1.0 if seed % 2 else -1.0
    q = CurvatureQuadric(rng.normal() * Q2 + sign * (0.3 * B @ B.T + 0.2 * np.eye(3)))
    rep = classify(q)
    assert rep.case == 3 and rep.sense == ("lower" if sign > 0 else "upper")
    _check_against_brute(q, rep)


# --- fixtures ----------------------------------------------------------------------------

def test_constant_curvature_is_case_1():
    rep = classify(CurvatureQuadric(2 * Q2))
    assert rep.case == 1 and rep.constant == pytest.approx(2.0)
    assert (rep.bound_interval.lo, rep.bound_interval.hi) == pytest.approx((2.0, 2.0))
    with pytest.raises(DegenerateInterval):
        bound_gap(CurvatureQuadric(2 * Q2))


def test_saddle_is_case_2():
    q = CurvatureQuadric.from_upper([0, 1, 0, 0, 0, 0])
    rep = classify(q)
    assert rep.case == 2 and rep.bound_interval is None
    assert null_sign(q).sign == "mixed"
    assert sorted(c["order"] for c in null_contacts(q)) == [1, 1, 1, 1]


def test_x3_squared_is_case_3():
    rep = classify(X3SQ)
    assert rep.case == 3 and rep.sense == "lower"
    assert (rep.I_sp.lo, rep.I_sp.lo_flag) == (1.0, CLOSED) and math.isinf(rep.I_sp.hi)
    assert (rep.I_ti.hi, rep.I_ti.hi_flag) == (0.0, CLOSED) and math.isinf(rep.I_ti.lo)
    assert (rep.bound_interval.lo, rep.bound_interval.hi) == pytest.approx((0.0, 1.0))
    assert bound_gap(X3SQ).gap == pytest.approx(1.0, abs=1e-10)


def test_negated_x3_squared_gives_upper_bounds():
    q = CurvatureQuadric.from_upper([0, 0, 0, 0, 0, -1])
    rep = classify(q)
    assert rep.case == 3 and rep.sense == "upper"
    assert (rep.bound_interval.lo, rep.bound_interval.hi) == pytest.approx((-1.0, 0.0))
    assert bound_gap(q).gap == pytest.approx(-1.0, abs=1e-10)


@pytest.mark.parametrize("upper, K, sp_flag, ti_flag", [
    ([0, 0, -0.5, 0, 0, 1], 0.5, OPEN, OPEN),      # H tangent to N once, no eigenvalue repeat
    ([0, 0, 0, 1, 0, 0], 0.0, CLOSED, CLOSED),     # x2^2: double tangency
    ([1, 0, -1, 0, 0, 1], 0.0, OPEN, CLOSED),      # (x3 - x1)^2
])
def test_tangent_cases(upper, K, sp_flag, ti_flag):
    rep = classify(CurvatureQuadric.from_upper(upper))
    assert rep.case == 4
    assert rep.I_sp.lo == pytest.approx(K, abs=1e-7) and rep.I_ti.hi == pytest.approx(K, abs=1e-7)
    assert (rep.I_sp.lo_flag, rep.I_ti.hi_flag) == (sp_flag, ti_flag)
    with pytest.raises(DegenerateInterval):
        bound_gap(CurvatureQuadric.from_upper(upper))


def test_diagonal_null_curvature_pattern():
    K1, K2, K3 = 0.0, 2.0, -1.0
    q = CurvatureQuadric(np.diag([-K1, -K3, K2]))
    for th in np.linspace(0, 2 * math.pi, 7):
        x = np.array([1.0, math.cos(th), math.sin(th)])
        w = np.array([0.0, -math.sin(th), math.cos(th)])
        assert null_curvature(q, x, w) == pytest.approx(K2 - K1 * math.sin(th) ** 2 - K3 * math.cos(th) ** 2)
    rep = classify(q)
    assert (rep.bound_interval.lo, rep.bound_interval.hi) == pytest.approx((0.0, 2.0))
    assert bound_gap(q).gap == pytest.approx(2.0, abs=1e-10)


# --- properties ---------------------------------------------------------------------------

@settings(max_examples=200)
@given(st.integers(0, 2 ** 32 - 1), st.booleans())
def test_null_sign_decides_existence_of_bounds(seed, lorentz):
    q = random_quadric(np.random.default_rng(seed), lorentz)
    rep = classify(q)
    assert (null_sign(q).sign != "mixed") == (rep.case != 2)
    if rep.case != 2:
        assert rep.bound_interval is not None and not rep.bound_interval.empty


@settings(max_examples=300)
@given(st.integers(0, 2 ** 32 - 1), st.booleans())
def test_gap_equals_interval_width(seed, lorentz):
    q = random_quadric(np.random.default_rng(seed), lorentz)
    rep = classify(q)
    if rep.case != 3:
        return
    width = rep.bound_interval.hi - rep.bound_interval.lo
    g = bound_gap(q)
    expected = width if rep.sense == "lower" else -width
    assert g.gap == pytest.approx(expected, abs=1e-8)


@given(st.integers(0, 2 ** 32 - 1), st.floats(0.01, 100.0))
def test_classification_is_homogeneous(seed, lam):
    q = random_quadric(np.random.default_rng(seed))
    a, b = classify(q), classify(CurvatureQuadric(lam * q.Q1))
    assert a.case == b.case
    for x, y in ((a.I_sp, b.I_sp), (a.I_ti, b.I_ti)):
        for u, v in ((x.lo, y.lo), (x.hi, y.hi)):
            if math.isfinite(u):
                assert v == pytest.approx(lam * u, rel=1e-8, abs=1e-10)
            else:
                assert v == u


@given(st.integers(0, 2 ** 32 - 1), st.floats(-3, 3), st.floats(0, 2 * math.pi))
def test_null_curvature_ignores_the_choice_of_w(seed, c, th):
    q = random_quadric(np.random.default_rng(seed))
    x = np.array([1.0, math.cos(th), math.sin(th)])
    w = np.array([0.0, -math.sin(th), math.cos(th)])
    assert null_curvature(q, x, w + c * x) == pytest.approx(null_curvature(q, x, w), rel=1e-9, abs=1e-9)
    assert null_curvature(q, 2 * x, w) == pytest.approx(4 * null_curvature(q, x, w), rel=1e-9, abs=1e-9)


def test_input_validation():
    with pytest.raises(DegenerateInput):
        CurvatureQuadric(np.array([[1, 2, 0], [0, 1, 0], [0, 0, 1.0]]))
    with pytest.raises(NullConic):
        sectional_on_plane(X3SQ, [1.0, 0.0, 1.0])
    with pytest.raises(DegenerateInput):
        null_curvature(X3SQ, [1.0, 0.0, 0.0], [0.0, 1.0, 0.0])


# --- from charts ----------------------------------------------------------------------------

def test_quadric_of_flat_space_vanishes():
    m = constant_metric([-1.0, 1.0, 1.0, 1.0])
    q = quadric_from_metric(m, np.zeros(4), np.eye(4)[:3])
    assert np.abs(q.Q1).max() == 0.0 and q.lorentz


def test_quadric_of_de_sitter_is_constant(desitter):
    q = quadric_from_metric(desitter.metric, [0.2, 0.1, -0.1, 0.3], np.eye(4)[[0, 2, 3]])
    rep = classify(q, constant_rtol=1e-7)
    assert rep.case == 1 and rep.constant == pytest.approx(1.0, abs=1e-7)


def test_quadric_of_friedmann(friedmann0, rng):
    t = 1.3
    x = np.array([t, 0.1, -0.2, 0.05])
    m = friedmann0.metric
    q = quadric_from_metric(m, x, np.eye(4)[:3])
    km, kp = rw_curvatures(FriedmannModel(0).rw((0.5, 3.0)), t)
    rep = classify(q)
    assert rep.case == 3 and rep.sense == "lower"
    assert rep.bound_interval.lo == pytest.approx(km, rel=1e-6)
    assert rep.bound_interval.hi == pytest.approx(kp, rel=1e-6)
    # Q1/Q2 on random sections agrees with the kernel's sectional curvature
    frame, _ = plane_frame(m.g(x), np.eye(4)[:3])
    for _ in range(5):
        a, b = rng.standard_normal((2, 3))
        k = sectional_curvature(m, x, a @ frame, b @ frame)
        assert sectional_on_plane(q, bivector(a, b)) == pytest.approx(k, rel=1e-6)
    # null curvature from the tensor agrees with the frame computation
    R, g = riemann(m, x)
    xf, wf = np.array([1.0, 1.0, 0.0]), np.array([0.0, 0.0, 1.0])
    assert null_curvature_tensor(R, g, xf @ frame, wf @ frame) == pytest.approx(null_curvature(q, xf, wf), rel=1e-8)


def test_anti_lorentz_plane_detected():
    m = constant_metric([-1.0, -1.0, 1.0])
    _, lorentz = plane_frame(m.g(np.zeros(3)), np.eye(3))
    assert not lorentz
    with pytest.raises(DegenerateInput):
        plane_frame(np.eye(3), np.eye(3))
