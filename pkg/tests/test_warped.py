import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semicomp.errors import DegenerateInput, ZeroDenominator
from semicomp.kernel import check_bound, sectional_curvature
from semicomp.warped import (
    FriedmannModel,
    RWModel,
    WarpSpec,
    constant_warp,
    cor72_interval,
    cosh_warp,
    example_a,
    example_b,
    example_c,
    example_d,
    exp_warp,
    friedmann,
    linear_warp,
    power_warp,
    prop71_check,
    rw_bound_interval,
    rw_curvatures,
    rw_fluid,
    rw_table,
    strong_energy_check,
    wp_metric,
    wp_sectional,
)

DS = WarpSpec((-1.5, 1.5), 1.0, 3, cosh_warp(1.0), 1.0, "ds")
FR0 = FriedmannModel(0).rw((0.5, 3.0))


def _split(v, k=1):
    v = np.asarray(v, dtype=float)
    return v[:k], v[k:]


# --- charts ---------------------------------------------------------------------------

def test_flat_product_chart():
    spec = WarpSpec((-2.0, 2.0), 0.0, 1, constant_warp(1.0), 1.0, "flat")
    m = wp_metric(spec)
    assert m.dim == 2 and m.index == 1
    np.testing.assert_allclose(m.g(np.array([0.3, 0.1])), np.diag([-1.0, 1.0]), atol=1e-14)
    assert check_bound(m, 0.0, "ge", samples=50).worst_margin == pytest.approx(0.0, abs=1e-10)


@pytest.mark.parametrize("spec", [DS, WarpSpec((-1.0, 1.0), 0.0, 3, exp_warp(1.0), 2.0, "dsflat")])
def test_constant_curvature_charts(spec):
    m = wp_metric(spec)
    for sense in ("ge", "le"):
        rep = check_bound(m, 1.0, sense, samples=300, seed=4)
        assert rep.holds and abs(rep.worst_margin) < 1e-8


# --- the warped-product formula ------------------------------------------------------

def test_formula_special_sections():
    x0 = np.array([0.3, 0.1, -0.2, 0.05])
    fiber = lambda *c: np.array(c, dtype=float)
    # pure fiber section with f = 1 gives the fiber curvature
    spec = WarpSpec((-2.0, 2.0), 1.0, 3, constant_warp(1.0), 1.0, "prod")
    assert wp_sectional(spec, x0, [0.0], [0.0], fiber(1, 0, 0), fiber(0, 1, 0)) == pytest.approx(1.0)
    # Friedmann C = 0: mixed section f''/f, fiber section (C + f'^2)/f^2
    spec = FR0.spec()
    t = 1.2
    x = np.array([t, 0.1, -0.2, 0.05])
    km, kp = rw_curvatures(FR0, t)
    assert km == pytest.approx(-2 / (9 * t * t))
    assert kp == pytest.approx(4 / (9 * t * t))
    assert wp_sectional(spec, x, [1.0], [0.0], fiber(0, 0, 0), fiber(0, 1, 0)) == pytest.approx(km)
    assert wp_sectional(spec, x, [0.0], [0.0], fiber(1, 0, 0), fiber(0, 1, 0)) == pytest.approx(kp)


def test_formula_needs_orthogonal_split():
    with pytest.raises(DegenerateInput):
        wp_sectional(DS, [0.1, 0, 0, 0], [1.0], [1.0], [1, 0, 0], [0, 1, 0])


def _random_split_section(rng, kb, kf):
    x, y = rng.standard_normal((2, kb))
    v, w = rng.standard_normal((2, kf))
    if kb == 1:
        y = np.zeros(1)
    else:
        y -= (x @ y) / (x @ x) * x
    return x, y, v, w


@settings(max_examples=25)
@given(st.integers(0, 2 ** 32 - 1), st.sampled_from(["friedmann", "ds", "cone", "b", "d"]))
def test_formula_matches_kernel(seed, which):
    rng = np.random.default_rng(seed)
    spec = {"friedmann": FR0.spec(), "ds": DS,
            "cone": WarpSpec((0.3, 1.0), 1.0, 3, linear_warp(1.0, 0.0), 1.0, "cone"),
            "b": example_b(), "d": example_d()}[which]
    m = wp_metric(spec)
    p = m.sample_points(rng, 1, 0.6)[0]
    kb = spec.base_dim
    # fiber-orthogonality is in the fiber metric, which is conformal: Euclidean orthogonality suffices
    x, y, v, w = _random_split_section(rng, kb, spec.fiber_dim)
    w -= (v @ w) / (v @ v) * v
    if kb > 1:
        gB = m.g(p)[:kb, :kb]
        y = y - (x @ gB @ y) / (x @ gB @ x) * x
    X, Y = np.concatenate([x, v]), np.concatenate([y, w])
    try:
        exact = wp_sectional(spec, p, x, y, v, w)
    except Exception:
        return
    num = sectional_curvature(m, p, X, Y)
    assert num == pytest.approx(exact, rel=1e-6, abs=1e-6)


# --- warped-product conditions -------------------------------------------------------

def test_example_b_conditions():
    rep = prop71_check(example_b(), 1.0, "ge")
    assert rep.all
    # the fiber condition holds with equality
    assert rep.margins["fiber_curvature"] == pytest.approx(0.0, abs=1e-9)


def test_example_d_conditions():
    assert prop71_check(example_d(), -1.0, "ge").all


def test_example_c_conditions():
    # f is affine for K = 1 and the fiber condition is an equality, so both senses hold
    for sense in ("ge", "le"):
        rep = prop71_check(example_c(), 1.0, sense)
        assert rep.all
        assert rep.margins["fiber_curvature"] == pytest.approx(0.0, abs=1e-9)


def test_example_a_uses_negated_base_curvature():
    assert prop71_check(example_a(1.0), 1.0, "ge").all
    # base curvature +K (the other reading) breaks the base condition
    rep = prop71_check(example_a(1.0, base_c=1.0), 1.0, "ge")
    assert rep.cond1 and not rep.cond2


def test_flat_product_fails_positive_bound():
    spec = WarpSpec((-2.0, 2.0), 0.0, 3, constant_warp(1.0), 1.0, "flat")
    rep = prop71_check(spec, 0.5, "ge")
    assert rep.cond1 and rep.cond2 and not rep.cond3
    assert rep.margins["fiber_curvature"] == pytest.approx(-0.5)
    assert rep.witnesses["fiber_curvature"] is not None


# bounds on [0.5, 3] are [-2/81, 4/81]; values stay clear of the ends because random
# sections see a failing mixed curvature only diluted by the fiber curvature
@pytest.mark.parametrize("K", [-0.4, -0.15, 0.0, 0.02, 0.12, 0.5])
def test_conditions_agree_with_sampled_bound(K):
    spec = FR0.spec()
    conds = prop71_check(spec, K, "ge", samples=400, seed=1)
    rep = check_bound(wp_metric(spec), K, "ge", samples=400, seed=1)
    assert conds.all == rep.holds or abs(rep.worst_margin) < 1e-6


# --- bound intervals -----------------------------------------------------------------

def test_bound_interval_examples():
    iv = cor72_interval(cosh_warp(1.0), 1.0, (-1.0, 1.0))
    assert iv.lo == pytest.approx(1.0) and iv.hi == pytest.approx(1.0) and not iv.empty
    t0, t1 = 0.5, 3.0
    iv = cor72_interval(power_warp(3.0, 2 / 3), 0.0, (t0, t1))
    assert iv.lo == pytest.approx(-2 / (9 * t1 ** 2), rel=1e-9)
    assert iv.hi == pytest.approx(4 / (9 * t1 ** 2), rel=1e-9)
    iv = cor72_interval(linear_warp(1.0, 0.0), 1.0, (0.01, 1.0))
    assert iv.lo == pytest.approx(0.0, abs=1e-12) and iv.hi == pytest.approx(2.0)


@pytest.mark.parametrize("E", [1.0, 3.0, 0.5])
def test_closed_friedmann_interval(E):
    iv = rw_bound_interval(FriedmannModel(1, E))
    assert iv.lo == pytest.approx(-9 / (8 * E * E), rel=1e-6)
    assert iv.hi == pytest.approx(9 / (4 * E * E), rel=1e-6)


@pytest.mark.parametrize("C", [0, -1])
def test_open_friedmann_interval(C):
    iv = rw_bound_interval(FriedmannModel(C))
    assert (iv.lo, iv.hi) == (0.0, 0.0) and not iv.lo_attained and not iv.hi_attained
    iv = rw_bound_interval(FriedmannModel(C), (0.1, 20.0))
    assert iv.lo <= 0.0 <= iv.hi


def test_rw_interval_cosh_and_lambda_shift():
    rw = RWModel((-1.0, 1.0), cosh_warp(1.0), 1.0)
    iv = rw_bound_interval(rw)
    assert iv.lo == pytest.approx(1.0) and iv.hi == pytest.approx(1.0) and not iv.empty
    iv = rw_bound_interval(rw, lam=3.0)
    assert iv.lo == pytest.approx(2.0) and iv.hi == pytest.approx(2.0)


@settings(max_examples=8)
@given(st.floats(-0.3, 0.25))
def test_interval_soundness(K):
    t_range = (0.5, 3.0)
    iv = cor72_interval(power_warp(3.0, 2 / 3), 0.0, t_range)
    rep = check_bound(wp_metric(FR0.spec()), K, "ge", samples=300, seed=2)
    if iv.contains(K):
        assert rep.holds
    elif K < iv.lo - 1e-3 or K > iv.hi + 1e-3:
        assert not rep.holds and rep.witness is not None


def test_rw_curvature_examples():
    assert rw_curvatures(RWModel((-1, 1), cosh_warp(1.0), 1.0), 0.4) == pytest.approx((1.0, 1.0))
    assert rw_curvatures(RWModel((-1, 1), constant_warp(1.0), 0.0), 0.4) == (0.0, 0.0)


# --- cosmology -----------------------------------------------------------------------

def test_fluid_examples():
    assert rw_fluid((0.0, 0.0)) == (0.0, 0.0)
    t = 1.3
    rho, p = rw_fluid(FR0, t)
    assert rho == pytest.approx(1 / (6 * math.pi * t * t))
    assert p == pytest.approx(0.0, abs=1e-15)
    # pressureless closed model as well
    rw1 = FriedmannModel(1, 2.0).rw((0.5, 3.0))
    assert rw_fluid(rw1, 1.7)[1] == pytest.approx(0.0, abs=1e-10)


@given(st.floats(0.01, 10.0), st.floats(0.0, 3.0), st.floats(0.1, 5.0))
def test_big_bang_fluids_have_nonnegative_bounds(rho, a, t):
    # rho > 0 and 0 < (1 + 3a) rho <= 3p + rho with p = a rho: K_- < 0 <= K_+
    p = a * rho
    kp = 8 * math.pi * rho / 3
    km = -4 * math.pi * (3 * p + rho) / 3
    assert km < 0 <= kp
    assert rw_fluid((km, kp)) == pytest.approx((rho, p))


def test_friedmann_parametrization():
    assert friedmann(FriedmannModel(0), 1.0) == pytest.approx((1 / 3, 1.0))
    assert friedmann(FriedmannModel(-1), 0.0) == (0.0, 0.0)
    t, f = friedmann(FriedmannModel(1, 3.0), math.pi)
    assert (t, f) == pytest.approx((math.pi, 2.0))
    with pytest.raises(ZeroDenominator):
        FriedmannModel(1).derivatives(0.0)


@pytest.mark.parametrize("C,E", [(1, 1.0), (1, 3.0), (-1, 1.0)])
def test_friedmann_curvatures_by_finite_differences(C, E):
    model = FriedmannModel(C, E)
    rw = model.rw((0.5, 1.5))

    def f_of_t(t):
        return float(model.t_f(model.tau_of_t(t))[1])

    for t in (0.6, 1.0, 1.4):
        h = 1e-3
        f0 = f_of_t(t)
        d1 = (f_of_t(t - 2 * h) - 8 * f_of_t(t - h) + 8 * f_of_t(t + h) - f_of_t(t + 2 * h)) / (12 * h)
        d2 = (-f_of_t(t - 2 * h) + 16 * f_of_t(t - h) - 30 * f0 + 16 * f_of_t(t + h)
              - f_of_t(t + 2 * h)) / (12 * h * h)
        km, kp = rw_curvatures(rw, t)
        assert km == pytest.approx(d2 / f0, rel=1e-6)
        assert kp == pytest.approx((C + d1 * d1) / f0 ** 2, rel=1e-8)
        tau = model.tau_of_t(t)
        u = (1 - math.cos(tau)) if C == 1 else (math.cosh(tau) - 1)
        assert km == pytest.approx(-9 / (E * E * u ** 3), rel=1e-8)
        assert kp == pytest.approx(18 / (E * E * u ** 3), rel=1e-8)


def test_rw_table_columns():
    tab = rw_table(FR0, [1.0, 2.0])
    np.testing.assert_allclose(tab[:, 1], [-2 / 9, -2 / 36])
    np.testing.assert_allclose(tab[:, 4], 0.0, atol=1e-15)


def test_strong_energy_equivalence():
    rep = strong_energy_check(FR0, (0.6, 2.8), samples=10)
    assert rep.ricci_side and rep.bound_side and rep.agree
    rep = strong_energy_check(RWModel((-1.0, 1.0), cosh_warp(1.0), 1.0), (-0.8, 0.8), samples=10)
    assert not rep.ricci_side and not rep.bound_side and rep.agree
    assert rep.min_ricci < 0
    rep = strong_energy_check(RWModel((-1.0, 1.0), constant_warp(1.0), 0.0), (-0.8, 0.8), samples=5)
    assert rep.ricci_side and rep.bound_side
    assert rep.min_ricci == pytest.approx(0.0, abs=1e-9)
