"""Warped products ``(-B) x_f F``: charts, exact sectional curvature, bound intervals.

The fiber ``F`` is a constant-curvature space of curvature ``C`` in the
conformal chart ``phi(y)^2 |dy|^2`` with ``phi = 1 / (1 + C |y|^2 / 4)``.  The
base is either an interval (coordinate ``t``, metric ``-dt^2``) or a
constant-curvature Riemannian space in the same conformal chart, carrying the
negated metric.  On a quadric base the warping function is the restriction of
an ambient linear functional, which covers ``cosh(dist)``, ``exp(Busemann)``
and ``cos(dist)``.

Chart coordinates are ordered ``(base..., fiber...)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq, minimize_scalar

from .errors import DegenerateInput, DegenerateSection, GeometryError, ZeroDenominator
from .kernel.metric import FD_STEP, MetricSpec

Fn = Callable[[np.ndarray], np.ndarray]


# --- warping functions on an interval ---------------------------------------

@dataclass(frozen=True, eq=False)
class WarpingFunction:
    """``f`` on an interval with its first two derivatives, all vectorized."""

    f: Fn
    df: Fn
    ddf: Fn
    name: str = "f"
    params: dict = field(default_factory=dict)

    def __call__(self, t):
        return self.f(t)


def constant_warp(c: float = 1.0) -> WarpingFunction:
    z = lambda t: np.zeros_like(np.asarray(t, dtype=float))
    return WarpingFunction(lambda t: c + z(t), z, z, "constant", {"c": c})


def cosh_warp(a: float = 1.0) -> WarpingFunction:
    """``cosh(a t) / a``: de Sitter of curvature ``a^2`` with a fiber of curvature ``a^2``."""
    return WarpingFunction(lambda t: np.cosh(a * t) / a, lambda t: np.sinh(a * t),
                           lambda t: a * np.cosh(a * t), "cosh", {"a": a})


def exp_warp(a: float = 1.0) -> WarpingFunction:
    return WarpingFunction(lambda t: np.exp(a * t), lambda t: a * np.exp(a * t),
                           lambda t: a * a * np.exp(a * t), "exp", {"a": a})


def sin_warp(a: float = 1.0) -> WarpingFunction:
    return WarpingFunction(lambda t: np.sin(a * t) / a, lambda t: np.cos(a * t),
                           lambda t: -a * np.sin(a * t), "sin", {"a": a})


def power_warp(c: float, p: float) -> WarpingFunction:
    """``(c t)^p`` for ``t > 0``."""
    return WarpingFunction(lambda t: (c * t) ** p,
                           lambda t: c * p * (c * t) ** (p - 1),
                           lambda t: c * c * p * (p - 1) * (c * t) ** (p - 2),
                           "power", {"c": c, "p": p})


def linear_warp(a: float = 1.0, b: float = 0.0) -> WarpingFunction:
    z = lambda t: np.zeros_like(np.asarray(t, dtype=float))
    return WarpingFunction(lambda t: a * np.asarray(t) + b, lambda t: a + z(t), z,
                           "linear", {"a": a, "b": b})


def polynomial_warp(coeffs) -> WarpingFunction:
    """Polynomial with coefficients in increasing degree."""
    P = np.polynomial.Polynomial(coeffs)
    d1, d2 = P.deriv(1), P.deriv(2)
    return WarpingFunction(P, d1, d2, "polynomial", {"coeffs": list(map(float, coeffs))})


def tabulated_warp(ts, fs) -> WarpingFunction:
    """Cubic-spline interpolation of sampled values of ``f``."""
    sp = CubicSpline(np.asarray(ts, float), np.asarray(fs, float))
    return WarpingFunction(sp, sp.derivative(1), sp.derivative(2), "tabulated",
                           {"t": list(map(float, ts)), "f": list(map(float, fs))})


# --- conformal constant-curvature charts ------------------------------------

def conformal_factor(C: float, y: np.ndarray):
    """``phi``, ``d phi``, ``dd phi`` for ``phi = 1/(1 + C|y|^2/4)`` (batched in ``y``)."""
    y = np.asarray(y, dtype=float)
    k = y.shape[-1]
    r2 = np.sum(y * y, axis=-1)
    phi = 1.0 / (1.0 + 0.25 * C * r2)
    dphi = -0.5 * C * phi[..., None] ** 2 * y
    ddphi = (C * C * phi[..., None, None] ** 3 * y[..., :, None] * y[..., None, :] * 0.5
             - 0.5 * C * phi[..., None, None] ** 2 * np.eye(k))
    return phi, dphi, ddphi


def conformal_radius(C: float) -> float:
    """Largest chart radius usable for ``C > 0`` curvature (keeps away from infinity)."""
    return math.inf if C <= 0 else 2.0 / math.sqrt(C)


def quadric_point(c: float, z: np.ndarray) -> np.ndarray:
    """Ambient point of the quadric ``<X,X> = 1/c`` for conformal chart coordinates ``z``."""
    z = np.asarray(z, dtype=float)
    s = 0.25 * np.sum(z * z, axis=-1)
    den = 1.0 + c * s
    x0 = (1.0 - c * s) / den / math.sqrt(abs(c))
    return np.concatenate([x0[..., None], z / den[..., None]], axis=-1)


# --- warped-product specification -------------------------------------------

@dataclass(frozen=True)
class QuadricBase:
    """Constant-curvature Riemannian base ``B`` with warping ``f(X) = <a, X>``.

    The ambient signs are ``(sign(c), +, ..., +)`` so the base point of the
    chart is ``(1/sqrt|c|, 0, ...)``.
    """

    c: float
    dim: int
    functional: tuple
    radius: float = 1.0

    @property
    def signs(self) -> np.ndarray:
        return np.array([math.copysign(1.0, self.c)] + [1.0] * self.dim)

    def f(self, z) -> np.ndarray:
        X = quadric_point(self.c, z)
        return np.einsum("...i,i->...", X * self.signs, np.asarray(self.functional, float))

    def grad_norm2(self, z) -> np.ndarray:
        """``|grad f|^2`` in the Riemannian base metric: ``<a,a> - c f^2``."""
        a = np.asarray(self.functional, float)
        return float(np.dot(a * self.signs, a)) - self.c * self.f(z) ** 2

    def hessian_factor(self, z) -> np.ndarray:
        """``Hess f = -c f g_B`` for restrictions of linear functionals."""
        return -self.c * self.f(z)


@dataclass(frozen=True, eq=False)
class WarpSpec:
    """``(-B) x_f F``.  ``base`` is ``(t0, t1)`` for an interval or a :class:`QuadricBase`."""

    base: object
    fiber_C: float
    fiber_dim: int
    warp: Optional[WarpingFunction] = None
    fiber_radius: float = 1.0
    name: str = "warped"

    def __post_init__(self):
        if self.fiber_dim < 1:
            raise GeometryError("fiber dimension must be >= 1")
        if self.interval and self.warp is None:
            raise GeometryError("an interval base needs a warping function")
        if self.fiber_C > 0 and self.fiber_radius >= conformal_radius(self.fiber_C):
            raise GeometryError("fiber chart radius too large for a positively curved fiber")

    @property
    def interval(self) -> bool:
        return not isinstance(self.base, QuadricBase)

    @property
    def base_dim(self) -> int:
        return 1 if self.interval else self.base.dim

    @property
    def dim(self) -> int:
        return self.base_dim + self.fiber_dim

    def f_at(self, b) -> np.ndarray:
        b = np.asarray(b, dtype=float)
        return self.warp.f(b[..., 0]) if self.interval else self.base.f(b)

    def split(self, x):
        x = np.asarray(x, dtype=float)
        return x[..., :self.base_dim], x[..., self.base_dim:]


def _interval_jet(spec: WarpSpec):
    n = spec.dim
    C = spec.fiber_C
    w = spec.warp

    def metric(x):
        x = np.asarray(x, dtype=float)
        t = x[..., 0]
        phi = conformal_factor(C, x[..., 1:])[0]
        g = np.zeros(x.shape[:-1] + (n, n))
        g[..., 0, 0] = -1.0
        s = (w.f(t) * phi) ** 2
        for i in range(1, n):
            g[..., i, i] = s
        return g

    def jet(x):
        x = np.asarray(x, dtype=float)
        t = x[..., 0]
        f, f1, f2 = w.f(t), w.df(t), w.ddf(t)
        F, F1, F2 = f * f, 2 * f * f1, 2 * (f1 * f1 + f * f2)
        phi, dphi, ddphi = conformal_factor(C, x[..., 1:])
        P = phi * phi
        dP = 2 * phi[..., None] * dphi
        ddP = 2 * (dphi[..., :, None] * dphi[..., None, :] + phi[..., None, None] * ddphi)
        shp = x.shape[:-1]
        g = metric(x)
        dg = np.zeros(shp + (n, n, n))
        ddg = np.zeros(shp + (n, n, n, n))
        idx = np.arange(1, n)
        # scalar factor s = F(t) P(y) multiplies the fiber identity block
        ds = np.concatenate([(F1 * P)[..., None], F[..., None] * dP], axis=-1)
        dds = np.empty(shp + (n, n))
        dds[..., 0, 0] = F2 * P
        dds[..., 0, 1:] = F1[..., None] * dP
        dds[..., 1:, 0] = F1[..., None] * dP
        dds[..., 1:, 1:] = F[..., None, None] * ddP
        dg[..., :, idx, idx] = ds[..., :, None]
        ddg[..., :, :, idx, idx] = dds[..., :, :, None]
        return g, dg, ddg

    return metric, jet


def _quadric_base_metric(spec: WarpSpec):
    n = spec.dim
    kb = spec.base_dim
    cB = spec.base.c
    C = spec.fiber_C

    def metric(x):
        x = np.asarray(x, dtype=float)
        zb, y = spec.split(x)
        psi = conformal_factor(cB, zb)[0]
        phi = conformal_factor(C, y)[0]
        f = spec.base.f(zb)
        g = np.zeros(x.shape[:-1] + (n, n))
        for i in range(kb):
            g[..., i, i] = -psi ** 2
        for i in range(kb, n):
            g[..., i, i] = (f * phi) ** 2
        return g

    return metric


def wp_metric(spec: WarpSpec, t_margin: float = 0.0) -> MetricSpec:
    """Chart of the warped product; analytic jets for interval bases."""
    kf = spec.fiber_dim
    R = spec.fiber_radius
    if spec.interval:
        t0, t1 = spec.base
        metric, jet = _interval_jet(spec)
        lo = np.array([t0 + t_margin] + [-R] * kf)
        hi = np.array([t1 - t_margin] + [R] * kf)
        return MetricSpec(spec.dim, 1, metric, lo, hi, jet, spec.name,
                          params={"family": "warped"})
    kb = spec.base_dim
    rb = spec.base.radius
    metric = _quadric_base_metric(spec)
    lo = np.array([-rb] * kb + [-R] * kf)
    hi = np.array([rb] * kb + [R] * kf)
    return MetricSpec(spec.dim, kb, metric, lo, hi, None, spec.name, FD_STEP,
                      params={"family": "warped"})


# --- exact sectional curvature ------------------------------------------------

def _base_quantities(spec: WarpSpec, b):
    """``(f, g_B, Hess f, |grad f|^2, K_B)`` at base coordinates ``b``."""
    b = np.asarray(b, dtype=float)
    if spec.interval:
        t = b[0]
        f = float(spec.warp.f(t))
        return f, np.eye(1), np.array([[float(spec.warp.ddf(t))]]), \
            float(spec.warp.df(t)) ** 2, 0.0
    base = spec.base
    psi = float(conformal_factor(base.c, b)[0])
    gB = psi ** 2 * np.eye(base.dim)
    f = float(base.f(b))
    return f, gB, float(base.hessian_factor(b)) * gB, float(base.grad_norm2(b)), base.c


def wp_numerator(spec: WarpSpec, point, x, y, v, w) -> float:
    """``R(X, Y, X, Y)`` for ``X = x + v``, ``Y = y + w`` from the warped-product formula."""
    b, yf = spec.split(point)
    x, y, v, w = (np.asarray(a, dtype=float) for a in (x, y, v, w))
    f, gB, H, grad2, KB = _base_quantities(spec, b)
    phi = float(conformal_factor(spec.fiber_C, yf)[0])
    gF = (f * phi) ** 2 * np.eye(spec.fiber_dim)
    xx, yy = -x @ gB @ x, -y @ gB @ y
    vv, ww = v @ gF @ v, w @ gF @ w
    xy, vw = -x @ gB @ y, v @ gF @ w
    scale = 1.0 + abs(xx * yy) + abs(vv * ww) + abs(xx * ww) + abs(yy * vv)
    if abs(xy) > 1e-9 * scale ** 0.5 or abs(vw) > 1e-9 * scale ** 0.5:
        raise DegenerateInput("the formula needs <x,y> = <v,w> = 0")
    GG = -grad2  # <G, G> in the negated base metric
    return (-KB * xx * yy - (ww * (x @ H @ x) + vv * (y @ H @ y)) / f
            + (spec.fiber_C - GG) * vv * ww / f ** 2)


def wp_sectional(spec: WarpSpec, point, x, y, v, w) -> float:
    """Sectional curvature of ``(x + v) ^ (y + w)`` (numerator divided by the Gram determinant)."""
    b, yf = spec.split(point)
    f, gB, *_ = _base_quantities(spec, b)
    phi = float(conformal_factor(spec.fiber_C, yf)[0])
    gF = (f * phi) ** 2 * np.eye(spec.fiber_dim)
    x, y, v, w = (np.asarray(a, dtype=float) for a in (x, y, v, w))
    XX = -x @ gB @ x + v @ gF @ v
    YY = -y @ gB @ y + w @ gF @ w
    XY = -x @ gB @ y + v @ gF @ w
    disc = XX * YY - XY * XY
    size = (x @ x + v @ v) * (y @ y + w @ w)
    if abs(disc) < 1e-8 * size * max(1.0, f * f) ** 2:
        raise DegenerateSection("section is (nearly) null")
    return wp_numerator(spec, point, x, y, v, w) / disc


# --- warped-product bound conditions -----------------------------------------

@dataclass
class WarpConditions:
    K: float
    sense: str
    cond1: bool
    cond2: bool
    cond3: bool
    margins: dict
    witnesses: dict

    @property
    def all(self) -> bool:
        return self.cond1 and self.cond2 and self.cond3

    def as_dict(self) -> dict:
        return {"K": self.K, "sense": self.sense, "concavity": self.cond1,
                "base_curvature": self.cond2, "fiber_curvature": self.cond3,
                "margins": self.margins, "witnesses": self.witnesses}


def prop71_check(spec: WarpSpec, K: float, sense: str = "ge", samples: int = 200,
                 seed: int = 0, tol: float = 1e-9) -> WarpConditions:
    """Sample the three warped-product conditions for ``R >= K`` (``R <= K``).

    1. ``f`` is ``(-K)``-concave (convex): ``Hess f(u,u) - K |u|^2 f <= 0`` (``>= 0``)
       with ``|u|`` the Riemannian base norm;
    2. ``dim B = 1`` or ``K_B <= -K`` (``>= -K``);
    3. ``dim F = 1`` or ``C >= K f^2 + <G,G>`` (``<=``), ``<G,G> = -|grad f|^2``.
    """
    sgn = 1.0 if sense in ("ge", ">=") else -1.0
    rng = np.random.default_rng(seed)
    kb = spec.base_dim
    if spec.interval:
        t0, t1 = spec.base
        bs = rng.uniform(t0, t1, size=(samples, 1))
        if np.isfinite(t0) and np.isfinite(t1):
            bs[:2, 0] = [t0 + 1e-9 * (t1 - t0), t1 - 1e-9 * (t1 - t0)]
    else:
        r = spec.base.radius
        bs = rng.uniform(-r, r, size=(samples, kb))
    m1, m3, w1, w3 = math.inf, math.inf, None, None
    for b in bs:
        f, gB, H, grad2, KB = _base_quantities(spec, b)
        u = rng.standard_normal(kb)
        u /= math.sqrt(u @ gB @ u)
        val = -sgn * (u @ H @ u - K * f)
        if val < m1:
            m1, w1 = val, {"base_point": b.tolist(), "direction": u.tolist()}
        if spec.fiber_dim > 1:
            val3 = sgn * (spec.fiber_C - (K * f * f - grad2))
            if val3 < m3:
                m3, w3 = val3, {"base_point": b.tolist(), "rhs": K * f * f - grad2}
    if kb == 1:
        m2 = math.inf
    else:
        m2 = sgn * (-K - spec.base.c)
    margins = {"concavity": m1, "base_curvature": m2, "fiber_curvature": m3}
    return WarpConditions(K, "ge" if sgn > 0 else "le", m1 >= -tol, m2 >= -tol, m3 >= -tol,
                          margins, {"concavity": w1 if m1 < -tol else None,
                                    "fiber_curvature": w3 if m3 < -tol else None})


# --- Robertson-Walker spaces and Friedmann models ----------------------------

EMPTY_RTOL = 1e-12


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    lo_attained: bool = True
    hi_attained: bool = True

    @property
    def empty(self) -> bool:
        # ulp-level inversions (e.g. constant curvature) still count as the point interval
        return self.lo > self.hi + EMPTY_RTOL * max(1.0, abs(self.lo), abs(self.hi))

    def contains(self, K: float, tol: float = 0.0) -> bool:
        return self.lo - tol <= K <= self.hi + tol

    def as_dict(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "lo_attained": self.lo_attained,
                "hi_attained": self.hi_attained, "empty": self.empty}


@dataclass(frozen=True, eq=False)
class RWModel:
    interval: tuple
    warp: WarpingFunction
    C: float
    fiber_dim: int = 3
    lam: float = 0.0
    name: str = "rw"

    def spec(self, fiber_radius: float = 1.0) -> WarpSpec:
        return WarpSpec(tuple(self.interval), self.C, self.fiber_dim, self.warp,
                        fiber_radius, self.name)


@dataclass(frozen=True)
class FriedmannModel:
    """Pressureless, ``Lambda = 0`` Robertson-Walker solutions in the parameter ``tau``.

    ``C = 1`` uses ``f = (E/3)(1 - cos tau)``, ``t = (E/3)(tau - sin tau)``
    with ``E > 0`` so that ``f > 0``.
    """

    C: int
    E: float = 1.0

    def __post_init__(self):
        if self.C not in (-1, 0, 1):
            raise GeometryError("Friedmann models have C in {-1, 0, 1}")
        if self.E <= 0:
            raise GeometryError("the Friedmann parameter must be positive")

    @property
    def tau_range(self) -> tuple[float, float]:
        return (0.0, 2 * math.pi) if self.C == 1 else (0.0, math.inf)

    def t_f(self, tau):
        tau = np.asarray(tau, dtype=float)
        a = self.E / 3.0
        if self.C == -1:
            return a * (np.sinh(tau) - tau), a * (np.cosh(tau) - 1.0)
        if self.C == 0:
            return tau ** 3 / 3.0, tau ** 2
        return a * (tau - np.sin(tau)), a * (1.0 - np.cos(tau))

    def derivatives(self, tau):
        """``(f, df/dt, d^2f/dt^2)`` at ``tau`` by the chain rule through ``dt/dtau``."""
        tau = np.asarray(tau, dtype=float)
        if np.any(tau == 0.0):
            raise ZeroDenominator("dt/dtau vanishes at the big bang tau = 0")
        _, f = self.t_f(tau)
        if self.C == 0:
            return f, 2.0 / tau, -2.0 / tau ** 4
        if self.C == -1:
            u = np.cosh(tau) - 1.0
            return f, np.sinh(tau) / u, -3.0 / (self.E * u * u)
        u = 1.0 - np.cos(tau)
        return f, np.sin(tau) / u, -3.0 / (self.E * u * u)

    def curvatures(self, tau):
        """Closed forms of ``(K_-, K_+)`` as functions of ``tau``."""
        tau = np.asarray(tau, dtype=float)
        if np.any(tau == 0.0):
            raise ZeroDenominator("curvature is singular at the big bang tau = 0")
        if self.C == 0:
            t = tau ** 3 / 3.0
            return -2.0 / (9.0 * t * t), 4.0 / (9.0 * t * t)
        u = np.cosh(tau) - 1.0 if self.C == -1 else 1.0 - np.cos(tau)
        k = 9.0 / (self.E ** 2 * u ** 3)
        return -k, 2.0 * k

    def tau_of_t(self, t: float) -> float:
        if self.C == 0:
            return (3.0 * t) ** (1.0 / 3.0)
        lo, hi = self.tau_range
        hi = min(hi, 50.0)
        return brentq(lambda s: float(self.t_f(s)[0]) - t, lo, hi, xtol=1e-15, rtol=1e-15)

    def tau_of_t_array(self, t) -> np.ndarray:
        """Vectorized inverse of ``t(tau)``: grid interpolation polished by Newton (``dt/dtau = f``)."""
        t = np.asarray(t, dtype=float)
        if self.C == 0:
            return np.cbrt(3.0 * t)
        grid = self._tau_grid()
        tg = self.t_f(grid)[0]
        tau = np.interp(t, tg, grid)
        for _ in range(4):
            tt, f = self.t_f(tau)
            tau = tau - (tt - t) / f
        return tau

    def _tau_grid(self) -> np.ndarray:
        hi = 2 * math.pi - 1e-6 if self.C == 1 else 50.0
        return np.concatenate([np.geomspace(1e-6, 0.1, 200, endpoint=False),
                               np.linspace(0.1, hi, 4000)])

    def warp(self) -> WarpingFunction:
        if self.C == 0:
            w = power_warp(3.0, 2.0 / 3.0)
            return WarpingFunction(w.f, w.df, w.ddf, "friedmann", {"C": 0, "E": self.E})
        tau_of = self.tau_of_t_array

        def d(k):
            return lambda t: self.derivatives(tau_of(t))[k]

        return WarpingFunction(d(0), d(1), d(2), "friedmann", {"C": self.C, "E": self.E})

    def rw(self, t_range: tuple[float, float]) -> RWModel:
        return RWModel(t_range, self.warp(), float(self.C), 3, 0.0, f"friedmann(C={self.C})")


def friedmann(model: FriedmannModel, tau) -> tuple:
    """``(t, f)`` on the parametric solution."""
    t, f = model.t_f(tau)
    if np.ndim(t) == 0:
        return float(t), float(f)
    return t, f


def rw_curvatures(rw: RWModel, t) -> tuple:
    """``(K_-, K_+) = (f''/f, (C + f'^2)/f^2)``."""
    f, f1, f2 = rw.warp.f(t), rw.warp.df(t), rw.warp.ddf(t)
    km, kp = f2 / f, (rw.C + f1 * f1) / (f * f)
    if np.ndim(km) == 0:
        return float(km), float(kp)
    return km, kp


def _extremum(fn: Callable[[float], float], lo: float, hi: float, maximize: bool,
              n: int = 2001) -> tuple[float, float]:
    """Global extremum on ``[lo, hi]``: dense grid, then bounded refinement."""
    sgn = -1.0 if maximize else 1.0
    ts = np.linspace(lo, hi, n)
    vals = sgn * np.asarray([fn(t) for t in ts])
    i = int(np.argmin(vals))
    a, b = ts[max(i - 1, 0)], ts[min(i + 1, n - 1)]
    best_t, best = ts[i], vals[i]
    if b > a:
        res = minimize_scalar(lambda s: sgn * fn(s), bounds=(a, b), method="bounded",
                              options={"xatol": 1e-12 * max(1.0, abs(b))})
        if res.fun < best:
            best_t, best = float(res.x), float(res.fun)
    return best_t, sgn * best


def cor72_interval(warp: WarpingFunction, C: float, t_range: tuple[float, float],
                   sense: str = "ge", n: int = 2001) -> Interval:
    """``[sup f''/f, inf (C + f'^2)/f^2]`` on a closed range (reversed for ``sense='le'``)."""
    lo, hi = map(float, t_range)
    km = lambda t: float(warp.ddf(t) / warp.f(t))
    kp = lambda t: float((C + warp.df(t) ** 2) / warp.f(t) ** 2)
    if sense in ("ge", ">="):
        return Interval(_extremum(km, lo, hi, True, n)[1], _extremum(kp, lo, hi, False, n)[1])
    return Interval(_extremum(kp, lo, hi, True, n)[1], _extremum(km, lo, hi, False, n)[1])


def rw_bound_interval(model, t_range: Optional[tuple] = None, lam: float = 0.0,
                      n: int = 4001) -> Interval:
    """``[sup K_-, inf K_+]`` shifted by ``lam / 3``.

    ``model`` is an :class:`RWModel` (range in ``t``) or a
    :class:`FriedmannModel` (range in ``tau``, default the maximal one).
    For Friedmann models with ``C <= 0`` on an unbounded range both ends are
    the limit value 0, reported as not attained.
    """
    if isinstance(model, FriedmannModel):
        lo, hi = model.tau_range if t_range is None else t_range
        if lo == 0.0 and math.isfinite(hi):
            lo = 1e-6 * hi
            if model.C == 1 and hi == 2 * math.pi:
                hi -= lo
        if not math.isfinite(hi):
            # both curvatures tend to 0 from their sides as tau -> infinity and are monotone
            iv = Interval(0.0, 0.0, False, False)
        else:
            km = lambda s: float(model.curvatures(s)[0])
            kp = lambda s: float(model.curvatures(s)[1])
            iv = Interval(_extremum(km, lo, hi, True, n)[1], _extremum(kp, lo, hi, False, n)[1])
    else:
        rng = model.interval if t_range is None else t_range
        iv = cor72_interval(model.warp, model.C, rng, "ge", n)
        lam = lam or model.lam
    shift = lam / 3.0
    return Interval(iv.lo + shift, iv.hi + shift, iv.lo_attained, iv.hi_attained)


def rw_fluid(rw_or_curvatures, t: Optional[float] = None, lam: float = 0.0) -> tuple:
    """Perfect-fluid density and pressure from ``8 pi rho/3 = K_+``, ``-4 pi (3p + rho)/3 = K_-``.

    Accepts an :class:`RWModel` and a time, or a pair ``(K_-, K_+)``.  A
    cosmological constant shifts both curvatures by ``lam / 3`` before
    inverting.
    """
    if isinstance(rw_or_curvatures, RWModel):
        km, kp = rw_curvatures(rw_or_curvatures, t)
        lam = lam or rw_or_curvatures.lam
    else:
        km, kp = rw_or_curvatures
    km, kp = km - lam / 3.0, kp - lam / 3.0
    rho = 3.0 * kp / (8.0 * math.pi)
    p = (-3.0 * km / (4.0 * math.pi) - rho) / 3.0
    return rho, p


def rw_table(rw: RWModel, ts) -> np.ndarray:
    """Rows ``(t, K_-, K_+, rho, p)`` for plotting."""
    ts = np.asarray(ts, dtype=float)
    km, kp = rw_curvatures(rw, ts)
    rho, p = rw_fluid((km, kp), lam=rw.lam)
    return np.column_stack([ts, km, kp, rho, p])


@dataclass
class EnergyConditionReport:
    ricci_side: bool
    bound_side: bool
    min_ricci: float
    witnesses: list

    @property
    def agree(self) -> bool:
        return self.ricci_side == self.bound_side

    def as_dict(self) -> dict:
        return {"strong_energy": self.ricci_side, "nonpositive_lower_bound": self.bound_side,
                "agree": self.agree, "min_ricci": self.min_ricci, "witnesses": self.witnesses}


def strong_energy_check(rw: RWModel, t_range: tuple, samples: int = 40, seed: int = 0,
                        tol: float = 1e-8) -> EnergyConditionReport:
    """Compare ``Ric(u,u) >= 0`` for timelike ``u`` against a pointwise nonpositive lower bound.

    The Ricci side is evaluated by the numerical kernel on the generated chart
    at unit timelike vectors with several boosts; the bound side asks whether
    ``[K_-(t), K_+(t)]`` contains a nonpositive number, i.e. ``K_- <= min(0, K_+)``.
    """
    from .kernel.curvature import ricci  # local: kernel imports stay one-directional

    m = wp_metric(rw.spec())
    rng = np.random.default_rng(seed)
    t0, t1 = t_range
    ts = np.linspace(t0, t1, samples)
    min_ric, wit, bound_ok = math.inf, [], True
    n = m.dim
    for t in ts:
        km, kp = rw_curvatures(rw, t)
        if km > min(0.0, kp) + tol:
            bound_ok = False
        x = np.zeros(n)
        x[0] = t
        f = float(rw.warp.f(t))
        for boost in (0.0, 0.5, 2.0):
            e = rng.standard_normal(n - 1)
            e /= np.linalg.norm(e)
            u = np.zeros(n)
            u[0] = math.cosh(boost)
            u[1:] = math.sinh(boost) * e / f
            r = ricci(m, x, u)
            if r < min_ric:
                min_ric = r
            if r < -tol * max(1.0, math.cosh(boost) ** 2):
                wit.append({"t": float(t), "boost": boost, "ricci": r})
    return EnergyConditionReport(not wit, bound_ok, float(min_ric), wit[:5])


# --- built-in examples with higher-dimensional base ---------------------------

def example_b(k: int = 2, fiber_dim: int = 2, radius: float = 0.8) -> WarpSpec:
    """``B = H^k``, ``f = cosh(distance to the chart center)``, fiber curvature 1."""
    a = np.zeros(k + 1)
    a[0] = -1.0  # f = -<o, X> = X_0
    return WarpSpec(QuadricBase(-1.0, k, tuple(a), radius), 1.0, fiber_dim, None, 0.8, "example_b")


def example_c(k: int = 2, fiber_dim: int = 2, radius: float = 0.8) -> WarpSpec:
    """``B = H^k``, ``f = exp(Busemann)``, flat fiber."""
    a = np.zeros(k + 1)
    a[0], a[1] = -1.0, 1.0  # f = X_0 - X_1 for the null functional
    return WarpSpec(QuadricBase(-1.0, k, tuple(a), radius), 0.0, fiber_dim, None, 1.0, "example_c")


def example_d(k: int = 2, fiber_dim: int = 2, radius: float = 0.8) -> WarpSpec:
    """``B = S^k``, ``f = cos(distance to the chart center)``, fiber curvature -1."""
    a = np.zeros(k + 1)
    a[0] = 1.0
    return WarpSpec(QuadricBase(1.0, k, tuple(a), radius), -1.0, fiber_dim, None, 1.0, "example_d")


@dataclass(frozen=True)
class ProductBase(QuadricBase):
    """Constant-curvature base carrying the constant warping function ``f = 1``."""

    functional: tuple = ()

    def f(self, z):
        return np.ones(np.shape(z)[:-1])

    def grad_norm2(self, z):
        return np.zeros(np.shape(z)[:-1])

    def hessian_factor(self, z):
        return np.zeros(np.shape(z)[:-1])


def example_a(K: float = 1.0, k: int = 2, fiber_dim: int = 2, base_c: Optional[float] = None,
              fiber_C: Optional[float] = None) -> WarpSpec:
    """Product ``(-B) x F`` with ``f = 1``; defaults ``K_B = -K`` and fiber curvature ``K``."""
    cB = -K if base_c is None else base_c
    C = K if fiber_C is None else fiber_C
    return WarpSpec(ProductBase(cB, k, (), 0.5), C, fiber_dim, None, 0.5, "example_a")
