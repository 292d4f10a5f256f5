"""The modified shape operator ``S = Hess h`` along radial geodesics and its Riccati equation.

Along ``sigma(t) = exp_q(t u)`` write ``x = K t^2 <u,u>``.  The gradient of
``h = h_K(E_q)`` is ``G = g sigma'`` with ``g = t sinc(x)``, and ``g' = cosc(x) = 1 - K h``.
With ``F`` the Jacobi matrix (``F(0) = 0``, ``F'(0) = I``) in a parallel frame,

    S = g F' F^{-1} + 2 K t^2 dsinc(x) M,       M = u u^T eta,

which equals ``(1 - K h)`` on the radial direction and ``g F' F^{-1}`` on its
orthogonal complement, and stays smooth when ``u`` is null.  Every evaluation
uses the regular form ``F / t`` so that ``t = 0`` is harmless.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import solve_ivp

from ..errors import ConjugatePoint, DegenerateInput, NoConvergence
from ..model_spaces import h_of_energy
from ..series import cosc, dsinc, sinc
from .geodesics import GeodesicPath, geodesic_bvp_batch, geodesic_ivp_batch
from .jacobi import JacobiSolution, conjugate_scan, jacobi_ivp
from .metric import MetricSpec

CONJUGATE_RTOL = 1e-10
DIFF_STEP = 1e-3


def sym(A):
    return 0.5 * (A + np.swapaxes(A, -1, -2))


def definiteness_margin(A, signs) -> np.ndarray:
    """Smallest eigenvalue of ``x -> <A x, x>`` on the Euclidean unit sphere (batched)."""
    eta = np.asarray(signs, dtype=float)
    return np.linalg.eigvalsh(sym(eta[:, None] * A))[..., 0]


@dataclass
class ShapeOperator:
    """``S(t)`` in the parallel frame, with ``g = |<G,G>|^{1/2}`` and ``1 - K h``."""

    t: float
    S: np.ndarray
    g_scalar: float
    one_minus_Kh: float
    K: float
    signs: np.ndarray
    u: np.ndarray
    point: np.ndarray

    def self_adjoint_defect(self) -> float:
        A = self.signs[:, None] * self.S
        return float(np.max(np.abs(A - A.T)))

    def radial_defect(self) -> float:
        """``|S u - (1 - K h) u|``."""
        return float(np.linalg.norm(self.S @ self.u - self.one_minus_Kh * self.u))

    def shape_bound_margin(self) -> float:
        """Definiteness margin of ``(1 - K h) I - S``; nonnegative on ``R >= K`` spaces."""
        n = self.S.shape[0]
        return float(definiteness_margin(self.one_minus_Kh * np.eye(n) - self.S, self.signs))


@dataclass(eq=False)
class RadialShape:
    """Shape operator data along one radial geodesic from ``q``."""

    jacobi: JacobiSolution
    K: float

    @property
    def signs(self) -> np.ndarray:
        return self.jacobi.signs

    @property
    def u(self) -> np.ndarray:
        return self.jacobi.u

    @property
    def energy(self) -> float:
        return self.jacobi.energy

    def _x(self, t):
        return self.K * np.asarray(t, dtype=float) ** 2 * self.energy

    def g(self, t):
        """Coefficient of ``sigma'`` in ``G``: ``t sinc(K t^2 E)``."""
        return np.asarray(t) * sinc(self._x(t))

    def dg(self, t):
        return cosc(self._x(t))

    def _regular(self, t):
        t = np.asarray(t, dtype=float)
        tt = np.where(t == 0.0, 1.0, t)
        F, dF = self.jacobi.F(t)
        Fb = np.where((t == 0.0)[..., None, None], dF, F / tt[..., None, None])
        smin = np.linalg.svd(Fb, compute_uv=False)[..., -1]
        if np.any(smin < CONJUGATE_RTOL):
            raise ConjugatePoint("Jacobi matrix is singular: conjugate point on the radial geodesic")
        return Fb, dF

    def S_jacobi(self, t):
        """``g F' F^{-1}`` (the Jacobi-field shape operator of the ODE form)."""
        Fb, dF = self._regular(t)
        s = sinc(self._x(t))
        return np.asarray(s)[..., None, None] * np.linalg.solve(np.swapaxes(Fb, -1, -2),
                                                                 np.swapaxes(dF, -1, -2)).swapaxes(-1, -2)

    def correction(self, t):
        M = np.outer(self.u, self.signs * self.u)
        c = 2.0 * self.K * np.asarray(t, dtype=float) ** 2 * dsinc(self._x(t))
        return np.asarray(c)[..., None, None] * M

    def S(self, t):
        return self.S_jacobi(t) + self.correction(t)

    def at(self, t: float) -> ShapeOperator:
        t = float(t)
        x = float(self._x(t))
        g = abs(float(self.g(t))) * np.sqrt(abs(self.energy))
        return ShapeOperator(t, self.S(t), g, float(cosc(x)), self.K, self.signs.copy(),
                             self.u, self.jacobi.point(t))

    def dS(self, t, step: float = DIFF_STEP):
        """Fourth-order central difference of ``S`` (one-sided shift near ``t = 0``)."""
        t = float(t)
        h = min(step, t / 2.0) if t > 0 else step
        if t - 2 * h < 0:
            a = np.array([self.S(t + k * h) for k in range(5)])
            return (-25 * a[0] + 48 * a[1] - 36 * a[2] + 16 * a[3] - 3 * a[4]) / (12 * h)
        a = self.S(np.array([t - 2 * h, t - h, t + h, t + 2 * h]))
        return (a[0] - 8 * a[1] + 8 * a[2] - a[3]) / (12 * h)

    def residual_matrix(self, t: float) -> np.ndarray:
        """``g S' + S^2 - (1 - K h) S + g^2 R + K g^2 M`` (frame, affine parameter)."""
        t = float(t)
        S = self.S(t)
        g = float(self.g(t))
        M = np.outer(self.u, self.signs * self.u)
        R = self.jacobi.R(t)
        return g * self.dS(t) + S @ S - float(self.dg(t)) * S + g * g * R + self.K * g * g * M

    def residual(self, t: float) -> float:
        return float(np.linalg.norm(self.residual_matrix(t), 2))


def _radial_data(m: MetricSpec, q, sigma) -> tuple[np.ndarray, np.ndarray]:
    q = np.asarray(q, dtype=float)
    if isinstance(sigma, GeodesicPath):
        if not np.allclose(sigma.start, q, rtol=0, atol=1e-12):
            raise DegenerateInput("radial geodesic must start at q")
        return q, sigma.velocity
    return q, np.asarray(sigma, dtype=float)


def radial_shape(m: MetricSpec, q, sigma, K: float, t_end: float = 1.0,
                 check_conjugate: bool = True) -> RadialShape:
    """Integrate the Jacobi system along ``sigma`` (a path from ``q`` or its initial velocity)."""
    q, u = _radial_data(m, q, sigma)
    sol = jacobi_ivp(m, (q, u), t_end=t_end)
    if check_conjugate:
        tc = conjugate_scan(sol, rtol=CONJUGATE_RTOL)
        if tc is not None:
            raise ConjugatePoint(f"conjugate point at t = {tc:.6g}")
    return RadialShape(sol, float(K))


def modified_shape_operator(m: MetricSpec, q, sigma, t: float, K: float = 0.0) -> ShapeOperator:
    return radial_shape(m, q, sigma, K, t_end=max(float(t), 1e-12)).at(t)


def riccati_residual(m: MetricSpec, q, K: float, sigma, t: float,
                     step: float = DIFF_STEP) -> float:
    rs = radial_shape(m, q, sigma, K, t_end=float(t) + 2.5 * step)
    return rs.residual(t)


def riccati_ode_oracle(rs: RadialShape, ts, t0: float = 1e-3) -> np.ndarray:
    """``S`` from integrating ``g S' + S^2 - g' S + g^2 R = 0`` directly.

    The singular start is replaced by the Taylor value
    ``S(t0) = I + S''(0) t0^2 / 2`` with ``S''(0) = (g'''(0) I - 2 R(0)) / 3``;
    the ODE damps the ``O(t0^3)`` start error like ``t0 / t``.  The radial
    correction term is then added in closed form.
    """
    n = rs.u.size
    E, K = rs.energy, rs.K
    R0 = rs.jacobi.R(0.0)
    g3 = -K * E
    S0 = np.eye(n) + 0.5 * t0 ** 2 * (g3 * np.eye(n) - 2 * R0) / 3.0

    def rhs(t, y):
        S = y.reshape(n, n)
        g = float(rs.g(t))
        dS = (float(rs.dg(t)) * S - S @ S - g * g * rs.jacobi.R(t)) / g
        return dS.ravel()

    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    res = solve_ivp(rhs, (t0, float(ts.max())), S0.ravel(), method="DOP853",
                    rtol=1e-11, atol=1e-12, t_eval=np.sort(ts))
    if not res.success:
        raise NoConvergence(f"Riccati oracle failed: {res.message}")
    order = np.argsort(ts)
    out = np.empty((ts.size, n, n))
    out[order] = res.y.T.reshape(-1, n, n)
    return out + rs.correction(ts)


def initial_derivatives(S_fn: Callable, h: float = 0.05,
                        levels: int = 4) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``S(0), S'(0), S''(0)`` by one-sided Richardson extrapolation of difference quotients."""
    S0 = np.asarray(S_fn(0.0))

    def d1(s):
        return (np.asarray(S_fn(s)) - S0) / s

    def d2(s):
        # S(s) = S0 + S1 s + S2 s^2/2 + ...: eliminate S1 using S(2s)
        return (np.asarray(S_fn(2 * s)) - 2 * np.asarray(S_fn(s)) + S0) / s ** 2

    def richardson(fn, s, levels=3):
        table = [fn(s / 2 ** k) for k in range(levels)]
        for j in range(1, levels):
            table = [(2 ** j * table[k + 1] - table[k]) / (2 ** j - 1) for k in range(len(table) - 1)]
        return table[0]

    return S0, richardson(d1, h, levels), richardson(d2, h, levels)


def expected_second_derivative(rs: RadialShape) -> np.ndarray:
    """``S''(0) = (-K E I - 2 R(0) - 2 K M) / 3`` for the modified operator."""
    n = rs.u.size
    M = np.outer(rs.u, rs.signs * rs.u)
    return (-rs.K * rs.energy * np.eye(n) - 2 * rs.jacobi.R(0.0) - 2 * rs.K * M) / 3.0


def hessian_h_fd(m: MetricSpec, q, K: float, point, W, step: float = 2e-2) -> np.ndarray:
    """``Hess h(w, w)`` at ``point`` for each coordinate vector in ``W``, by fourth-order differences.

    ``h`` is evaluated through boundary-value geodesics from ``q`` to points of
    the geodesics ``exp_point(s w)``.
    """
    W = np.atleast_2d(np.asarray(W, dtype=float))
    point = np.asarray(point, dtype=float)
    ks = np.array([-2, -1, 1, 2])
    P = np.repeat(point[None], W.shape[0] * ks.size, axis=0)
    V = np.concatenate([k * step * W for k in ks])
    ends = np.array([p.end for p in geodesic_ivp_batch(m, P, V)])
    paths = geodesic_bvp_batch(m, np.repeat(np.asarray(q, float)[None], len(ends) + 1, axis=0),
                               np.vstack([ends, point]))
    h = np.array([h_of_energy(p.energy, K) for p in paths])
    h0 = h[-1]
    f = h[:-1].reshape(ks.size, W.shape[0])
    return (-f[0] + 16 * f[1] - 30 * h0 + 16 * f[2] - f[3]) / (12 * step ** 2)


# --- comparison of Jacobi/Riccati systems ----------------------------------

@dataclass
class RiccatiReport:
    margin: float
    t_at_margin: float
    ts: np.ndarray = field(repr=False)
    margins: np.ndarray = field(repr=False)

    def as_dict(self) -> dict:
        return {"margin": self.margin, "t_at_margin": self.t_at_margin}


def jacobi_profile_solution(Rfn: Callable, n: int, t_end: float):
    """Dense solution of ``F'' + R(t) F = 0``, ``F(0) = 0``, ``F'(0) = I``."""

    def rhs(t, y):
        F = y[:n * n].reshape(n, n)
        dF = y[n * n:].reshape(n, n)
        return np.concatenate([dF.ravel(), (-np.asarray(Rfn(t)) @ F).ravel()])

    y0 = np.concatenate([np.zeros(n * n), np.eye(n).ravel()])
    res = solve_ivp(rhs, (0.0, t_end), y0, method="DOP853", rtol=1e-12, atol=1e-13,
                    dense_output=True)
    if not res.success:
        raise NoConvergence(res.message)
    return res.sol


def profile_shape(Rfn: Callable, n: int, g: Optional[Callable] = None, t_end: float = 1.0):
    """``t -> g(t) F'(t) F(t)^{-1}`` for a curvature profile; ``g`` defaults to ``t``."""
    sol = jacobi_profile_solution(Rfn, n, t_end)

    def S(t):
        t = float(t)
        y = sol(t)
        F = y[:n * n].reshape(n, n)
        dF = y[n * n:].reshape(n, n)
        if t == 0.0:
            return np.eye(n)
        Fb = F / t
        if np.linalg.svd(Fb, compute_uv=False)[-1] < CONJUGATE_RTOL:
            raise ConjugatePoint(f"profile Jacobi matrix singular at t = {t:.6g}")
        ratio = 1.0 if g is None else float(g(t)) / t
        return ratio * np.linalg.solve(Fb.T, dF.T).T

    return S


def riccati_compare(R1: Callable, R2: Callable, g: Optional[Callable] = None, signs=None,
                    t_end: float = 1.0, samples: int = 101) -> RiccatiReport:
    """Min over ``t`` of the definiteness margin of ``S_1 - S_2``.

    ``R1``, ``R2`` map ``t`` to ``n x n`` matrices, self-adjoint for ``diag(signs)``.
    """
    n = np.asarray(R1(0.0)).shape[0]
    signs = np.ones(n) if signs is None else np.asarray(signs, dtype=float)
    S1 = profile_shape(R1, n, g, t_end)
    S2 = profile_shape(R2, n, g, t_end)
    ts = np.linspace(0.0, t_end, samples)[1:]
    D = np.array([S1(t) - S2(t) for t in ts])
    margins = definiteness_margin(D, signs)
    i = int(np.argmin(margins))
    return RiccatiReport(float(margins[i]), float(ts[i]), ts, margins)
