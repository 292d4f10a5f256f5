"""Jacobi fields along chart geodesics, in a parallel orthonormal frame.

The frame ``P(t)`` starts as an orthonormal basis ``E0`` at the base point
(pluses first) and is parallel translated, which identifies every tangent
space along the geodesic with ``R^n_k``.  In frame coordinates the Jacobi
equation reads ``F'' + R(t) F = 0`` with ``R(t) y = R(y, u) u`` and ``u`` the
(constant) frame coordinates of the velocity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import minimize_scalar

from ..errors import DegenerateSection
from .curvature import jacobi_matrix, rvwv_from_tensor
from .geodesics import BatchSolution, GeodesicPath, integrate, orthonormal_frame
from .metric import MetricSpec, christoffel_from_jet, riemann


@dataclass(eq=False)
class JacobiSolution:
    """Matrix Jacobi solution in frame coordinates, by default ``F(0) = 0``, ``F'(0) = I``."""

    metric: MetricSpec
    start: np.ndarray
    velocity: np.ndarray
    frame0: np.ndarray
    batch: BatchSolution
    F0: Optional[np.ndarray] = None
    dF0: Optional[np.ndarray] = None

    @property
    def signs(self) -> np.ndarray:
        return self.metric.signs

    @property
    def eta(self) -> np.ndarray:
        return np.diag(self.signs)

    @property
    def u(self) -> np.ndarray:
        """Frame coordinates of the initial (hence every parallel) velocity."""
        return np.linalg.solve(self.frame0, self.velocity)

    @property
    def energy(self) -> float:
        u = self.u
        return float(u @ (self.signs * u))

    @property
    def t_end(self) -> float:
        return self.batch.t_end

    def _states(self, t):
        s = self.batch.state(t)
        scalar = np.ndim(t) == 0
        take = (lambda a: a[0]) if scalar else (lambda a: a[:, 0])
        return {k: take(v) for k, v in s.items()}

    def point(self, t):
        return self._states(t)["x"]

    def frame(self, t):
        return self._states(t)["P"]

    def F(self, t):
        """``(F, F')`` at ``t`` (scalar or array)."""
        s = self._states(t)
        x, v, P, J, Jd = s["x"], s["v"], s["P"], s["J"], s["Jd"]
        g, dg, _ = self.metric.jet(x)
        Gam, _ = christoffel_from_jet(g, dg)
        DJ = Jd + np.einsum("...abc,...b,...cj->...aj", Gam, v, J)
        Pinv = np.linalg.inv(P)
        return Pinv @ J, Pinv @ DJ

    def R(self, t):
        """``R(t)`` in the parallel frame."""
        s = self._states(t)
        Rt, _ = riemann(self.metric, s["x"])
        A = jacobi_matrix(Rt, s["v"])
        P = s["P"]
        return np.linalg.solve(P, A @ P)


def jacobi_ivp(m: MetricSpec, gamma, F0=None, dF0=None, t_end: float = 1.0) -> JacobiSolution:
    """Co-integrate the geodesic, a parallel frame and the matrix Jacobi field.

    ``gamma`` is a :class:`GeodesicPath` or a pair ``(x, v)``.  Default initial
    data ``F(0) = 0``, ``F'(0) = I``; other data are carried by the coordinate
    variational equation with ``J(0) = P F0`` and ``J'(0) = P dF0 - Gamma(v, P F0)``.
    """
    if isinstance(gamma, GeodesicPath):
        x0, v0 = gamma.start, gamma.velocity
    else:
        x0, v0 = (np.asarray(a, dtype=float) for a in gamma)
    E0 = orthonormal_frame(m.g(x0))
    if F0 is None and dF0 is None:
        return JacobiSolution(m, x0, v0, E0, integrate(m, x0, v0, "frame", t_end, frame0=E0))
    n = m.dim
    F0 = np.zeros((n, n)) if F0 is None else np.asarray(F0, dtype=float)
    dF0 = np.eye(n) if dF0 is None else np.asarray(dF0, dtype=float)
    g, dg, _ = m.jet(x0)
    Gam, _ = christoffel_from_jet(g, dg)
    J0 = E0 @ F0
    Jd0 = E0 @ dF0 - np.einsum("abc,b,cj->aj", Gam, v0, J0)
    bs = integrate(m, x0, v0, "frame", t_end, frame0=E0, J0=J0, Jd0=Jd0)
    return JacobiSolution(m, x0, v0, E0, bs, F0, dF0)


def _sigma_min_scaled(sol: JacobiSolution, t: float) -> float:
    F, _ = sol.F(t)
    return float(np.linalg.svd(F / t, compute_uv=False)[-1])


def conjugate_scan(sol: JacobiSolution, samples: int = 400, rtol: float = 1e-10) -> Optional[float]:
    """First ``t`` with ``|det F(t)| < rtol * |F'(0)|^n t^n``, refined to a minimum of ``sigma_min(F/t)``."""
    T = sol.t_end
    ts = np.linspace(T / samples, T, samples)
    Fs, _ = sol.F(ts)
    Fb = Fs / ts[:, None, None]
    sig = np.linalg.svd(Fb, compute_uv=False)[:, -1]
    dets = np.abs(np.linalg.det(Fb))
    for i in range(len(ts)):
        left = sig[i - 1] if i > 0 else math.inf
        right = sig[i + 1] if i + 1 < len(ts) else math.inf
        is_min = sig[i] <= left and sig[i] <= right
        if not (is_min or dets[i] < rtol):
            continue
        a = ts[max(i - 1, 0)]
        b = ts[min(i + 1, len(ts) - 1)]
        res = minimize_scalar(lambda s: _sigma_min_scaled(sol, s), bounds=(a, b),
                              method="bounded", options={"xatol": 1e-12})
        F, _ = sol.F(float(res.x))
        det = abs(np.linalg.det(F / res.x))
        # a transversal zero of sigma_min leaves det ~ sigma_min * O(1) at the refined point
        if det < rtol or res.fun < 1e-7:
            return float(res.x)
    return None


def jacobi_taylor_check(m: MetricSpec, x, u, v, T: Optional[float] = None,
                        degree: int = 9) -> tuple[float, float]:
    """Fitted ``t^4`` coefficient of ``<J, J>`` against ``-R(v, u, v, u) / 3``.

    ``J`` is the Jacobi field along ``exp(t u)`` with ``J(0) = 0``, ``J'(0) = v``.
    ``<J,J>/t^2`` is fitted by a polynomial on Chebyshev nodes in ``(0, T]``.
    """
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    R, g = riemann(m, x)
    vv = float(v @ g @ v)
    if abs(vv) < 1e-10 * (v @ v) or abs(float(u @ g @ v)) > 1e-8 * math.sqrt((u @ u) * (v @ v)):
        raise DegenerateSection("need nonnull v perpendicular to u")
    if T is None:
        T = 0.3 / max(1.0, float(np.linalg.norm(u)))
    bs = integrate(m, x, u, "var", T)
    k = np.arange(1, 40)
    ts = 0.5 * T * (1 - np.cos(np.pi * (k - 0.5) / 39))  # Chebyshev nodes in (0, T)
    ts = np.sort(np.concatenate([ts, [T]]))
    s = bs.state(ts)
    Jv = np.einsum("kij,j->ki", s["J"][:, 0], v)
    gx = m.g(s["x"][:, 0])
    q = np.einsum("ki,kij,kj->k", Jv, gx, Jv) / ts ** 2
    coeff = np.polynomial.polynomial.polyfit(ts / T, q, degree)
    fitted_t4 = coeff[2] / T ** 2
    expected = -float(rvwv_from_tensor(R, g, v, u)) / 3.0
    return float(fitted_t4), expected
