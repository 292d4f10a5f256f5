"""Chart-level semi-Riemannian metrics and their derivative jets.

Every callable here is batched: a point array of shape ``(..., n)`` gives a
metric of shape ``(..., n, n)``.  Jets are returned as ``(g, dg, ddg)`` with
``dg[..., k, i, j] = d_k g_ij`` and ``ddg[..., k, l, i, j] = d_k d_l g_ij``.

Curvature convention: ``R[..., a, b, c, d]`` are the components of
``R(X, Y) Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z`` with
``(R(d_c, d_d) d_b)^a``, so ``R(v, w, v, w) = <R(v, w) w, v>`` equals
``K (<v,v><w,w> - <v,w>^2)`` on a space of constant curvature ``K``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ..errors import DomainMargin, GeometryError

MetricFn = Callable[[np.ndarray], np.ndarray]
JetFn = Callable[[np.ndarray], tuple[np.ndarray, np.ndarray, np.ndarray]]

# Relative finite-difference step.  Second differences at 1e-4 lose ~8 digits
# to roundoff; 1e-3 with one Richardson level balances truncation and roundoff.
FD_STEP = 1e-3


@dataclass(frozen=True, eq=False)
class MetricSpec:
    dim: int
    index: int
    metric: MetricFn
    lower: np.ndarray
    upper: np.ndarray
    jet_fn: Optional[JetFn] = None
    name: str = "metric"
    fd_step: float = FD_STEP
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=float)
        hi = np.asarray(self.upper, dtype=float)
        if lo.shape != (self.dim,) or hi.shape != (self.dim,) or np.any(hi <= lo):
            raise GeometryError("chart box must have dim lower < upper bounds")
        if not 0 <= self.index <= self.dim:
            raise GeometryError("index out of range")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def scale(self) -> float:
        w = self.upper - self.lower
        return float(np.min(w[np.isfinite(w)])) if np.any(np.isfinite(w)) else 1.0

    @property
    def step(self) -> float:
        return self.fd_step * min(self.scale, 1.0)

    @property
    def signs(self) -> np.ndarray:
        return np.array([1.0] * (self.dim - self.index) + [-1.0] * self.index)

    def inside(self, x, margin: float = 0.0) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.all((x > self.lower + margin) & (x < self.upper - margin), axis=-1)

    def require_inside(self, x, margin: Optional[float] = None):
        m = 2.0 * self.step if margin is None else margin
        if not np.all(self.inside(x, m)):
            raise DomainMargin(f"{self.name}: point too close to the chart boundary")

    def g(self, x) -> np.ndarray:
        return np.asarray(self.metric(np.asarray(x, dtype=float)), dtype=float)

    def inner(self, x, v, w) -> np.ndarray:
        return np.einsum("...i,...ij,...j->...", v, self.g(x), w)

    def jet(self, x) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        x = np.asarray(x, dtype=float)
        if self.jet_fn is not None:
            return self.jet_fn(x)
        return fd_jet(self.metric, x, self.step)

    def check_signature(self, points) -> bool:
        """Whether ``g`` has ``index`` negative eigenvalues at every sample point."""
        ev = np.linalg.eigvalsh(self.g(np.atleast_2d(points)))
        neg = np.sum(ev < 0, axis=-1)
        return bool(np.all(neg == self.index) and np.all(np.abs(ev) > 0))

    def sample_points(self, rng: np.random.Generator, count: int, shrink: float = 0.9):
        """Uniform samples from the chart box shrunk about its center."""
        c = 0.5 * (self.lower + self.upper)
        h = 0.5 * shrink * (self.upper - self.lower)
        return c + h * rng.uniform(-1.0, 1.0, size=(count, self.dim))


def fd_jet(metric: MetricFn, x: np.ndarray, h: float):
    """Central differences with one Richardson level for first and second derivatives."""
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    eye = np.eye(n)
    g0 = metric(x)

    def d1(step):
        out = []
        for k in range(n):
            e = step * eye[k]
            out.append((metric(x + e) - metric(x - e)) / (2 * step))
        return np.stack(out, axis=-3)

    def d2(step):
        out = np.empty(x.shape[:-1] + (n, n, n, n))
        for k in range(n):
            ek = step * eye[k]
            out[..., k, k, :, :] = (metric(x + ek) - 2 * g0 + metric(x - ek)) / step ** 2
            for l in range(k + 1, n):
                el = step * eye[l]
                v = (metric(x + ek + el) - metric(x + ek - el)
                     - metric(x - ek + el) + metric(x - ek - el)) / (4 * step ** 2)
                out[..., k, l, :, :] = v
                out[..., l, k, :, :] = v
        return out

    dg = (4 * d1(0.5 * h) - d1(h)) / 3
    ddg = (4 * d2(0.5 * h) - d2(h)) / 3
    return g0, dg, ddg


def christoffel_from_jet(g, dg):
    """``Gam[..., a, b, c] = Gamma^a_{bc}`` together with the inverse metric."""
    ginv = np.linalg.inv(g)
    n = g.shape[-1]
    # first kind: Gamma_{d b c} = (d_b g_dc + d_c g_db - d_d g_bc) / 2
    first = 0.5 * (np.swapaxes(dg, -3, -2) + np.moveaxis(dg, -3, -1) - dg)
    Gam = ginv @ first.reshape(first.shape[:-2] + (n * n,))
    return Gam.reshape(first.shape), ginv


def connection_jet(g, dg, ddg):
    """Christoffel symbols and their derivatives ``dGam[..., e, a, b, c]``."""
    Gam, ginv = christoffel_from_jet(g, dg)
    # d_e Gamma_{d b c} = (dd_{e b} g_dc + dd_{e c} g_db - dd_{e d} g_bc) / 2
    dfirst = 0.5 * (np.swapaxes(ddg, -3, -2) + np.moveaxis(ddg, -3, -1) - ddg)
    n = g.shape[-1]
    shp = g.shape[:-2]
    # contract the upper index with matmuls: (..., n, n) @ (..., n, e*b*c)
    A = np.moveaxis(dfirst, -4, -3).reshape(shp + (n, n ** 3))       # [d, e b c]
    dg_Gam = dg @ Gam.reshape(shp + (1, n, n * n))                     # [e, m, b c]
    B = np.moveaxis(dg_Gam, -3, -2).reshape(shp + (n, n ** 3))         # [m, e b c]
    dGam = (ginv @ (A - B)).reshape(shp + (n, n, n, n))                # [a, e, b, c]
    return Gam, np.moveaxis(dGam, -4, -3)


def connection_vv(g, dg, ddg, v):
    """``(Gam, Gamma(v), dGamma(v, v))`` without forming the full derivative tensor.

    ``Gv[..., a, b] = Gamma^a_{bc} v^c`` and ``dGvv[..., e, a] = d_e Gamma^a_{bc} v^b v^c``.
    """
    Gam, ginv = christoffel_from_jet(g, dg)
    vc = v[..., None, :, None]
    Gv = (Gam @ vc)[..., 0]
    Gvv = (Gv @ v[..., :, None])[..., 0]
    dd_v = (ddg @ v[..., None, None, :, None])[..., 0]                 # [e, l, i]
    # d_e first_{d b c} v^b v^c = sum_b v^b d_e d_b g_dc v^c - (d_e d_d g_bc v^b v^c) / 2
    A = (np.swapaxes(dd_v, -1, -2) @ v[..., None, :, None])[..., 0]     # [e, d]
    C = (dd_v @ v[..., None, :, None])[..., 0]                          # [e, d]
    dGv = (dg @ Gvv[..., None, :, None])[..., 0]                        # [e, m]
    dGvv = (A - 0.5 * C - dGv) @ np.swapaxes(ginv, -1, -2)
    return Gam, Gv, dGvv


def riemann_from_connection(Gam, dGam):
    """``R[..., a, b, c, d]`` in the convention of the module docstring."""
    R = (np.einsum("...cadb->...abcd", dGam) - np.einsum("...dacb->...abcd", dGam)
         + np.einsum("...ace,...edb->...abcd", Gam, Gam)
         - np.einsum("...ade,...ecb->...abcd", Gam, Gam))
    return R


def christoffel(m: MetricSpec, x):
    g, dg, _ = m.jet(x)
    return christoffel_from_jet(g, dg)[0]


def riemann(m: MetricSpec, x):
    g, dg, ddg = m.jet(x)
    Gam, dGam = connection_jet(g, dg, ddg)
    return riemann_from_connection(Gam, dGam), g


def constant_metric(diag, name: str = "flat", half_width: float = 1e3) -> MetricSpec:
    """Flat chart with constant diagonal metric; ``index`` is the number of negatives."""
    d = np.asarray(diag, dtype=float)
    n = d.size
    G = np.diag(d)

    def metric(x):
        return np.broadcast_to(G, np.shape(x)[:-1] + (n, n)).copy()

    def jet(x):
        shp = np.shape(x)[:-1]
        return (metric(x), np.zeros(shp + (n, n, n)), np.zeros(shp + (n, n, n, n)))

    return MetricSpec(n, int(np.sum(d < 0)), metric, -half_width * np.ones(n),
                      half_width * np.ones(n), jet, name, params={"diag": d.tolist()})
