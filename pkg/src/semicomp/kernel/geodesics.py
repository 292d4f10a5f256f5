"""Geodesic initial and boundary value problems on a chart.

All integrations are batched: ``B`` geodesics share one ODE system so the
per-step Python overhead is paid once.  The state of each geodesic is its
position and velocity, optionally followed by the variational matrices
``J = dx/dv0`` and ``J'`` (coordinate Jacobi fields with ``J(0) = 0``,
``J'(0) = I``) and a parallel frame ``P``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from ..errors import LeftDomain, NoConvergence
from .metric import MetricSpec, christoffel_from_jet, connection_vv

RTOL = 1e-12
ATOL = 1e-13
BVP_TOL = 1e-10
BVP_MAXITER = 40
JACOBIAN_REFRESH = 0.05

MODES = ("geo", "var", "frame")


def _chunks(mode: str, n: int) -> list[tuple[str, tuple]]:
    c = [("x", (n,)), ("v", (n,))]
    if mode in ("var", "frame"):
        c += [("J", (n, n)), ("Jd", (n, n))]
    if mode == "frame":
        c += [("P", (n, n))]
    return c


def _unpack(y: np.ndarray, B: int, chunks) -> dict:
    out, off = {}, 0
    for name, shp in chunks:
        size = int(np.prod(shp))
        out[name] = y[off * B:(off + size) * B].reshape((B,) + shp)
        off += size
    return out


def _pack(parts: dict, chunks) -> np.ndarray:
    return np.concatenate([parts[name].reshape(-1) for name, _ in chunks])


def _rhs_factory(m: MetricSpec, B: int, mode: str):
    n = m.dim
    chunks = _chunks(mode, n)
    margin = 2.0 * m.step if m.jet_fn is None else 0.0

    def rhs(t, y):
        s = _unpack(y, B, chunks)
        x, v = s["x"], s["v"]
        if not np.all(m.inside(x, margin)):
            raise LeftDomain(f"{m.name}: geodesic left the chart domain")
        g, dg, ddg = m.jet(x)
        out = {"x": v}
        if mode == "geo":
            Gam, _ = christoffel_from_jet(g, dg)
            Gv = (Gam @ v[:, None, :, None])[..., 0]
        else:
            _, Gv, dGvv = connection_vv(g, dg, ddg, v)
        out["v"] = -(Gv @ v[:, :, None])[..., 0]
        if mode != "geo":
            J, Jd = s["J"], s["Jd"]
            out["J"] = Jd
            out["Jd"] = -(np.swapaxes(dGvv, -1, -2) @ J) - 2.0 * (Gv @ Jd)
        if mode == "frame":
            out["P"] = -(Gv @ s["P"])
        return _pack(out, chunks)

    return rhs, chunks


@dataclass
class BatchSolution:
    """Dense solution of a batch of geodesic systems."""

    metric: MetricSpec
    mode: str
    B: int
    t_end: float
    sol: object
    final: dict

    def state(self, t) -> dict:
        t = np.asarray(t, dtype=float)
        y = self.sol(t)
        chunks = _chunks(self.mode, self.metric.dim)
        if t.ndim == 0:
            return _unpack(y, self.B, chunks)
        # (state, T) -> dict of (T, B, ...)
        parts = [_unpack(y[:, i], self.B, chunks) for i in range(t.size)]
        return {k: np.stack([p[k] for p in parts]) for k in parts[0]}


def integrate(m: MetricSpec, x0, v0, mode: str = "geo", t_end: float = 1.0,
              frame0=None, rtol: float = RTOL, atol: float = ATOL,
              J0=None, Jd0=None) -> BatchSolution:
    """Integrate on ``[0, t_end]``.

    Variational data default to ``J(0) = 0`` and ``J'(0) = I`` (``"var"``) or
    ``J'(0) = frame0`` (``"frame"``); ``J0``/``Jd0`` override them.
    """
    x0 = np.atleast_2d(np.asarray(x0, dtype=float))
    v0 = np.atleast_2d(np.asarray(v0, dtype=float))
    B, n = x0.shape
    rhs, chunks = _rhs_factory(m, B, mode)
    parts = {"x": x0, "v": v0}
    if mode != "geo":
        parts["J"] = np.zeros((B, n, n))
        parts["Jd"] = np.broadcast_to(np.eye(n), (B, n, n)).copy()
    if mode == "frame":
        parts["P"] = np.asarray(frame0, dtype=float).reshape(B, n, n).copy()
        parts["Jd"] = parts["P"].copy()
    if J0 is not None:
        parts["J"] = np.asarray(J0, dtype=float).reshape(B, n, n).copy()
    if Jd0 is not None:
        parts["Jd"] = np.asarray(Jd0, dtype=float).reshape(B, n, n).copy()
    y0 = _pack(parts, chunks)
    if t_end == 0.0:
        def sol(t, _y=y0):
            t = np.asarray(t)
            return _y if t.ndim == 0 else np.repeat(_y[:, None], t.size, axis=1)
        return BatchSolution(m, mode, B, 0.0, sol, _unpack(y0, B, chunks))
    res = solve_ivp(rhs, (0.0, t_end), y0, method="DOP853", rtol=rtol, atol=atol,
                    dense_output=True)
    if not res.success:
        raise NoConvergence(f"geodesic integration failed: {res.message}")
    return BatchSolution(m, mode, B, t_end, res.sol, _unpack(res.y[:, -1], B, chunks))


@dataclass(eq=False)
class GeodesicPath:
    """A geodesic ``x(t)``, ``t in [0, 1]``, with dense output."""

    metric: MetricSpec
    start: np.ndarray
    velocity: np.ndarray
    batch: BatchSolution
    slot: int

    @property
    def energy(self) -> float:
        return float(self.metric.inner(self.start, self.velocity, self.velocity))

    @property
    def signed_length(self) -> float:
        E = self.energy
        return float(np.sign(E) * np.sqrt(abs(E)))

    @property
    def end(self) -> np.ndarray:
        return self.batch.final["x"][self.slot].copy()

    @property
    def end_velocity(self) -> np.ndarray:
        return self.batch.final["v"][self.slot].copy()

    def __call__(self, t):
        s = self.batch.state(t)
        return s["x"][..., self.slot, :] if np.ndim(t) else s["x"][self.slot]

    def derivative(self, t):
        s = self.batch.state(t)
        return s["v"][..., self.slot, :] if np.ndim(t) else s["v"][self.slot]

    def energy_drift(self, samples: int = 21) -> float:
        ts = np.linspace(0.0, self.batch.t_end, samples)
        x = self(ts)
        v = self.derivative(ts)
        return float(np.max(np.abs(self.metric.inner(x, v, v) - self.energy)))

    def residual(self, samples: int = 11, h: float = 1e-4) -> float:
        """``max |x'' + Gamma(x', x')|`` with ``x''`` by central differences of the dense output."""
        ts = np.linspace(2 * h, self.batch.t_end - 2 * h, samples)
        acc = (self.derivative(ts + h) - self.derivative(ts - h)) / (2 * h)
        x = self(ts)
        v = self.derivative(ts)
        g, dg, _ = self.metric.jet(x)
        Gam, _ = christoffel_from_jet(g, dg)
        return float(np.max(np.abs(acc + np.einsum("kabc,kb,kc->ka", Gam, v, v))))


def _paths(m: MetricSpec, bs: BatchSolution, x0, v0) -> list[GeodesicPath]:
    return [GeodesicPath(m, x0[i].copy(), v0[i].copy(), bs, i) for i in range(bs.B)]


def geodesic_ivp_batch(m: MetricSpec, x, v) -> list[GeodesicPath]:
    x = np.atleast_2d(np.asarray(x, dtype=float))
    v = np.atleast_2d(np.asarray(v, dtype=float))
    m.require_inside(x, 0.0 if m.jet_fn is not None else None)
    return _paths(m, integrate(m, x, v, "geo"), x, v)


def geodesic_ivp(m: MetricSpec, x, v) -> GeodesicPath:
    return geodesic_ivp_batch(m, x, v)[0]


def geodesic_bvp_batch(m: MetricSpec, p, q, v_guess=None, tol: float = BVP_TOL,
                       maxiter: int = BVP_MAXITER) -> list[GeodesicPath]:
    """Newton shooting ``v -> exp_p(v) - q`` with the variational Jacobian.

    The Jacobian is reused across iterations (chord Newton, integrating only
    the geodesic itself) and refreshed whenever a residual fails to shrink by
    ``JACOBIAN_REFRESH``.  Converged when ``|exp_p(v) - q| <= tol * scale``
    with ``scale = max(1, |q - p|)``.
    """
    p = np.atleast_2d(np.asarray(p, dtype=float))
    q = np.atleast_2d(np.asarray(q, dtype=float))
    B, n = p.shape
    v = (q - p).copy() if v_guess is None else np.atleast_2d(np.asarray(v_guess, float)).copy()
    scale = np.maximum(1.0, np.linalg.norm(q - p, axis=1))
    done: dict[int, tuple[BatchSolution, int]] = {}
    active = np.arange(B)
    prev = np.full(B, np.inf)
    jac = np.zeros((B, n, n))
    refresh = True
    for _ in range(maxiter):
        bs = integrate(m, p[active], v[active], "var" if refresh else "geo")
        miss = bs.final["x"] - q[active]
        err = np.linalg.norm(miss, axis=1)
        ok = err <= tol * scale[active]
        for j in np.nonzero(ok)[0]:
            done[int(active[j])] = (bs, int(j))
        keep = ~ok
        if not np.any(keep):
            break
        idx = active[keep]
        if refresh:
            jac[idx] = bs.final["J"][keep]
        step = np.linalg.solve(jac[idx], miss[keep][..., None])[..., 0]
        # halve steps whose residual grew, a cheap guard against overshooting
        grow = err[keep] > prev[idx]
        step[grow] *= 0.5
        refresh = bool(np.any(err[keep] > JACOBIAN_REFRESH * prev[idx]))
        prev[idx] = err[keep]
        v[idx] -= step
        active = idx
    if len(done) < B:
        bad = sorted(set(range(B)) - set(done))
        raise NoConvergence(f"shooting did not converge for {len(bad)} of {B} pairs "
                            "(endpoints may not lie in a normal neighborhood)")
    out = []
    for i in range(B):
        bs, j = done[i]
        out.append(GeodesicPath(m, p[i].copy(), v[i].copy(), bs, j))
    return out


def geodesic_bvp(m: MetricSpec, p, q, v_guess=None, tol: float = BVP_TOL) -> GeodesicPath:
    return geodesic_bvp_batch(m, p, q, v_guess, tol)[0]


def orthonormal_frame(g: np.ndarray) -> np.ndarray:
    """Columns ``e_i`` with ``<e_i, e_j> = diag(+...+, -...-)``, pluses first."""
    w, U = np.linalg.eigh(g)
    order = np.argsort(-w, kind="stable")
    w, U = w[order], U[:, order]
    return U / np.sqrt(np.abs(w))


def vertex_velocity(path: GeodesicPath, at_end: bool = False) -> np.ndarray:
    """Velocity of the ``[0,1]``-parametrized side leaving the chosen endpoint."""
    return -path.end_velocity if at_end else path.velocity.copy()


__all__ = ["GeodesicPath", "geodesic_ivp", "geodesic_ivp_batch", "geodesic_bvp",
           "geodesic_bvp_batch", "integrate", "orthonormal_frame", "BatchSolution"]
