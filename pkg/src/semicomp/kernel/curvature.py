"""Curvature tensors, sectional curvature and curvature-bound sampling on charts."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..errors import DegenerateInput, DegenerateSection
from .metric import MetricSpec, riemann

DEGENERATE_SECTION_RTOL = 1e-8


def rvwv_from_tensor(R, g, v, w):
    """``R(v, w, v, w) = <R(v, w) w, v>`` for batched tensors and vectors."""
    return np.einsum("...ae,...e,...abcd,...b,...c,...d->...", g, v, R, w, v, w)


def jacobi_matrix(R, u):
    """Coordinate matrix of ``y -> R(y, u) u``."""
    return np.einsum("...abcd,...b,...d->...ac", R, u, u)


def discriminant(g, v, w):
    vv = np.einsum("...i,...ij,...j->...", v, g, v)
    ww = np.einsum("...i,...ij,...j->...", w, g, w)
    vw = np.einsum("...i,...ij,...j->...", v, g, w)
    return vv * ww - vw * vw


def curvature_rvwv(m: MetricSpec, x, v, w) -> float:
    x = np.asarray(x, dtype=float)
    m.require_inside(x)
    R, g = riemann(m, x)
    return float(rvwv_from_tensor(R, g, np.asarray(v, float), np.asarray(w, float)))


def sectional_curvature(m: MetricSpec, x, v, w) -> float:
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    m.require_inside(x)
    R, g = riemann(m, x)
    disc = float(discriminant(g, v, w))
    if abs(disc) < DEGENERATE_SECTION_RTOL * np.dot(v, v) * np.dot(w, w):
        raise DegenerateSection("section is (nearly) null; sectional curvature undefined")
    return float(rvwv_from_tensor(R, g, v, w)) / disc


@dataclass
class BoundReport:
    K: float
    sense: str
    holds: bool
    worst_margin: float
    witness: Optional[dict]
    samples: int
    tol: float
    margins: np.ndarray = field(default=None, repr=False)

    def as_dict(self) -> dict:
        return {"K": self.K, "sense": self.sense, "holds": self.holds,
                "worst_margin": self.worst_margin, "samples": self.samples,
                "tol": self.tol, "witness": self.witness}


def _sense_sign(sense: str) -> float:
    if sense in ("ge", ">=", "≥"):
        return 1.0
    if sense in ("le", "<=", "≤"):
        return -1.0
    raise ValueError(f"sense must be 'ge' or 'le', not {sense!r}")


def bound_margins(R, g, v, w, K: float, sense: str = "ge"):
    """Margins of ``R(v,w,v,w) >= K (<v,v><w,w> - <v,w>^2)`` (or ``<=``) for Euclidean-unit v, w."""
    nv = np.linalg.norm(v, axis=-1)
    nw = np.linalg.norm(w, axis=-1)
    scale = (nv * nw) ** 2
    val = rvwv_from_tensor(R, g, v, w) - K * discriminant(g, v, w)
    return _sense_sign(sense) * val / scale


def random_sections(rng: np.random.Generator, g, count_per_point: int = 1):
    """Random pairs of vectors, rejecting sections that are close to null."""
    n = g.shape[-1]
    npts = g.shape[0]
    V = np.empty((npts, count_per_point, n))
    W = np.empty_like(V)
    for i in range(npts):
        got = 0
        while got < count_per_point:
            v = rng.standard_normal(n)
            w = rng.standard_normal(n)
            v /= np.linalg.norm(v)
            w /= np.linalg.norm(w)
            if abs(discriminant(g[i], v, w)) < 1e3 * DEGENERATE_SECTION_RTOL:
                continue
            V[i, got] = v
            W[i, got] = w
            got += 1
    return V, W


def check_bound(m: MetricSpec, K: float, sense: str = "ge", samples: int = 1000,
                seed: int = 0, points=None, sections_per_point: int = 1,
                tol: float = 1e-7) -> BoundReport:
    """Sample points and 2-frames; test the curvature-bound inequality at each.

    The inequality form is sign-correct for spacelike and timelike sections at
    once: ``R >= K`` means spacelike sectional curvatures ``>= K`` and timelike
    ones ``<= K``.
    """
    rng = np.random.default_rng(seed)
    if points is None:
        npts = max(1, samples // sections_per_point)
        points = m.sample_points(rng, npts)
    points = np.atleast_2d(np.asarray(points, dtype=float))
    m.require_inside(points)
    R, g = riemann(m, points)
    V, W = random_sections(rng, g, sections_per_point)
    k = sections_per_point
    Rr = np.repeat(R, k, axis=0)
    gr = np.repeat(g, k, axis=0)
    V = V.reshape(-1, m.dim)
    W = W.reshape(-1, m.dim)
    margins = bound_margins(Rr, gr, V, W, K, sense)
    i = int(np.argmin(margins))
    worst = float(margins[i])
    holds = worst >= -tol
    witness = None
    if not holds:
        disc = float(discriminant(gr[i], V[i], W[i]))
        witness = {"point": np.repeat(points, k, axis=0)[i].tolist(), "v": V[i].tolist(),
                   "w": W[i].tolist(), "margin": worst,
                   "section": "spacelike" if disc > 0 else "timelike",
                   "sectional_curvature": float(rvwv_from_tensor(Rr[i], gr[i], V[i], W[i])) / disc}
    return BoundReport(K, "ge" if _sense_sign(sense) > 0 else "le", bool(holds), worst,
                       witness, int(margins.size), tol, margins)


def ricci(m: MetricSpec, x, u) -> float:
    """``Ric(u, u)``: trace of ``w -> R(w, u) u``."""
    x = np.asarray(x, dtype=float)
    m.require_inside(x)
    R, _ = riemann(m, x)
    return float(np.trace(jacobi_matrix(R, np.asarray(u, dtype=float))))


def ricci_timelike(m: MetricSpec, x, u) -> float:
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    if float(m.inner(x, u, u)) >= 0:
        raise DegenerateInput("ricci_timelike needs a timelike vector")
    return ricci(m, x, u)
