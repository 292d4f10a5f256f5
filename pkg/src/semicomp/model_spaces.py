"""Constant-curvature model spaces realized as quadrics in semi-Euclidean space.

For ``K != 0`` an ``n``-dimensional model space of index ``k`` is the quadric
``<p, p> = 1/K`` in ``R^{n+1}``.  The ambient coordinate 0 is the normal
direction (sign of ``K``); coordinates ``1..n`` carry the tangent signature at
the base point ``o = (1/sqrt|K|, 0, ..., 0)``, pluses first.  For ``K = 0`` the
model is the flat space ``R^n_k`` itself.

Geodesics are parametrized on ``[0, 1]``; the energy of a geodesic is
``E = <v, v>`` for its initial velocity ``v`` and its signed length is
``sign(E) sqrt|E|`` (timelike lengths are negative).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import AntipodalOrCut, BranchOutOfRange, FlatSpace, GeometryError
from .series import cosc, dsinc, inverse_cosc_from_versine, sinc, versc

QUADRIC_TOL = 1e-12
NULL_BRANCH_TOL = 1e-12


class Kind(str, Enum):
    RIEMANNIAN = "riemannian"
    LORENTZ = "lorentz"
    ANTI_RIEMANNIAN = "anti_riemannian"


@dataclass(frozen=True)
class ModelSpace:
    """Model space of curvature ``K``; ``index`` defaults from ``kind``."""

    kind: Kind
    K: float
    dim: int = 2
    index: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if not math.isfinite(self.K):
            raise GeometryError("curvature must be finite")
        if self.dim < 2:
            raise GeometryError("model spaces have dimension >= 2")
        if self.index is None:
            idx = {Kind.RIEMANNIAN: 0, Kind.LORENTZ: 1,
                   Kind.ANTI_RIEMANNIAN: self.dim}[self.kind]
            object.__setattr__(self, "index", idx)
        if not 0 <= self.index <= self.dim:
            raise GeometryError("index out of range")

    @property
    def flat(self) -> bool:
        return self.K == 0.0

    @property
    def tangent_signs(self) -> np.ndarray:
        return np.array([1.0] * (self.dim - self.index) + [-1.0] * self.index)

    @property
    def signs(self) -> np.ndarray:
        """Diagonal of the ambient metric."""
        if self.flat:
            return self.tangent_signs
        return np.concatenate([[math.copysign(1.0, self.K)], self.tangent_signs])

    @property
    def ambient_dim(self) -> int:
        return self.dim if self.flat else self.dim + 1

    def inner(self, a, b) -> float:
        return float(np.dot(np.asarray(a) * self.signs, np.asarray(b)))

    def base_point(self) -> np.ndarray:
        o = np.zeros(self.ambient_dim)
        if not self.flat:
            o[0] = 1.0 / math.sqrt(abs(self.K))
        return o

    def tangent_frame(self) -> np.ndarray:
        """Orthonormal tangent basis at :meth:`base_point`, as columns."""
        eye = np.eye(self.ambient_dim)
        return eye[:, 1:] if not self.flat else eye

    def point(self, coords) -> "ModelPoint":
        return ModelPoint(self, np.asarray(coords, dtype=float))

    def quadric_defect(self, coords) -> float:
        if self.flat:
            return 0.0
        return abs(self.inner(coords, coords) - 1.0 / self.K)

    def project_tangent(self, p, v) -> np.ndarray:
        """Component of ambient ``v`` tangent to the quadric at ``p``."""
        p = np.asarray(p, dtype=float)
        v = np.asarray(v, dtype=float)
        if self.flat:
            return v
        return v - self.K * self.inner(v, p) * p


@dataclass(frozen=True, eq=False)
class ModelPoint:
    space: ModelSpace
    coords: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=float)
        if c.shape != (self.space.ambient_dim,):
            raise GeometryError(
                f"expected {self.space.ambient_dim} ambient coordinates, got {c.shape}")
        # the defect is a difference of squares, so round-off grows with |c|^2
        scale = max(1.0, float(c @ c), 0.0 if self.space.flat else 1.0 / abs(self.space.K))
        if self.space.quadric_defect(c) > max(QUADRIC_TOL * scale, 1e-10):
            raise GeometryError("point is not on the model quadric")
        object.__setattr__(self, "coords", c)


@dataclass(frozen=True, eq=False)
class ModelGeodesic:
    start: ModelPoint
    velocity: np.ndarray

    @property
    def space(self) -> ModelSpace:
        return self.start.space

    @property
    def energy(self) -> float:
        return self.space.inner(self.velocity, self.velocity)

    @property
    def signed_length(self) -> float:
        return signed_length(self.energy)

    def __call__(self, t: float) -> np.ndarray:
        return model_exp(self.start, self.velocity, t).coords

    def derivative(self, t: float) -> np.ndarray:
        return model_velocity(self.start, self.velocity, t)


def signed_length(E: float) -> float:
    """Signed length of a geodesic of energy ``E``."""
    return math.copysign(math.sqrt(abs(E)), E) if E != 0 else 0.0


def energy_of(length: float) -> float:
    """Inverse of :func:`signed_length`: ``l * |l|``."""
    return length * abs(length)


def model_exp(p: ModelPoint, v, t: float = 1.0) -> ModelPoint:
    """Point at affine time ``t`` on the geodesic from ``p`` with velocity ``v``.

    ``gamma(t) = cos(sqrt(KE) t) p + t * sinc(K E t^2) v``; null and timelike
    velocities need no special casing because both factors are entire in ``KE``.
    """
    sp = p.space
    v = np.asarray(v, dtype=float)
    if sp.flat:
        return ModelPoint(sp, p.coords + t * v)
    x = sp.K * sp.inner(v, v) * t * t
    return ModelPoint(sp, cosc(x) * p.coords + t * sinc(x) * v)


def model_velocity(p: ModelPoint, v, t: float) -> np.ndarray:
    sp = p.space
    v = np.asarray(v, dtype=float)
    if sp.flat:
        return v.copy()
    E = sp.inner(v, v)
    x = sp.K * E * t * t
    return -sp.K * E * t * sinc(x) * p.coords + cosc(x) * v


def _log_energy(sp: ModelSpace, p: np.ndarray, q: np.ndarray) -> tuple[float, float]:
    """Return ``(x, half_chord)`` with ``x = K E`` for the geodesic ``p -> q``."""
    chord = q - p
    half = 0.5 * sp.inner(chord, chord)  # equals h_{K,p}(q) = 1/K - <p,q>
    z = sp.K * half                      # 1 - K<p,q>
    if abs(z) < NULL_BRANCH_TOL:
        return z * 2.0 * (1.0 + z / 6.0), half  # series of the inverse near 0
    if z >= 2.0 - 1e-14:
        raise AntipodalOrCut(
            f"K<p,q> = {1 - z:.6g}: points are antipodal or not joined by a geodesic")
    return inverse_cosc_from_versine(z), half


def model_geodesic_between(p: ModelPoint, q: ModelPoint) -> ModelGeodesic:
    """The principal geodesic ``gamma`` with ``gamma(0) = p`` and ``gamma(1) = q``."""
    if p.space != q.space:
        raise GeometryError("points lie in different model spaces")
    sp = p.space
    if sp.flat:
        return ModelGeodesic(p, q.coords - p.coords)
    x, half = _log_energy(sp, p.coords, q.coords)
    # q = cosc(x) p + sinc(x) v, and 1 - cosc(x) = K * half exactly on the quadric
    v = (q.coords - p.coords + sp.K * half * p.coords) / sinc(x)
    v = sp.project_tangent(p.coords, v)
    return ModelGeodesic(p, v)


def energy_between(p: ModelPoint, q: ModelPoint) -> float:
    sp = p.space
    if sp.flat:
        d = q.coords - p.coords
        return sp.inner(d, d)
    x, half = _log_energy(sp, p.coords, q.coords)
    # E = x / K = h / versc(x); no division by K
    return half / versc(x)


def length_between(p: ModelPoint, q: ModelPoint) -> float:
    return signed_length(energy_between(p, q))


def ell(q: ModelPoint, p: ModelPoint) -> float:
    """The K-affine function ``l_{K,q}(p) = <q, p>`` on the quadric."""
    if q.space.flat:
        raise FlatSpace("l_{K,q} is only defined for K != 0; use h directly")
    return q.space.inner(q.coords, p.coords)


def h_of_energy(E, K: float):
    """Modified distance ``h_K`` as a function of the energy ``E``.

    ``(1 - cos sqrt(K E)) / K``, and ``E / 2`` when ``K = 0``.
    """
    if isinstance(E, (float, int, np.floating)):
        return float(E) * versc(K * float(E))
    E = np.asarray(E, dtype=float)
    out = E * versc(K * E)
    return float(out) if out.ndim == 0 else out


def energy_of_h(hval: float, K: float) -> float:
    """Inverse of :func:`h_of_energy` on the principal branch."""
    if K == 0.0:
        return 2.0 * hval
    z = K * hval
    if z >= 2.0:
        raise BranchOutOfRange(
            f"K*h = {z:.6g} >= 2: no principal-branch energy (triple unrealizable)")
    if abs(z) < NULL_BRANCH_TOL:
        x = 2.0 * z * (1.0 + z / 6.0)
    else:
        x = inverse_cosc_from_versine(z)
    return hval / versc(x)


def h(q: ModelPoint, p: ModelPoint) -> float:
    """``h_{K,q}(p)``; on the quadric this is ``1/K - l_{K,q}(p)``."""
    return h_of_energy(energy_between(q, p), q.space.K)


def nonnormalized_angle(q: ModelPoint, p: ModelPoint, r: ModelPoint) -> float:
    """``angle pqr``: inner product of the initial velocities of ``qp`` and ``qr``."""
    a = model_geodesic_between(q, p).velocity
    b = model_geodesic_between(q, r).velocity
    return q.space.inner(a, b)


def angle_from_energies(E_adj1: float, E_adj2: float, E_opp: float, K: float) -> float:
    """Nonnormalized angle between two sides from the three side energies.

    Law of cosines rearranged for the angle:
    ``h(E_opp) = h1 + h2 - K h1 h2 - angle * sinc(K E1) sinc(K E2)``.
    """
    h1, h2, h3 = (h_of_energy(E, K) for E in (E_adj1, E_adj2, E_opp))
    s = sinc(K * E_adj1) * sinc(K * E_adj2)
    if s <= 0.0:
        raise BranchOutOfRange("adjacent side violates the size bound")
    return (h1 + h2 - K * h1 * h2 - h3) / s


def law_of_cosines(E_pq: float, E_qr: float, angle: float, K: float) -> float:
    """Energy of the third side ``pr`` given two sides at ``q`` and ``angle pqr``.

    In the flat case this is ``E_pq + E_qr - 2 angle``; otherwise the half-chord
    form ``h(E_pr) = h(E_pq) + h(E_qr) - K h h - angle * sinc * sinc`` is solved
    on the principal branch.
    """
    if K == 0.0:
        return E_pq + E_qr - 2.0 * angle
    for E in (E_pq, E_qr):
        if K * E >= math.pi ** 2:
            raise BranchOutOfRange("side exceeds the size bound for K")
    h1, h2 = h_of_energy(E_pq, K), h_of_energy(E_qr, K)
    h3 = h1 + h2 - K * h1 * h2 - angle * sinc(K * E_pq) * sinc(K * E_qr)
    return energy_of_h(h3, K)


def radial_shape_scalar(E: float, K: float) -> float:
    """``1 - K h_K(E) = cos sqrt(K E)``: the model shape operator multiple."""
    return cosc(K * E)


__all__ = [
    "Kind", "ModelSpace", "ModelPoint", "ModelGeodesic", "signed_length", "energy_of",
    "model_exp", "model_velocity", "model_geodesic_between", "energy_between",
    "length_between", "ell", "h", "h_of_energy", "energy_of_h", "nonnormalized_angle",
    "angle_from_energies", "law_of_cosines", "radial_shape_scalar", "dsinc",
]
