"""Model triangles: classification, size bounds, realization, hinge calculus.

A side triple ``(l1, l2, l3)`` is read as ``(|pq|, |qr|, |rp|)``: ``q`` is the
vertex of the included angle and ``p``, ``r`` carry the shoulder angles.
Angles are nonnormalized (inner products of ``[0,1]``-parametrized side
velocities), so they scale with both adjacent side lengths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import RealizationError, SizeBoundViolation, ZeroTriple
from .model_spaces import (
    Kind,
    ModelPoint,
    ModelSpace,
    angle_from_energies,
    energy_between,
    energy_of,
    law_of_cosines,
    length_between,
    model_exp,
    model_geodesic_between,
    signed_length,
)

DEGENERATE_RTOL = 1e-12
GRAM_RTOL = 1e-9


class TripleClass(str, Enum):
    T_PLUS = "T_plus"
    T_MINUS = "T_minus"
    D_PLUS = "D_plus"
    D_MINUS = "D_minus"
    M_REGION = "M_region"


class Preference(str, Enum):
    DEFINITE = "definite"
    LORENTZ = "lorentz"


def _triple(t) -> tuple[float, float, float]:
    a = tuple(float(x) for x in np.asarray(t, dtype=float).reshape(-1))
    if len(a) != 3:
        raise ValueError("a side triple has exactly three entries")
    return a


def classify(t) -> TripleClass:
    a = _triple(t)
    scale = max(abs(x) for x in a)
    if scale == 0.0:
        raise ZeroTriple("(0, 0, 0) is not a side triple")
    tol = DEGENERATE_RTOL * scale
    for sign, strict, degen in ((1.0, TripleClass.T_PLUS, TripleClass.D_PLUS),
                                (-1.0, TripleClass.T_MINUS, TripleClass.D_MINUS)):
        b = sorted(sign * x for x in a)
        if b[0] >= -tol:
            gap = b[0] + b[1] - b[2]
            if abs(gap) <= tol:
                return degen
            if b[0] > tol and gap > tol:
                return strict
    return TripleClass.M_REGION


def size_bounds_ok(t, K: float) -> bool:
    """Whether the triple satisfies the realizability size bounds for ``K``.

    Positive sides are bounded only when ``K > 0`` and negative sides only when
    ``K < 0``; there are no bounds at ``K = 0``.
    """
    a = _triple(t)
    cls = classify(a)
    if K == 0.0:
        return True
    lim = math.pi / math.sqrt(abs(K))
    if cls is TripleClass.T_PLUS:
        return K < 0 or sum(a) < 2 * lim
    if cls is TripleClass.T_MINUS:
        return K > 0 or sum(a) > -2 * lim
    if K > 0:
        return max(a) < lim
    return min(a) > -lim


def model_kind(t, preference: Preference | str = Preference.DEFINITE) -> Kind:
    cls = classify(t)
    pref = Preference(preference)
    if cls is TripleClass.T_PLUS:
        return Kind.RIEMANNIAN
    if cls is TripleClass.T_MINUS:
        return Kind.ANTI_RIEMANNIAN
    if cls is TripleClass.M_REGION or pref is Preference.LORENTZ:
        return Kind.LORENTZ
    return Kind.RIEMANNIAN if cls is TripleClass.D_PLUS else Kind.ANTI_RIEMANNIAN


def _place_pair(E1: float, E2: float, angle: float, signs) -> tuple[np.ndarray, np.ndarray]:
    """Two vectors of the 2-plane with the given Gram matrix, in an orthonormal basis."""
    s1, s2 = signs
    det = E1 * E2 - angle * angle
    scale = max(abs(E1), abs(E2), abs(angle))
    tol = GRAM_RTOL * scale
    if s1 == s2:
        sg = s1
        e1, e2, an = sg * E1, sg * E2, sg * angle
        if e1 < -tol or e2 < -tol or det < -tol * scale:
            raise RealizationError("Gram data is not definite; wrong model plane")
        e1, e2 = max(e1, 0.0), max(e2, 0.0)
        if e1 == 0.0 and e2 == 0.0:
            return np.zeros(2), np.zeros(2)
        swap = e1 < e2
        if swap:
            e1, e2 = e2, e1
        r1 = math.sqrt(e1)
        A = np.array([r1, 0.0])
        B = np.array([an / r1, math.sqrt(max(det, 0.0) / e1)])
        return (B, A) if swap else (A, B)
    if det > tol * scale:
        raise RealizationError("Gram data is definite; no Lorentz realization")
    if E1 == 0.0 and E2 == 0.0 and angle == 0.0:
        raise RealizationError("two null sides with zero angle span nothing")
    # null coordinates u = x0 + x1, v = x0 - x1 with <X, Y> = (uX vY + vX uY) / 2.
    # With A = (1, E1) the conditions on B are uB vB = E2 and vB + E1 uB = 2 angle,
    # a quadratic in uB whose stable root has no cancellation for nearly null sides
    D = max(angle * angle - E1 * E2, 0.0)
    qroot = angle + math.copysign(math.sqrt(D), angle)
    uB = E2 / qroot if qroot != 0.0 else 0.0
    vB = 2.0 * angle - E1 * uB
    u, v = _balance_boost(np.array([1.0, uB]), np.array([E1, vB]))
    A = 0.5 * np.array([u[0] + v[0], u[0] - v[0]])
    B = 0.5 * np.array([u[1] + v[1], u[1] - v[1]])
    return A, B


def _balance_boost(u: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Boost null coordinates ``(u, v) -> (k u, v / k)`` to minimize the Euclidean size.

    Nearly null sides with a large angle otherwise come out with huge
    components, and the ambient coordinates lose digits quadratically.
    """
    nu, nv = math.hypot(*u), math.hypot(*v)
    if nu == 0.0 or nv == 0.0:
        return u, v
    k = math.sqrt(nv) / math.sqrt(nu)
    return k * u, v / k


@dataclass(frozen=True, eq=False)
class ModelTriangle:
    space: ModelSpace
    p: ModelPoint
    q: ModelPoint
    r: ModelPoint
    triple: tuple[float, float, float]
    included: float
    shoulder_p: float
    shoulder_r: float

    @property
    def vertices(self) -> tuple[ModelPoint, ModelPoint, ModelPoint]:
        return self.p, self.q, self.r

    def measured_triple(self) -> tuple[float, float, float]:
        return (length_between(self.p, self.q), length_between(self.q, self.r),
                length_between(self.r, self.p))

    def side(self, name: str):
        """Directed side ``'pq'``, ``'qr'`` or ``'rp'`` (or reverses) as a geodesic."""
        pts = {"p": self.p, "q": self.q, "r": self.r}
        return model_geodesic_between(pts[name[0]], pts[name[1]])

    def as_dict(self) -> dict:
        return {
            "space": self.space.kind.value,
            "K": self.space.K,
            "triple": list(self.triple),
            "vertices": {k: v.coords.tolist() for k, v in zip("pqr", self.vertices)},
            "included_angle": self.included,
            "shoulder_angles": [self.shoulder_p, self.shoulder_r],
            "ambient_signs": self.space.signs.tolist(),
        }


def triple_energies(t) -> tuple[float, float, float]:
    return tuple(energy_of(x) for x in _triple(t))


def angles_from_triple(t, K: float) -> tuple[float, float, float]:
    """``(included at q, shoulder at p, shoulder at r)`` from the law of cosines."""
    E1, E2, E3 = triple_energies(t)
    return (angle_from_energies(E1, E2, E3, K),
            angle_from_energies(E1, E3, E2, K),
            angle_from_energies(E2, E3, E1, K))


def realize(t, K: float, degenerate_preference: Preference | str = Preference.DEFINITE
            ) -> ModelTriangle:
    """Place a triangle with side triple ``t`` in the 2-dimensional model of curvature ``K``."""
    a = _triple(t)
    if not size_bounds_ok(a, K):
        raise SizeBoundViolation(f"triple {list(a)} violates the size bounds for K={K}")
    kind = model_kind(a, degenerate_preference)
    space = ModelSpace(kind, float(K), 2)
    E1, E2, E3 = triple_energies(a)
    inc, sh_p, sh_r = angles_from_triple(a, K)
    A1, A2 = _place_pair(E1, E2, inc, space.tangent_signs)
    frame = space.tangent_frame()
    q = ModelPoint(space, space.base_point())
    p = model_exp(q, frame @ A1, 1.0)
    r = model_exp(q, frame @ A2, 1.0)
    return ModelTriangle(space, p, q, r, a, inc, sh_p, sh_r)


def included_angle(t, K: float) -> float:
    if not size_bounds_ok(t, K):
        raise SizeBoundViolation("triple violates the size bounds")
    return angles_from_triple(t, K)[0]


def shoulder_angles(t, K: float) -> tuple[float, float]:
    if not size_bounds_ok(t, K):
        raise SizeBoundViolation("triple violates the size bounds")
    _, sp, sr = angles_from_triple(t, K)
    return sp, sr


# side opposite each vertex, directed cyclically
OPPOSITE = {"p": "qr", "q": "rp", "r": "pq"}


def comparison_point(tri: ModelTriangle, vertex: str, lam: float) -> ModelPoint:
    g = tri.side(OPPOSITE[vertex])
    return model_exp(g.start, g.velocity, lam)


def comparison_point_energy(t, K: float, vertex: str, lam: float,
                            degenerate_preference="definite") -> float:
    tri = realize(t, K, degenerate_preference)
    pts = {"p": tri.p, "q": tri.q, "r": tri.r}
    return energy_between(pts[vertex], comparison_point(tri, vertex, lam))


def comparison_point_distance(t, K: float, vertex: str, lam: float,
                              degenerate_preference="definite") -> float:
    """Model signed distance from ``vertex`` to the point at ``lam`` on the opposite side."""
    return signed_length(comparison_point_energy(t, K, vertex, lam, degenerate_preference))


def hinge_third_energy(E1: float, E2: float, angle: float, K: float) -> float:
    """Signed length of the side closing a hinge with energies ``E1``, ``E2``."""
    return signed_length(law_of_cosines(E1, E2, angle, K))


@dataclass(frozen=True)
class StraighteningInstance:
    hypothesis: float
    conclusion_p: float
    conclusion_r: float


def straightening_quantities(t, K: float, lam: float, d: float) -> StraighteningInstance:
    """Hypothesis and conclusion margins for a subdivided triangle.

    ``t`` is the model triple ``(|pq|, |qr|, |rp|)``; ``m`` sits at parameter
    ``lam`` on ``p -> r``.  The two subdividing triangles share the side length
    ``d = |q_i m_i|`` and inherit the remaining sides from the model triangle.
    Returns ``(1-lam) <p1 m1 q1 + lam <r2 m2 q2`` and the two differences
    ``<q~p~m~ - <q1 p1 m1`` and ``<q~r~m~ - <q2 r2 m2``.
    """
    l1, l2, l3 = _triple(t)
    for sub in ((l1, l2, l3), (l1, lam * l3, d), (l2, (1 - lam) * l3, d)):
        if not size_bounds_ok(sub, K):
            raise SizeBoundViolation(f"subtriangle {sub} violates the size bounds")
    Epq, Eqr, Epr = energy_of(l1), energy_of(l2), energy_of(l3)
    Epm, Emr, Ed = energy_of(lam * l3), energy_of((1 - lam) * l3), energy_of(d)
    # model triangle angles at p and r, restricted to the sub-sides
    ang_p_model = lam * angle_from_energies(Epq, Epr, Eqr, K)
    ang_r_model = (1 - lam) * angle_from_energies(Eqr, Epr, Epq, K)
    # triangle q1 p1 m1: sides |q1p1| = l1, |p1m1| = lam*l3, |m1q1| = d
    ang_m1 = angle_from_energies(Epm, Ed, Epq, K)       # <p1 m1 q1
    ang_p1 = angle_from_energies(Epq, Epm, Ed, K)       # <q1 p1 m1
    # triangle q2 m2 r2: |q2r2| = l2, |m2r2| = (1-lam)*l3, |q2m2| = d
    ang_m2 = angle_from_energies(Emr, Ed, Eqr, K)       # <r2 m2 q2
    ang_r2 = angle_from_energies(Eqr, Emr, Ed, K)       # <q2 r2 m2
    hyp = (1 - lam) * ang_m1 + lam * ang_m2
    return StraighteningInstance(hyp, ang_p_model - ang_p1, ang_r_model - ang_r2)


def straightening_verdict(t, K: float, lam: float, d: float, reverse: bool = False,
                          tol: float = 1e-12) -> tuple[bool, bool]:
    """``(hypothesis_holds, conclusions_hold)`` for the straightening lemma instance."""
    s = straightening_quantities(t, K, lam, d)
    sign = -1.0 if reverse else 1.0
    scale = 1.0 + max(abs(x) for x in triple_energies(t)) + d * d
    eps = tol * scale
    hyp = sign * s.hypothesis >= -eps
    concl = sign * s.conclusion_p >= -eps and sign * s.conclusion_r >= -eps
    return hyp, concl
