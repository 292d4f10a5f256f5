"""Ranges of sectional curvature on an indefinite 3-plane.

A curvature tensor on a Lorentz (or anti-Lorentz) 3-plane ``V`` is a quadratic
form ``Q1`` on bivectors.  In the frame ``(e1^e2, e1^e3, e2^e3)``, with ``e1``
the vector of odd sign and ``e2``, ``e3`` orthonormal of equal sign, the
bivector inner product is ``Q2 = x3^2 - x1^2 - x2^2`` and the sectional
curvature is ``Q1 / Q2``.  ``Q2 > 0`` are the definite ("spacelike") sections,
``Q2 < 0`` the indefinite ones, and the null conic ``N = {Q2 = 0}`` is
parametrized by ``(cos th, sin th, 1)``.

The extreme values of ``Q1 / Q2`` are generalized eigenvalues of the pencil
``Q1 - k Q2``.  At a tangency of ``H = {Q1 = 0}`` with ``N`` the shared endpoint
of the two ranges is an eigenvalue with a null eigenvector; it is attained
exactly when some non-null eigenvector carries the same eigenvalue.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DegenerateInput, DegenerateInterval, NotDiagonalizable, NullConic
from .kernel.curvature import rvwv_from_tensor
from .kernel.geodesics import orthonormal_frame
from .kernel.metric import MetricSpec, riemann

Q2 = np.diag([-1.0, -1.0, 1.0])
CONSTANT_RTOL = 1e-12
NULL_SIGN_RTOL = 1e-12
NULL_CONIC_RTOL = 1e-10
EIG_MATCH = 1e-9
EIG_AMBIGUOUS = 1e-6
NULL_EIGVEC = 1e-6
GRID = 720

CLOSED, OPEN, UNDETERMINED = "closed", "open", "undetermined"


@dataclass(frozen=True)
class CurvatureQuadric:
    """``Q1`` in the bivector frame; ``lorentz`` is False for an anti-Lorentz plane."""

    Q1: np.ndarray
    lorentz: bool = True

    def __post_init__(self):
        Q = np.asarray(self.Q1, dtype=float)
        if Q.shape != (3, 3):
            raise DegenerateInput("Q1 must be a 3x3 matrix")
        if not np.allclose(Q, Q.T, rtol=0, atol=1e-12 * max(1.0, np.abs(Q).max())):
            raise DegenerateInput("Q1 must be symmetric")
        object.__setattr__(self, "Q1", 0.5 * (Q + Q.T))

    @classmethod
    def from_upper(cls, entries, lorentz: bool = True) -> "CurvatureQuadric":
        """From the six upper-triangle entries ``(q11, q12, q13, q22, q23, q33)``."""
        a, b, c, d, e, f = (float(v) for v in entries)
        return cls(np.array([[a, b, c], [b, d, e], [c, e, f]]), lorentz)

    @property
    def scale(self) -> float:
        return max(float(np.abs(self.Q1).max()), 1e-300)

    @property
    def vector_signs(self) -> np.ndarray:
        """Frame signs of ``(e1, e2, e3)``."""
        return np.array([-1.0, 1.0, 1.0]) if self.lorentz else np.array([1.0, -1.0, -1.0])

    def on_null_conic(self, theta) -> np.ndarray:
        th = np.asarray(theta, dtype=float)
        x = np.stack([np.cos(th), np.sin(th), np.ones_like(th)], axis=-1)
        return np.einsum("...i,ij,...j->...", x, self.Q1, x)


def bivector(v, w) -> np.ndarray:
    """Coordinates of ``v ^ w`` in ``(e1^e2, e1^e3, e2^e3)``."""
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    return np.array([v[0] * w[1] - v[1] * w[0], v[0] * w[2] - v[2] * w[0],
                     v[1] * w[2] - v[2] * w[1]])


def sectional_on_plane(q: CurvatureQuadric, x) -> float:
    x = np.asarray(x, dtype=float)
    den = float(x @ Q2 @ x)
    if abs(den) < NULL_CONIC_RTOL * float(x @ x):
        raise NullConic("section lies on the null conic; curvature undefined")
    return float(x @ q.Q1 @ x) / den


# --- null conic analysis ---------------------------------------------------------

@dataclass
class NullSignReport:
    minimum: float
    maximum: float
    argmin: float
    argmax: float
    sign: str       # "nonnegative", "nonpositive", "mixed" or "zero"
    tol: float

    def as_dict(self) -> dict:
        return {"min": self.minimum, "max": self.maximum, "argmin": self.argmin,
                "argmax": self.argmax, "sign": self.sign, "tol": self.tol}


def _refine(fn, th0: float, width: float) -> tuple[float, float]:
    res = minimize_scalar(fn, bounds=(th0 - width, th0 + width), method="bounded",
                          options={"xatol": 1e-13})
    return float(res.x), float(res.fun)


def null_sign(q: CurvatureQuadric) -> NullSignReport:
    """Extremes of ``Q1`` on ``N`` (normalized by ``x3 = 1``) and their sign pattern."""
    th = np.linspace(0.0, 2 * math.pi, GRID, endpoint=False)
    vals = q.on_null_conic(th)
    w = 2 * math.pi / GRID
    f = lambda s: float(q.on_null_conic(s))
    amin, vmin = _refine(f, float(th[np.argmin(vals)]), w)
    amax, vmax = _refine(lambda s: -f(s), float(th[np.argmax(vals)]), w)
    vmax = -vmax
    tol = NULL_SIGN_RTOL * q.scale
    if abs(vmin) <= tol and abs(vmax) <= tol:
        sign = "zero"
    elif vmin >= -tol:
        sign = "nonnegative"
    elif vmax <= tol:
        sign = "nonpositive"
    else:
        sign = "mixed"
    return NullSignReport(vmin, vmax, amin % (2 * math.pi), amax % (2 * math.pi), sign, tol)


def null_contacts(q: CurvatureQuadric, tol: Optional[float] = None) -> list[dict]:
    """Zeros of ``Q1`` on ``N`` with their multiplicity (1 crossing, 2 or 4 tangency)."""
    th = np.linspace(0.0, 2 * math.pi, GRID, endpoint=False)
    vals = q.on_null_conic(th)
    scale = q.scale
    tol = NULL_SIGN_RTOL * scale if tol is None else tol
    f = lambda s: float(q.on_null_conic(s))
    out = []
    w = 2 * math.pi / GRID
    for i in range(GRID):
        a, b, c = vals[i - 1], vals[i], vals[(i + 1) % GRID]
        if a * c < 0 and abs(b) <= abs(a) and abs(b) <= abs(c):
            # sign change near this node: a crossing
            out.append({"theta": float(th[i]), "order": 1})
        elif (abs(b) <= abs(a) and abs(b) <= abs(c)) and a * c > 0:
            s, v = _refine(lambda t: abs(f(t)), float(th[i]), w)
            if abs(v) <= max(tol, 1e-9 * scale):
                # order 4 when the quadratic term of the local expansion vanishes too
                h = 1e-3
                curv = (f(s + h) - 2 * f(s) + f(s - h)) / h ** 2
                order = 4 if abs(curv) <= 1e-5 * scale else 2
                out.append({"theta": s % (2 * math.pi), "order": order})
    # merge duplicates from neighbouring nodes
    merged: list[dict] = []
    for c in sorted(out, key=lambda d: d["theta"]):
        if merged and abs(c["theta"] - merged[-1]["theta"]) < 3 * w:
            continue
        merged.append(c)
    if len(merged) > 1 and abs(merged[0]["theta"] + 2 * math.pi - merged[-1]["theta"]) < 3 * w:
        merged.pop()
    return merged


# --- classification ------------------------------------------------------------------

@dataclass
class RangeInterval:
    lo: float
    hi: float
    lo_flag: str = CLOSED
    hi_flag: str = CLOSED

    @property
    def empty(self) -> bool:
        return self.lo > self.hi or (self.lo == self.hi and OPEN in (self.lo_flag, self.hi_flag))

    def as_dict(self) -> dict:
        enc = lambda v: v if math.isfinite(v) else ("inf" if v > 0 else "-inf")
        return {"lo": enc(self.lo), "hi": enc(self.hi), "lo_flag": self.lo_flag,
                "hi_flag": self.hi_flag}


REALS = RangeInterval(-math.inf, math.inf, OPEN, OPEN)


@dataclass
class RangeReport:
    case: int
    I_sp: RangeInterval
    I_ti: RangeInterval
    bound_interval: Optional[RangeInterval]
    sense: Optional[str]          # "lower", "upper", "both" or None
    constant: Optional[float] = None
    contacts: list = field(default_factory=list)
    eigenvalues: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {"case": self.case, "I_sp": self.I_sp.as_dict(), "I_ti": self.I_ti.as_dict(),
                "bound_interval": None if self.bound_interval is None else self.bound_interval.as_dict(),
                "sense": self.sense, "constant": self.constant, "contacts": self.contacts,
                "eigenvalues": self.eigenvalues}


@dataclass
class _Eig:
    value: float
    vector: np.ndarray
    kind: str            # "spacelike", "timelike" or "null"


def pencil_eigen(q: CurvatureQuadric) -> list[_Eig]:
    """Real generalized eigenpairs of ``Q1 x = k Q2 x`` with the causal type of ``x``."""
    w, V = np.linalg.eig(Q2 @ q.Q1)
    out = []
    for k in range(3):
        if abs(w[k].imag) > EIG_AMBIGUOUS * q.scale:
            continue
        v = np.real_if_close(V[:, k], tol=1e6).real
        v = v / np.linalg.norm(v)
        n2 = float(v @ Q2 @ v)
        kind = "null" if abs(n2) < NULL_EIGVEC else ("spacelike" if n2 > 0 else "timelike")
        out.append(_Eig(float(w[k].real), v, kind))
    return out


def _constant_value(q: CurvatureQuadric, rtol: float) -> Optional[float]:
    kappa = float(np.trace(q.Q1 @ Q2)) / 3.0
    if np.abs(q.Q1 - kappa * Q2).max() <= rtol * max(1.0, q.scale):
        return kappa
    return None


def _attained(eigs: list[_Eig], value: float, kind: str, scale: float) -> str:
    best = min((abs(e.value - value) for e in eigs if e.kind == kind), default=math.inf)
    if best <= EIG_MATCH * max(1.0, scale):
        return CLOSED
    if best <= EIG_AMBIGUOUS * max(1.0, scale):
        return UNDETERMINED
    return OPEN


def classify(q: CurvatureQuadric, constant_rtol: float = CONSTANT_RTOL) -> RangeReport:
    """Ranges of spacelike and timelike sectional curvature and the interval of bounds.

    Charts with finite-difference curvature need a looser ``constant_rtol``.
    """
    kappa = _constant_value(q, constant_rtol)
    if kappa is not None:
        pt = RangeInterval(kappa, kappa)
        return RangeReport(1, pt, RangeInterval(kappa, kappa), RangeInterval(kappa, kappa),
                           "both", kappa)
    ns = null_sign(q)
    contacts = null_contacts(q)
    eigs = pencil_eigen(q)
    eig_list = [{"value": e.value, "kind": e.kind} for e in eigs]
    if ns.sign == "mixed":
        return RangeReport(2, REALS, RangeInterval(-math.inf, math.inf, OPEN, OPEN), None, None,
                           contacts=contacts, eigenvalues=eig_list)
    lower = ns.sign == "nonnegative"
    sp = [e.value for e in eigs if e.kind == "spacelike"]
    ti = [e.value for e in eigs if e.kind == "timelike"]
    nul = [e.value for e in eigs if e.kind == "null"]
    tangent = ns.minimum <= ns.tol if lower else ns.maximum >= -ns.tol
    if not tangent:
        # case 3: closed rays separated by [K1, K2]
        if lower:
            K2, K1 = min(sp), max(ti)
            I_sp = RangeInterval(K2, math.inf, CLOSED, OPEN)
            I_ti = RangeInterval(-math.inf, K1, OPEN, CLOSED)
        else:
            K1, K2 = max(sp), min(ti)
            I_sp = RangeInterval(-math.inf, K1, OPEN, CLOSED)
            I_ti = RangeInterval(K2, math.inf, CLOSED, OPEN)
        lo, hi = (K1, K2)
        return RangeReport(3, I_sp, I_ti, RangeInterval(lo, hi), "lower" if lower else "upper",
                           contacts=contacts, eigenvalues=eig_list)
    # case 4: a common endpoint, the eigenvalue carried by the null tangency direction
    theta = ns.argmin if lower else ns.argmax
    x0 = np.array([math.cos(theta), math.sin(theta), 1.0])
    grad1 = q.Q1 @ x0
    grad2 = Q2 @ x0
    Kstar = float(grad1 @ grad2) / float(grad2 @ grad2)
    if nul:
        Kstar = min(nul, key=lambda v: abs(v - Kstar))
    sp_flag = _attained(eigs, Kstar, "spacelike", q.scale)
    ti_flag = _attained(eigs, Kstar, "timelike", q.scale)
    if lower:
        I_sp = RangeInterval(Kstar, math.inf, sp_flag, OPEN)
        I_ti = RangeInterval(-math.inf, Kstar, OPEN, ti_flag)
    else:
        I_sp = RangeInterval(-math.inf, Kstar, OPEN, sp_flag)
        I_ti = RangeInterval(Kstar, math.inf, ti_flag, OPEN)
    return RangeReport(4, I_sp, I_ti, RangeInterval(Kstar, Kstar), "lower" if lower else "upper",
                       contacts=contacts, eigenvalues=eig_list)


# --- null curvature and the width of the bound interval ----------------------------

def null_curvature(q: CurvatureQuadric, x, w) -> float:
    """``R(w, x, w, x) / <w, w>`` for null ``x`` and non-null ``w`` perpendicular to it (frame coordinates)."""
    eta = q.vector_signs
    x = np.asarray(x, dtype=float)
    w = np.asarray(w, dtype=float)
    s = max(float(x @ x), float(w @ w))
    if abs(float(x @ (eta * x))) > 1e-10 * s:
        raise DegenerateInput("x must be null")
    if abs(float(w @ (eta * x))) > 1e-10 * s:
        raise DegenerateInput("w must be perpendicular to x")
    ww = float(w @ (eta * w))
    if abs(ww) < 1e-10 * s:
        raise DegenerateInput("w must be non-null")
    b = bivector(w, x)
    return float(b @ q.Q1 @ b) / ww


def null_curvature_tensor(R, g, x, w) -> float:
    """Null curvature from a coordinate curvature tensor and metric."""
    x = np.asarray(x, dtype=float)
    w = np.asarray(w, dtype=float)
    ww = float(w @ g @ w)
    s = max(float(x @ x), float(w @ w))
    if abs(float(x @ g @ x)) > 1e-10 * s or abs(float(w @ g @ x)) > 1e-10 * s or abs(ww) < 1e-10 * s:
        raise DegenerateInput("need null x and non-null w perpendicular to x")
    return float(rvwv_from_tensor(R, g, w, x)) / ww


@dataclass
class GapReport:
    gap: float
    interval_width: float
    observer: np.ndarray
    theta: float
    eigenvalues: dict

    def as_dict(self) -> dict:
        return {"gap": self.gap, "interval_width": self.interval_width,
                "observer": self.observer.tolist(), "theta": self.theta,
                "eigenvalues": self.eigenvalues}


def _dual_vector(b: np.ndarray, eta: np.ndarray) -> np.ndarray:
    """Vector orthogonal to the plane of bivector ``b``."""
    cov = np.array([b[2], -b[1], b[0]])
    return eta * cov


def bound_gap(q: CurvatureQuadric) -> GapReport:
    """Extreme null curvature over the observer's circle of null vectors.

    For lower bounds ``min K_x = K2 - K1``; for upper bounds ``max K_x = K1 - K2``
    with ``[K1, K2]`` the bound interval.  Anti-Lorentz planes are handled by
    the sign flip ``g -> -g``, which negates ``Q1``.
    """
    rep = classify(q)
    if rep.case == 1 or rep.bound_interval is None or rep.case == 4:
        raise DegenerateInterval("no nontrivial interval of curvature bounds on this plane")
    K1, K2 = rep.bound_interval.lo, rep.bound_interval.hi
    if not K1 < K2:
        raise DegenerateInterval("bound interval is a single point")
    eigs = pencil_eigen(q)
    if len(eigs) < 3 or any(e.kind == "null" for e in eigs):
        raise NotDiagonalizable("curvature operator is not diagonalizable over the reals")
    # in Lorentz frame coordinates the observer is timelike; anti-Lorentz flips the metric
    Q1 = q.Q1 if q.lorentz else -q.Q1
    eta = np.array([-1.0, 1.0, 1.0])
    sp = [e for e in eigs if e.kind == "spacelike"]
    if len(sp) != 1:
        raise NotDiagonalizable("expected exactly one spacelike eigenbivector")
    t = _dual_vector(sp[0].vector, eta)
    t = t / math.sqrt(abs(float(t @ (eta * t))))
    # orthonormal spacelike v1, v2 perpendicular to t
    basis = []
    for cand in np.eye(3):
        v = cand + float(cand @ (eta * t)) * t
        for b in basis:
            v = v - float(v @ (eta * b)) * b
        nv = float(v @ (eta * v))
        if nv > 1e-8:
            basis.append(v / math.sqrt(nv))
        if len(basis) == 2:
            break
    v1, v2 = basis
    qq = CurvatureQuadric(Q1, True)

    def kx(th):
        x = t + math.cos(th) * v1 + math.sin(th) * v2
        w = -math.sin(th) * v1 + math.cos(th) * v2
        return null_curvature(qq, x, w)

    lower = rep.sense == "lower"
    if not q.lorentz:
        lower = not lower
    th = np.linspace(0.0, 2 * math.pi, GRID, endpoint=False)
    vals = np.array([kx(s) for s in th])
    sgn = 1.0 if lower else -1.0
    i = int(np.argmin(sgn * vals))
    s, v = _refine(lambda u: sgn * kx(u), float(th[i]), 2 * math.pi / GRID)
    gap = sgn * v
    if not q.lorentz:
        gap = -gap
    return GapReport(gap, K2 - K1, t, s % (2 * math.pi),
                     {"spacelike": [e.value for e in eigs if e.kind == "spacelike"],
                      "timelike": [e.value for e in eigs if e.kind == "timelike"]})


# --- from a chart -------------------------------------------------------------------

def plane_frame(g: np.ndarray, basis) -> tuple[np.ndarray, bool]:
    """Orthonormal frame ``(e1, e2, e3)`` of ``span(basis)``, ``e1`` of odd sign."""
    B = np.asarray(basis, dtype=float)
    if B.shape[0] != 3:
        raise DegenerateInput("need three basis vectors")
    G = B @ g @ B.T
    if abs(np.linalg.det(G)) < 1e-12 * max(1.0, np.abs(G).max()) ** 3:
        raise DegenerateInput("basis spans a degenerate subspace")
    E = orthonormal_frame(G)               # columns, pluses first
    signs = np.sign(np.einsum("ia,ij,ja->a", E, G, E))
    neg = int(np.sum(signs < 0))
    if neg not in (1, 2):
        raise DegenerateInput("the 3-plane is definite, not Lorentz or anti-Lorentz")
    lorentz = neg == 1
    odd = int(np.nonzero(signs < 0)[0][0]) if lorentz else int(np.nonzero(signs > 0)[0][0])
    order = [odd] + [k for k in range(3) if k != odd]
    frame = (E[:, order].T @ B)            # rows are chart vectors
    return frame, lorentz


def quadric_from_metric(m: MetricSpec, x, basis) -> CurvatureQuadric:
    """``Q1`` from six curvature evaluations on decomposable bivectors (polarization)."""
    x = np.asarray(x, dtype=float)
    m.require_inside(x)
    R, g = riemann(m, x)
    frame, lorentz = plane_frame(g, basis)
    e1, e2, e3 = frame
    val = lambda v, w: float(rvwv_from_tensor(R, g, v, w))
    d = [val(e1, e2), val(e1, e3), val(e2, e3)]
    # e1^e2 + e1^e3 = e1^(e2+e3); e1^e2 + e2^e3 = (e1-e3)^e2; e1^e3 + e2^e3 = (e1+e2)^e3
    s12 = val(e1, e2 + e3)
    s13 = val(e1 - e3, e2)
    s23 = val(e1 + e2, e3)
    Q = np.diag(d)
    Q[0, 1] = Q[1, 0] = 0.5 * (s12 - d[0] - d[1])
    Q[0, 2] = Q[2, 0] = 0.5 * (s13 - d[0] - d[2])
    Q[1, 2] = Q[2, 1] = 0.5 * (s23 - d[1] - d[2])
    return CurvatureQuadric(Q, lorentz)
