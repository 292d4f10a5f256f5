"""Triangle comparison on charts against model-space triangles.

Margins are signed so that a nonnegative value agrees with the asserted bound:
for ``R >= K`` manifold signed distances are at least the model ones and
manifold (nonnormalized) angles are at most the model ones.  The primary
distance margin compares ``h_K`` of the energies, which is smooth across null
separations; the signed-length margin is reported alongside it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ..errors import GeometryError, NumericalFailure
from ..model_spaces import energy_between, h_of_energy, model_exp, signed_length
from ..triangles import OPPOSITE, classify, realize
from .curvature import _sense_sign
from .geodesics import geodesic_bvp_batch, geodesic_ivp_batch
from .metric import MetricSpec

DEFAULT_LAMBDAS = (0.1, 0.3, 0.5, 0.7, 0.9)
DEFAULT_PAIR_GRID = (0.25, 0.5, 0.75)
SIDES = ("pq", "qr", "rp")


@dataclass
class ComparisonReport:
    K: float
    sense: str
    triple: tuple
    triple_class: str
    vertex_margins: np.ndarray
    vertex_length_margins: np.ndarray
    pair_margins: np.ndarray
    angle_margins: np.ndarray
    lambdas: tuple
    pair_grid: tuple
    tol: float = 1e-8
    witness: Optional[dict] = None
    labels: dict = field(default_factory=dict, repr=False)

    @property
    def min_margin(self) -> float:
        """Smallest ``h`` margin over vertex-to-side and all-pairs samples."""
        vals = [self.vertex_margins.min()]
        if self.pair_margins.size:
            vals.append(self.pair_margins.min())
        return float(min(vals))

    @property
    def min_length_margin(self) -> float:
        return float(self.vertex_length_margins.min())

    @property
    def max_abs_margin(self) -> float:
        parts = [self.vertex_margins.ravel(), self.pair_margins.ravel()]
        return float(np.max(np.abs(np.concatenate(parts))))

    def verdicts(self) -> dict:
        t = self.tol
        return {
            "vertex_to_side": bool(self.vertex_margins.min() >= -t),
            "all_pairs": bool(self.pair_margins.size == 0 or self.pair_margins.min() >= -t),
            "angles": bool(self.angle_margins.min() >= -t),
        }

    @property
    def holds(self) -> bool:
        return all(self.verdicts().values())

    def as_dict(self) -> dict:
        return {
            "K": self.K, "sense": self.sense, "triple": list(self.triple),
            "triple_class": self.triple_class, "holds": self.holds,
            "verdicts": self.verdicts(), "min_margin": self.min_margin,
            "min_length_margin": self.min_length_margin,
            "min_angle_margin": float(self.angle_margins.min()),
            "lambdas": list(self.lambdas),
            "vertex_margins": self.vertex_margins.tolist(),
            "pair_margins": self.pair_margins.tolist(),
            "angle_margins": self.angle_margins.tolist(),
            "witness": self.witness,
        }


@dataclass
class _Plan:
    """Per-triangle bookkeeping of the BVPs requested from one batch."""

    sides: dict
    model: object
    vertex_jobs: list
    pair_jobs: list


def _side_paths(m: MetricSpec, P, Q, R) -> list[dict]:
    n = len(P)
    starts = np.concatenate([P, Q, R])
    ends = np.concatenate([Q, R, P])
    paths = geodesic_bvp_batch(m, starts, ends)
    return [{"pq": paths[i], "qr": paths[n + i], "rp": paths[2 * n + i]} for i in range(n)]


def _model_point(tri, side: str, lam: float):
    g = tri.side(side)
    return model_exp(g.start, g.velocity, lam)


def _model_h(a, b) -> float:
    d = b.coords - a.coords
    return 0.5 * a.space.inner(d, d)


def _angle(m: MetricSpec, x, a, b) -> float:
    return float(m.inner(x, a, b))


def _manifold_angles(m: MetricSpec, sides: dict) -> tuple[float, float, float]:
    """``(angle at q, angle at p, angle at r)`` from the side velocities."""
    pq, qr, rp = sides["pq"], sides["qr"], sides["rp"]
    at_q = _angle(m, qr.start, -pq.end_velocity, qr.velocity)
    at_p = _angle(m, pq.start, pq.velocity, -rp.end_velocity)
    at_r = _angle(m, rp.start, -qr.end_velocity, rp.velocity)
    return at_q, at_p, at_r


def triangle_compare_batch(m: MetricSpec, P, Q, R, K: float, sense: str = "ge",
                           lambdas: Sequence[float] = DEFAULT_LAMBDAS,
                           pair_grid: Sequence[float] = DEFAULT_PAIR_GRID,
                           tol: float = 1e-8,
                           degenerate_preference: str = "definite") -> list[ComparisonReport]:
    """Compare many triangles at once; all boundary-value problems share one batch."""
    P, Q, R = (np.atleast_2d(np.asarray(a, dtype=float)) for a in (P, Q, R))
    sgn = _sense_sign(sense)
    sense_name = "ge" if sgn > 0 else "le"
    side_sets = _side_paths(m, P, Q, R)
    plans = []
    starts, ends = [], []
    for sides in side_sets:
        triple = tuple(sides[s].signed_length for s in SIDES)
        tri = realize(triple, K, degenerate_preference)
        verts = {"p": sides["pq"].start, "q": sides["qr"].start, "r": sides["rp"].start}
        model_verts = {"p": tri.p, "q": tri.q, "r": tri.r}
        vjobs = []
        for v in "pqr":
            side = OPPOSITE[v]
            for lam in lambdas:
                starts.append(verts[v])
                ends.append(sides[side](lam))
                vjobs.append((v, lam, model_verts[v], _model_point(tri, side, lam)))
        pjobs = []
        for i, s1 in enumerate(SIDES):
            for s2 in SIDES[i + 1:]:
                for a in pair_grid:
                    for b in pair_grid:
                        starts.append(sides[s1](a))
                        ends.append(sides[s2](b))
                        pjobs.append((s1, a, s2, b, _model_point(tri, s1, a),
                                      _model_point(tri, s2, b)))
        plans.append(_Plan(sides, tri, vjobs, pjobs))
    paths = geodesic_bvp_batch(m, np.array(starts), np.array(ends)) if starts else []
    reports = []
    k = 0
    for plan in plans:
        tri = plan.model
        vm, vl, labels_v = [], [], []
        for v, lam, a, b in plan.vertex_jobs:
            E = paths[k].energy
            k += 1
            vm.append(sgn * (h_of_energy(E, K) - _model_h(a, b)))
            vl.append(sgn * (signed_length(E) - signed_length(energy_between(a, b))))
            labels_v.append((v, lam))
        pm, labels_p = [], []
        for s1, a, s2, b, x, y in plan.pair_jobs:
            E = paths[k].energy
            k += 1
            pm.append(sgn * (h_of_energy(E, K) - _model_h(x, y)))
            labels_p.append((s1, a, s2, b))
        man = _manifold_angles(m, plan.sides)
        mod = (tri.included, tri.shoulder_p, tri.shoulder_r)
        am = np.array([sgn * (mo - ma) for mo, ma in zip(mod, man)])
        rep = ComparisonReport(
            float(K), sense_name, tuple(tri.triple), classify(tri.triple).value,
            np.array(vm).reshape(3, len(lambdas)), np.array(vl).reshape(3, len(lambdas)),
            np.array(pm), am, tuple(lambdas), tuple(pair_grid), tol,
            labels={"vertex": labels_v, "pairs": labels_p, "angles": ["q", "p", "r"]})
        if not rep.holds:
            rep.witness = _witness(rep, plan)
        reports.append(rep)
    return reports


def _witness(rep: ComparisonReport, plan: _Plan) -> dict:
    flat = rep.vertex_margins.ravel()
    i = int(np.argmin(flat))
    v, lam = rep.labels["vertex"][i]
    out = {"p": plan.sides["pq"].start.tolist(), "q": plan.sides["qr"].start.tolist(),
           "r": plan.sides["rp"].start.tolist(), "triple": list(rep.triple),
           "vertex": v, "lambda": lam, "margin": float(flat[i]),
           "min_angle_margin": float(rep.angle_margins.min())}
    if rep.pair_margins.size:
        out["min_pair_margin"] = float(rep.pair_margins.min())
    return out


def triangle_compare(m: MetricSpec, p, q, r, K: float, lambdas: Sequence[float] = DEFAULT_LAMBDAS,
                     sense: str = "ge", pair_grid: Sequence[float] = DEFAULT_PAIR_GRID,
                     tol: float = 1e-8, degenerate_preference: str = "definite") -> ComparisonReport:
    return triangle_compare_batch(m, [p], [q], [r], K, sense, lambdas, pair_grid, tol,
                                  degenerate_preference)[0]


def sample_triangles(m: MetricSpec, rng: np.random.Generator, count: int, size: float,
                     shrink: float = 0.6) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vertices ``c + size * N(0, I)`` around centers drawn from the shrunk chart box."""
    c = m.sample_points(rng, count, shrink)
    P, Q, R = (c + size * rng.standard_normal(c.shape) for _ in range(3))
    return P, Q, R


@dataclass
class SearchResult:
    found: bool
    checked: int
    skipped: int
    worst_margin: float
    witness: Optional[dict]
    reports: list = field(default_factory=list, repr=False)

    def as_dict(self) -> dict:
        return {"found": self.found, "checked": self.checked, "skipped": self.skipped,
                "worst_margin": self.worst_margin, "witness": self.witness}


def _compare_isolated(m, P, Q, R, idx, K, sense, lambdas, pair_grid, tol, out, failed):
    """Batch compare ``idx``; on a failure bisect so one bad triangle costs ``O(log n)`` batches."""
    try:
        reps = triangle_compare_batch(m, P[idx], Q[idx], R[idx], K, sense, lambdas, pair_grid, tol)
    except (GeometryError, NumericalFailure):
        if len(idx) == 1:
            failed.append(int(idx[0]))
            return
        mid = len(idx) // 2
        for part in (idx[:mid], idx[mid:]):
            _compare_isolated(m, P, Q, R, part, K, sense, lambdas, pair_grid, tol, out, failed)
        return
    out.extend(zip((int(i) for i in idx), reps))


def compare_sampled(m: MetricSpec, K: float, sense: str = "ge", samples: int = 50,
                    seed: int = 0, size: float = 0.2, chunk: int = 50,
                    stop_on_violation: bool = False, max_draws: Optional[int] = None,
                    lambdas: Sequence[float] = DEFAULT_LAMBDAS,
                    pair_grid: Sequence[float] = DEFAULT_PAIR_GRID,
                    tol: float = 1e-8) -> SearchResult:
    """Compare seeded random triangles until ``samples`` of them have been checked.

    Triangles whose realization or boundary-value problems fail (size bounds,
    curves leaving the chart, non-normal configurations) are skipped and
    counted; at most ``max_draws`` (default ``4 * samples``) are drawn.
    """
    rng = np.random.default_rng(seed)
    max_draws = 4 * samples if max_draws is None else max_draws
    reports, skipped, drawn = [], 0, 0
    while len(reports) < samples and drawn < max_draws:
        k = min(chunk, samples - len(reports), max_draws - drawn)
        P, Q, R = sample_triangles(m, rng, k, size)
        drawn += k
        got, failed = [], []
        _compare_isolated(m, P, Q, R, np.arange(k), K, sense, lambdas, pair_grid, tol,
                          got, failed)
        skipped += len(failed)
        batch = [r for _, r in sorted(got, key=lambda x: x[0])]
        reports.extend(batch)
        if stop_on_violation and any(not r.holds for r in batch):
            break
    bad = [r for r in reports if not r.holds]
    worst = min((r.min_margin for r in reports), default=float("nan"))
    witness = min(bad, key=lambda r: r.min_margin).witness if bad else None
    return SearchResult(bool(bad), len(reports), skipped, worst, witness, reports)


def first_variation_check(m: MetricSpec, q, p, r, step: float = 1e-2) -> tuple[float, float]:
    """``d/ds E_q(gamma_pr(s))`` at ``s = 0`` by fourth-order differences, and ``-2 angle qpr``.

    ``gamma_pr`` is the ``[0,1]`` geodesic from ``p`` to ``r``, extended
    backwards by integrating from ``p``.
    """
    q, p, r = (np.asarray(a, dtype=float) for a in (q, p, r))
    pr, pq = geodesic_bvp_batch(m, np.array([p, p]), np.array([r, q]))
    ks = np.array([-2.0, -1.0, 1.0, 2.0])
    ends = [g.end for g in geodesic_ivp_batch(m, np.repeat(p[None], 4, axis=0),
                                              ks[:, None] * step * pr.velocity)]
    E = np.array([g.energy for g in geodesic_bvp_batch(m, np.repeat(q[None], 4, axis=0),
                                                        np.array(ends))])
    fd = (E[0] - 8 * E[1] + 8 * E[2] - E[3]) / (12 * step)
    angle = _angle(m, p, pq.velocity, pr.velocity)
    return float(fd), -2.0 * angle


__all__ = ["ComparisonReport", "triangle_compare", "triangle_compare_batch", "compare_sampled",
           "sample_triangles", "first_variation_check", "SearchResult"]
