"""Built-in spacetime charts and JSON metric ingestion.

Every builder returns a :class:`Space`: the chart plus what is known about it
(constant curvature, warped-product structure, a triangle size that keeps
sampled triangles inside a normal neighborhood).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .errors import GeometryError
from .kernel.metric import MetricSpec, constant_metric
from .warped import (
    FriedmannModel,
    WarpSpec,
    WarpingFunction,
    constant_warp,
    cosh_warp,
    exp_warp,
    linear_warp,
    polynomial_warp,
    power_warp,
    sin_warp,
    tabulated_warp,
    wp_metric,
)


@dataclass(frozen=True, eq=False)
class Space:
    name: str
    metric: MetricSpec
    curvature: Optional[float] = None
    warp: Optional[WarpSpec] = None
    triangle_size: float = 0.15
    params: Optional[dict] = None

    def as_dict(self) -> dict:
        return {"name": self.name, "dim": self.metric.dim, "index": self.metric.index,
                "constant_curvature": self.curvature, "params": self.params or {},
                "lower": self.metric.lower.tolist(), "upper": self.metric.upper.tolist()}


def _warped(name: str, spec: WarpSpec, curvature=None, size=0.15, params=None) -> Space:
    m = wp_metric(spec)
    return Space(name, MetricSpec(m.dim, m.index, m.metric, m.lower, m.upper, m.jet_fn, name,
                                  m.fd_step, dict(m.params)),
                 curvature, spec, size, params or {})


def minkowski(dim: int = 4, half_width: float = 10.0) -> Space:
    """Flat chart ``-dt^2 + dx^2``; the time coordinate comes first."""
    m = constant_metric([-1.0] + [1.0] * (dim - 1), "minkowski", half_width)
    return Space("minkowski", m, 0.0, None, 0.5, {"dim": dim})


def de_sitter(t_range=(-1.5, 1.5), fiber_radius: float = 1.0) -> Space:
    """``-dt^2 + cosh^2 t dsigma^2`` with a round unit 3-sphere fiber: curvature 1, dimension 4."""
    spec = WarpSpec(tuple(t_range), 1.0, 3, cosh_warp(1.0), fiber_radius, "de_sitter")
    return _warped("de_sitter", spec, 1.0, 0.2, {"t_range": list(t_range)})


def de_sitter_flat(t_range=(-1.0, 1.0), fiber_radius: float = 2.0) -> Space:
    """``-dt^2 + e^{2t} dx^2``: the flat-slicing chart of de Sitter space."""
    spec = WarpSpec(tuple(t_range), 0.0, 3, exp_warp(1.0), fiber_radius, "de_sitter_flat")
    return _warped("de_sitter_flat", spec, 1.0, 0.2, {"t_range": list(t_range)})


def anti_de_sitter_cone(t_range=(0.3, math.pi - 0.3), fiber_radius: float = 1.0) -> Space:
    """``-dt^2 + sin^2 t dH^2`` with a hyperbolic fiber: constant curvature -1."""
    spec = WarpSpec(tuple(t_range), -1.0, 3, sin_warp(1.0), fiber_radius, "anti_de_sitter_cone")
    return _warped("anti_de_sitter_cone", spec, -1.0, 0.15, {"t_range": list(t_range)})


def friedmann_space(C: int = 0, E: float = 1.0, t_range=(0.5, 3.0),
                    fiber_radius: float = 1.0) -> Space:
    """Pressureless Friedmann model with fiber curvature ``C`` on a time window."""
    model = FriedmannModel(int(C), float(E))
    if C == 1:
        t_end = float(model.t_f(2 * math.pi)[0])
        if t_range[1] >= t_end:
            raise GeometryError(f"t range must end before the big crunch t = {t_end:.6g}")
    spec = WarpSpec(tuple(t_range), float(C), 3, model.warp(), fiber_radius, "friedmann")
    return _warped("friedmann", spec, None, 0.1,
                   {"C": int(C), "E": float(E), "t_range": list(t_range)})


def rw_space(ts, fs, C: float = 0.0, t_range=None, fiber_radius: float = 1.0) -> Space:
    """Robertson-Walker chart from a table of warping-function samples."""
    w = tabulated_warp(ts, fs)
    ts = np.asarray(ts, dtype=float)
    rng = tuple(t_range) if t_range is not None else (float(ts[1]), float(ts[-2]))
    spec = WarpSpec(rng, float(C), 3, w, fiber_radius, "rw")
    return _warped("rw", spec, None, 0.1, {"C": C, "t_range": list(rng)})


BUILTINS: dict[str, Callable[..., Space]] = {
    "minkowski": minkowski,
    "de_sitter": de_sitter,
    "de_sitter_flat": de_sitter_flat,
    "friedmann": friedmann_space,
    "rw": rw_space,
    "anti_de_sitter_cone": anti_de_sitter_cone,
}


def get_space(name: str, **params) -> Space:
    try:
        builder = BUILTINS[name]
    except KeyError:
        raise GeometryError(f"unknown space {name!r}; choose from {sorted(BUILTINS)}") from None
    return builder(**params)


# --- JSON documents -----------------------------------------------------------

WARPS: dict[str, Callable[..., WarpingFunction]] = {
    "constant": constant_warp,
    "cosh": cosh_warp,
    "exp": exp_warp,
    "sin": sin_warp,
    "power": power_warp,
    "linear": linear_warp,
    "polynomial": polynomial_warp,
    "tabulated": lambda t, f: tabulated_warp(t, f),
    "friedmann": lambda C, E=1.0: FriedmannModel(int(C), float(E)).warp(),
}


def warp_from_dict(doc: dict) -> WarpingFunction:
    doc = dict(doc)
    name = doc.pop("name", None)
    if name not in WARPS:
        raise GeometryError(f"unknown warping function {name!r}; choose from {sorted(WARPS)}")
    return WARPS[name](**doc)


def tabulated_metric(axes, values, index: Optional[int] = None, name: str = "tabulated") -> MetricSpec:
    """Metric from samples on a rectilinear grid, interpolated componentwise by cubic splines."""
    axes = [np.asarray(a, dtype=float) for a in axes]
    vals = np.asarray(values, dtype=float)
    n = len(axes)
    if vals.shape != tuple(a.size for a in axes) + (n, n):
        raise GeometryError("tabulated values must have shape (*grid, dim, dim)")
    vals = 0.5 * (vals + np.swapaxes(vals, -1, -2))
    interp = RegularGridInterpolator(axes, vals, method="cubic")
    if index is None:
        index = int(np.sum(np.linalg.eigvalsh(vals.reshape(-1, n, n)[0]) < 0))

    def metric(x):
        x = np.asarray(x, dtype=float)
        return interp(x.reshape(-1, n)).reshape(x.shape[:-1] + (n, n))

    # keep away from the outermost cells where the spline is least accurate
    lo = np.array([a[1] for a in axes])
    hi = np.array([a[-2] for a in axes])
    return MetricSpec(n, index, metric, lo, hi, None, name, params={"family": "tabulated"})


def space_from_dict(doc: dict) -> Space:
    """Build a space from ``{"family": "flat" | "warped" | "tabulated" | "builtin", ...}``."""
    fam = doc.get("family")
    if fam == "builtin":
        return get_space(doc["name"], **doc.get("params", {}))
    if fam == "flat":
        diag = doc["diag"]
        m = constant_metric(diag, doc.get("name", "flat"), float(doc.get("half_width", 10.0)))
        space = Space(m.name, m, 0.0, None, float(doc.get("triangle_size", 0.5)), {"diag": diag})
    elif fam == "warped":
        spec = WarpSpec(tuple(doc["base"]), float(doc["fiber_C"]), int(doc.get("fiber_dim", 3)),
                        warp_from_dict(doc["warp"]), float(doc.get("fiber_radius", 1.0)),
                        doc.get("name", "warped"))
        space = _warped(spec.name, spec, doc.get("constant_curvature"),
                        float(doc.get("triangle_size", 0.15)), {"warp": doc["warp"]})
    elif fam == "tabulated":
        m = tabulated_metric(doc["axes"], doc["values"], doc.get("index"),
                             doc.get("name", "tabulated"))
        space = Space(m.name, m, None, None, float(doc.get("triangle_size", 0.1)), {})
    else:
        raise GeometryError(f"unknown metric family {fam!r}")
    m = space.metric
    if "dim" in doc and int(doc["dim"]) != m.dim:
        raise GeometryError(f"document says dim {doc['dim']} but the metric has dim {m.dim}")
    if "index" in doc and int(doc["index"]) != m.index:
        raise GeometryError(f"document says index {doc['index']} but the metric has index {m.index}")
    return space


def load_space(path) -> Space:
    return space_from_dict(json.loads(Path(path).read_text()))
