"""Numerical differential geometry on coordinate charts."""

from .comparison import (
    ComparisonReport,
    SearchResult,
    compare_sampled,
    first_variation_check,
    triangle_compare,
    triangle_compare_batch,
)
from .curvature import (
    BoundReport,
    check_bound,
    curvature_rvwv,
    ricci,
    sectional_curvature,
)
from .geodesics import GeodesicPath, geodesic_bvp, geodesic_bvp_batch, geodesic_ivp
from .jacobi import JacobiSolution, conjugate_scan, jacobi_ivp, jacobi_taylor_check
from .metric import MetricSpec, christoffel, constant_metric, riemann
from .shape import (
    RadialShape,
    ShapeOperator,
    modified_shape_operator,
    radial_shape,
    riccati_compare,
    riccati_residual,
)

__all__ = [
    "BoundReport", "ComparisonReport", "GeodesicPath", "JacobiSolution", "MetricSpec",
    "RadialShape", "SearchResult", "ShapeOperator", "check_bound", "christoffel",
    "compare_sampled", "conjugate_scan", "constant_metric", "curvature_rvwv",
    "first_variation_check", "geodesic_bvp", "geodesic_bvp_batch", "geodesic_ivp",
    "jacobi_ivp", "jacobi_taylor_check", "modified_shape_operator", "radial_shape",
    "ricci", "riccati_compare", "riccati_residual", "riemann", "sectional_curvature",
    "triangle_compare", "triangle_compare_batch",
]
