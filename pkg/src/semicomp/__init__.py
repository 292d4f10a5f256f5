"""Triangle comparison and curvature bounds for semi-Riemannian manifolds."""

from .conics import CurvatureQuadric, bound_gap, classify, null_sign, quadric_from_metric
from .errors import GeometryError, NumericalFailure, SemicompError
from .model_spaces import Kind, ModelSpace
from .spaces import Space, get_space, load_space
from .triangles import ModelTriangle, realize

__version__ = "0.1.0"

__all__ = [
    "CurvatureQuadric", "GeometryError", "Kind", "ModelSpace", "ModelTriangle",
    "NumericalFailure", "SemicompError", "Space", "bound_gap", "classify", "get_space",
    "load_space", "null_sign", "quadric_from_metric", "realize",
]
