"""Entire functions of ``x = K * E * t**2`` used by all curvature-dependent formulas.

Every trigonometric expression of the form ``cos(sqrt(K E))`` is written as a
function of the product ``x = K E``.  These functions are entire in ``x``, so
the cases ``K = 0``, ``E = 0`` and ``K E < 0`` (where cosine turns into
hyperbolic cosine) are all handled by one code path.

Near ``x = 0`` the power series is summed directly; away from it the closed
forms are used, which are accurate there and cheaper.
"""

from __future__ import annotations

import math

import numpy as np

_SERIES_RADIUS = 1.0
_NTERMS = 14  # |x| < 1: the 14th term is below 1e-17 relative


def _pack(c: list[float]) -> tuple[np.ndarray, tuple[float, ...]]:
    # array form for the vectorized path, reversed tuple for scalar Horner
    return np.array(c), tuple(c[::-1])


def _coeffs(offset: int):
    # (-1)^n / (2n + offset)!
    return _pack([(-1.0) ** n / math.factorial(2 * n + offset) for n in range(_NTERMS)])


_C_COS = _coeffs(0)      # cos sqrt(x)
_C_SIN = _coeffs(1)      # sin sqrt(x) / sqrt(x)
_C_VERS = _coeffs(2)     # (1 - cos sqrt(x)) / x
_C_DSIN = _pack([(-1.0) ** (n + 1) * (n + 1) / math.factorial(2 * n + 3)
                 for n in range(_NTERMS)])  # d/dx of sin sqrt(x)/sqrt(x)


def _horner(coeffs: np.ndarray, x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x)
    for c in coeffs[::-1]:
        out = out * x + c
    return out


_SCALAR_TYPES = (float, int, np.floating, np.integer)


def _horner_scalar(coeffs, x: float) -> float:
    out = 0.0
    for c in coeffs:
        out = out * x + c
    return out


def _dispatch(x, coeffs, closed_pos, closed_neg, scalar_pos=None, scalar_neg=None):
    if isinstance(x, _SCALAR_TYPES) and scalar_pos is not None:
        x = float(x)
        if abs(x) < _SERIES_RADIUS:
            return _horner_scalar(coeffs[1], x)
        return scalar_pos(math.sqrt(x)) if x > 0 else scalar_neg(math.sqrt(-x))
    coeffs = coeffs[0]
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    out = np.empty_like(x)
    small = np.abs(x) < _SERIES_RADIUS
    pos = (~small) & (x > 0)
    neg = (~small) & (x < 0)
    out[small] = _horner(coeffs, x[small])
    if pos.any():
        out[pos] = closed_pos(np.sqrt(x[pos]))
    if neg.any():
        out[neg] = closed_neg(np.sqrt(-x[neg]))
    return float(out[0]) if scalar else out


def cosc(x):
    """``cos(sqrt(x))``, continued to ``cosh(sqrt(-x))`` for ``x < 0``."""
    return _dispatch(x, _C_COS, np.cos, np.cosh, math.cos, math.cosh)


def sinc(x):
    """``sin(sqrt(x)) / sqrt(x)``; equals 1 at the origin."""
    return _dispatch(x, _C_SIN, lambda r: np.sin(r) / r, lambda s: np.sinh(s) / s,
                     lambda r: math.sin(r) / r, lambda s: math.sinh(s) / s)


def versc(x):
    """``(1 - cos(sqrt(x))) / x``; equals 1/2 at the origin."""
    return _dispatch(
        x, _C_VERS,
        lambda r: 2.0 * np.sin(0.5 * r) ** 2 / r ** 2,
        lambda s: 2.0 * np.sinh(0.5 * s) ** 2 / s ** 2,
        lambda r: 2.0 * math.sin(0.5 * r) ** 2 / r ** 2,
        lambda s: 2.0 * math.sinh(0.5 * s) ** 2 / s ** 2,
    )


def dsinc(x):
    """Derivative of :func:`sinc` with respect to ``x``; ``-1/6`` at the origin."""
    return _dispatch(
        x, _C_DSIN,
        lambda r: (r * np.cos(r) - np.sin(r)) / (2.0 * r ** 3),
        lambda s: -(s * np.cosh(s) - np.sinh(s)) / (2.0 * s ** 3),
        lambda r: (r * math.cos(r) - math.sin(r)) / (2.0 * r ** 3),
        lambda s: -(s * math.cosh(s) - math.sinh(s)) / (2.0 * s ** 3),
    )


def inverse_cosc_from_versine(z: float) -> float:
    """Solve ``1 - cos(sqrt(x)) = z`` for ``x`` on the monotone principal branch.

    The branch is ``x in (-inf, pi**2)``, on which ``1 - cos sqrt(x)`` increases
    from ``-inf`` to 2.  Passing the versine ``z`` instead of the cosine keeps
    full relative precision for small ``x``.
    """
    if z >= 2.0:
        raise ValueError(f"versine {z!r} outside the principal branch (< 2)")
    if z >= 0.0:
        return 4.0 * math.asin(math.sqrt(0.5 * z)) ** 2
    return -4.0 * math.asinh(math.sqrt(-0.5 * z)) ** 2
