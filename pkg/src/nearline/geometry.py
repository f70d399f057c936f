"""Point-to-line algebra: interpolation coefficient, residual, squared distance.

A line through two points ``a`` and ``b`` is parameterized as
``line(t) = a * t + b * (1 - t)``, so ``t = 1`` lands on ``a`` and ``t = 0``
on ``b``.  The parameter is unconstrained: these are infinite lines, not
segments.  All distances are squared Euclidean distances; no square roots
are taken anywhere.
"""

from __future__ import annotations

import numpy as np

# A line is degenerate when its two defining points (nearly) coincide
# relative to their magnitude; the closed-form coefficient divides by the
# squared gap between them.
DEGENERACY_RTOL = 1e-12


class DegenerateLineError(ValueError):
    """Raised when the two points defining a line (nearly) coincide."""


def _as_vector(v, name: str) -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be a 1-D vector, got shape {arr.shape}")
    return arr


def _check_dims(point: np.ndarray, a: np.ndarray, b: np.ndarray) -> None:
    if not (point.shape == a.shape == b.shape):
        raise ValueError(
            f"dimension mismatch: point {point.shape}, a {a.shape}, b {b.shape}"
        )


def is_degenerate_line(a, b) -> bool:
    """True when the squared gap between ``a`` and ``b`` falls below the
    degeneracy threshold ``DEGENERACY_RTOL * max(1, |a|^2, |b|^2)``."""
    a = _as_vector(a, "a")
    b = _as_vector(b, "b")
    gap = a - b
    gap_sq = float(gap @ gap)
    scale = max(1.0, float(a @ a), float(b @ b))
    return gap_sq < DEGENERACY_RTOL * scale


def line_alpha(point, a, b) -> float:
    """Coefficient of the point on the line through ``a`` and ``b`` closest
    to ``point``.

    Setting the derivative of ``|point - (a*t + b*(1-t))|^2`` to zero gives
    the closed form ``t = <point - b, a - b> / |a - b|^2``, the unique
    minimizer of the (convex) squared distance.  The result may fall outside
    [0, 1]; it is deliberately not clamped.

    Raises DegenerateLineError when ``a`` and ``b`` (nearly) coincide;
    callers are expected to skip such lines.
    """
    point = _as_vector(point, "point")
    a = _as_vector(a, "a")
    b = _as_vector(b, "b")
    _check_dims(point, a, b)
    direction = a - b
    denom = float(direction @ direction)
    scale = max(1.0, float(a @ a), float(b @ b))
    if denom < DEGENERACY_RTOL * scale:
        raise DegenerateLineError(
            f"line through (nearly) coincident points: |a - b|^2 = {denom:.3e}"
        )
    return float((point - b) @ direction) / denom


def line_residual(point, a, b, alpha: float) -> np.ndarray:
    """Residual vector ``point - b - alpha * (a - b)`` for a given coefficient.

    The coefficient is typically computed in another (projected) space; the
    residual lives in the space of the vectors passed here.  For a projection
    matrix W with ``y = W^T x``, ``|W^T residual|^2`` equals the projected
    point-to-line squared distance when ``alpha`` came from the projected
    points.
    """
    point = _as_vector(point, "point")
    a = _as_vector(a, "a")
    b = _as_vector(b, "b")
    _check_dims(point, a, b)
    alpha = float(alpha)
    if not np.isfinite(alpha):
        raise ValueError(f"alpha must be finite, got {alpha}")
    return point - b - alpha * (a - b)


def point_line_sqdist(point, a, b) -> float:
    """Squared distance from ``point`` to the infinite line through ``a``
    and ``b``.  Never exceeds the squared distance to either endpoint.
    """
    alpha = line_alpha(point, a, b)
    r = line_residual(point, a, b, alpha)
    return float(r @ r)
