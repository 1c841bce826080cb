"""Exact smallest enclosing balls in R^2 / R^3 (Welzl's incremental scheme).

Deterministic: points are processed in the given order, no shuffling, so
the same input yields bit-identical output. Intended for the small point
sets of simplex tests (<= d+2 points) but correct for any input size.
"""

from __future__ import annotations

import numpy as np

__all__ = ["ball_through", "smallest_enclosing_ball", "enclosing_radius"]

_EPS = 1e-12


def ball_through(points: np.ndarray) -> tuple[np.ndarray, float] | None:
    """Smallest ball with all given points on its boundary, or None if degenerate.

    For an affinely independent support set this is the circumball of the
    set within its affine hull.
    """
    pts = np.asarray(points, dtype=float)
    if pts.shape[0] == 0:
        return None
    if pts.shape[0] == 1:
        return pts[0].copy(), 0.0
    p0 = pts[0]
    u = pts[1:] - p0
    gram = u @ u.T
    rhs = 0.5 * np.einsum("ij,ij->i", u, u)
    try:
        lam = np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError:
        return None
    center = p0 + lam @ u
    r = float(np.linalg.norm(pts[0] - center))
    # reject affinely-degenerate supports: the ball must pass through all points
    d = np.linalg.norm(pts - center, axis=1)
    if np.any(np.abs(d - r) > 1e-7 * max(1.0, r)):
        return None
    return center, r


def _contains(ball: tuple[np.ndarray, float], p: np.ndarray) -> bool:
    c, r = ball
    return float(np.linalg.norm(p - c)) <= r * (1.0 + 1e-12) + _EPS


def _welzl(pts: list, boundary: list, d: int) -> tuple[np.ndarray, float]:
    if not pts or len(boundary) == d + 1:
        ball = ball_through(np.asarray(boundary)) if boundary else None
        if ball is None:
            if len(boundary) <= 1:
                return (np.asarray(boundary[0], dtype=float), 0.0) if boundary else (np.zeros(d), 0.0)
            # degenerate boundary: fall back to the two farthest boundary points
            b = np.asarray(boundary, dtype=float)
            dm = np.linalg.norm(b[:, None, :] - b[None, :, :], axis=2)
            i, j = np.unravel_index(int(np.argmax(dm)), dm.shape)
            return (b[i] + b[j]) / 2.0, float(dm[i, j]) / 2.0
        return ball
    p = pts[0]
    ball = _welzl(pts[1:], boundary, d)
    if _contains(ball, p):
        return ball
    return _welzl(pts[1:], boundary + [p], d)


def smallest_enclosing_ball(points) -> tuple[np.ndarray, float]:
    """(center, radius) of the minimum enclosing ball of the points."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise ValueError("need a nonempty (n, d) point array")
    d = pts.shape[1]
    rows = [pts[i] for i in range(pts.shape[0])]
    return _welzl(rows, [], d)


def enclosing_radius(points) -> float:
    return smallest_enclosing_ball(points)[1]
