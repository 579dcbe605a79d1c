"""Winding number of the displacement field x -> f(x) - x along closed curves."""

from __future__ import annotations

import numpy as np

from ..errors import MarginTooSmall, OutsideDomain
from ..geom.polygon import PolyArc, as_points

ANGLE_STEP = np.pi / 4
MARGIN_FACTOR = 10.0


def _curve_points(curve) -> np.ndarray:
    if isinstance(curve, PolyArc):
        return curve.vertices
    if hasattr(curve, "boundary"):
        return curve.boundary.vertices
    return as_points(curve)


def _displacement(f, pts: np.ndarray) -> np.ndarray:
    d = f.forward(pts) - pts
    if not np.all(np.isfinite(d)):
        bad = pts[~np.all(np.isfinite(d), axis=1)][0]
        raise OutsideDomain(f"map undefined on the curve at {bad.tolist()}")
    return d


def displacement_winding(f, curve, samples_per_edge: int = 4, max_points: int = 2_000_000) -> int:
    """Degree of x -> f(x) - x along a closed polygon.

    The curve is refined until every displacement angle increment is below
    pi/4 and every displacement increment is below a tenth of the smallest
    displacement seen.  Raises MarginTooSmall if this needs more than
    ``max_points`` samples, i.e. the displacement (nearly) vanishes on the curve.
    """
    V = _curve_points(curve)
    t = np.arange(samples_per_edge) / samples_per_edge
    W = np.roll(V, -1, axis=0)
    pts = (V[:, None, :] + t[None, :, None] * (W - V)[:, None, :]).reshape(-1, 2)
    d = _displacement(f, pts)
    # displacement below rounding level of the coordinates counts as zero
    scale = max(float(np.ptp(V, axis=0).max() + np.abs(V).max()), 1e-300)
    while True:
        nxt = np.roll(d, -1, axis=0)
        cross = d[:, 0] * nxt[:, 1] - d[:, 1] * nxt[:, 0]
        dot = np.einsum("ij,ij->i", d, nxt)
        dphi = np.arctan2(cross, dot)
        mags = np.linalg.norm(d, axis=1)
        margin = mags.min()
        if margin <= 1e-12 * scale:
            raise MarginTooSmall(f"displacement {margin:.3g} vanishes on the curve")
        jump = np.linalg.norm(nxt - d, axis=1)
        bad = (np.abs(dphi) >= ANGLE_STEP) | (MARGIN_FACTOR * jump >= margin)
        if not np.any(bad):
            return int(np.rint(dphi.sum() / (2 * np.pi)))
        if len(pts) + int(bad.sum()) > max_points:
            raise MarginTooSmall(f"refinement budget exhausted; displacement margin {margin:.3g}")
        idx = np.nonzero(bad)[0]
        mid = 0.5 * (pts[idx] + np.roll(pts, -1, axis=0)[idx])
        dm = _displacement(f, mid)
        order = np.argsort(np.r_[np.arange(len(pts)), idx + 0.5], kind="stable")
        pts = np.vstack([pts, mid])[order]
        d = np.vstack([d, dm])[order]


def box_curve(center, half: float) -> np.ndarray:
    cx, cy = center
    return np.array([[cx - half, cy - half], [cx + half, cy - half], [cx + half, cy + half], [cx - half, cy + half]])
