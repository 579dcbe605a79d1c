"""Pairwise disjointness of the iterates of a disk under a fixed-point-free map."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..geom.neighborhood import set_distance
from ..geom.polygon import JordanDomain, PolyArc, as_points


@dataclass(frozen=True)
class FreeDiskResult:
    ok: bool
    precondition: bool  # F(U) n U = empty
    witness: tuple[int, int] | None
    min_distance: float
    n: int

    def __bool__(self) -> bool:
        return self.ok


def _image_loops(F, boundary: np.ndarray, n: int, spacing: float, max_points: int) -> list[np.ndarray]:
    """Boundary samples of U, F(U), ..., F^n(U), refined until every image polygon
    has consecutive samples closer than ``spacing``."""
    pts = boundary
    while True:
        loops = [pts]
        for _ in range(n):
            loops.append(F.forward(loops[-1]))
        gaps = np.max([np.linalg.norm(np.roll(L, -1, axis=0) - L, axis=1) for L in loops], axis=0)
        bad = gaps > spacing
        if not np.any(bad) or len(pts) * 2 > max_points:
            return loops
        idx = np.nonzero(bad)[0]
        mid = 0.5 * (pts[idx] + np.roll(pts, -1, axis=0)[idx])
        order = np.argsort(np.r_[np.arange(len(pts)), idx + 0.5], kind="stable")
        pts = np.vstack([pts, mid])[order]


def free_disk_check(F, U, n: int = 5, spacing: float | None = None, max_points: int = 200_000) -> FreeDiskResult:
    """True iff F^i(U) and F^j(U) are disjoint for all 0 <= i < j <= n.

    U is a Jordan polygon; the images are the polygons through the images of
    adaptively refined boundary samples.  F(U) n U = empty is checked first.
    """
    V = U.vertices if isinstance(U, JordanDomain) else as_points(U)
    diam = float(np.ptp(V, axis=0).max())
    spacing = spacing or diam / 64
    loops = _image_loops(F, V, n, spacing, max_points)
    if any(not np.all(np.isfinite(L)) for L in loops):
        return FreeDiskResult(False, False, None, float("nan"), n)
    polys = [PolyArc(L, closed=True) for L in loops]
    d01 = set_distance(polys[0], polys[1])
    if d01 <= 0:
        return FreeDiskResult(False, False, (0, 1), d01, n)
    best = d01
    for i in range(n + 1):
        for j in range(i + 1, n + 1):
            d = set_distance(polys[i], polys[j])
            best = min(best, d)
            if d <= 0:
                return FreeDiskResult(False, True, (i, j), d, n)
    return FreeDiskResult(True, True, None, best, n)
