"""Fixed-point search: Lipschitz-certified quadtree exclusion, Newton refinement,
and a degree certificate on a small box around every fixed point found."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from ..errors import BudgetExceeded, MarginTooSmall, OutsideDomain
from ..geom.polygon import JordanDomain
from .degree import box_curve, displacement_winding


@dataclass(frozen=True)
class FixedPointCertificate:
    box: tuple[float, float, float, float]  # xmin, ymin, xmax, ymax
    winding: int
    witness: tuple[float, float]
    residual: float
    tol: float

    @property
    def certified(self) -> bool:
        """Nonzero degree on the box boundary proves a fixed point inside."""
        return self.winding != 0

    def contains(self, p) -> bool:
        x0, y0, x1, y1 = self.box
        return x0 <= p[0] <= x1 and y0 <= p[1] <= y1

    def to_json(self) -> dict:
        return {"box": [round(v, 12) for v in self.box], "winding": self.winding,
                "witness": [round(v, 12) for v in self.witness], "residual": self.residual, "tol": self.tol}


class FixedPointList(list):
    """Certificates plus search diagnostics (``margin`` is the grid minimum of |f(x) - x|)."""

    margin: float = math.nan
    boxes: int = 0
    rigorous: bool = True
    truncated: bool = False  # more than max_points distinct fixed points (e.g. a fixed continuum)


def as_region(region) -> JordanDomain:
    if isinstance(region, JordanDomain):
        return region
    if hasattr(region, "domain"):
        return region.domain
    raise TypeError(f"cannot use {type(region).__name__} as a search region")


def displacement_lipschitz(f) -> tuple[float, bool]:
    """Lipschitz bound of x -> f(x) - x and whether it is rigorous."""
    v = getattr(f, "displacement_lipschitz", None)
    if v is not None:
        return float(v), True
    lf = getattr(f, "lipschitz", None)
    if lf is not None:
        return float(lf) + 1.0, True
    return math.nan, False


def _boxes_meeting(dom: JordanDomain, centers: np.ndarray, half: float) -> np.ndarray:
    """Mask of boxes that intersect the closed polygon region."""
    P = dom.vertices
    Q = np.roll(P, -1, axis=0)
    lo = centers - half
    hi = centers + half
    keep = dom.contains(centers, closed=True)
    # polygon vertices inside a box
    rest = np.nonzero(~keep)[0]
    if len(rest):
        inb = np.all((P[None] >= lo[rest, None]) & (P[None] <= hi[rest, None]), axis=2).any(axis=1)
        keep[rest[inb]] = True
    rest = np.nonzero(~keep)[0]
    for chunk in np.array_split(rest, max(1, len(rest) // 2048 + 1)):
        if not len(chunk):
            continue
        # Liang-Barsky clip of every polygon edge against every box
        d = Q - P
        t0 = np.zeros((len(chunk), len(P)))
        t1 = np.ones((len(chunk), len(P)))
        ok = np.ones((len(chunk), len(P)), bool)
        for ax in (0, 1):
            p0 = P[None, :, ax]
            dd = d[None, :, ax]
            a = lo[chunk, None, ax]
            b = hi[chunk, None, ax]
            with np.errstate(divide="ignore", invalid="ignore"):
                ta = (a - p0) / dd
                tb = (b - p0) / dd
            par = dd == 0
            ok &= ~par | ((p0 >= a) & (p0 <= b))
            tmin = np.where(par, -np.inf, np.minimum(ta, tb))
            tmax = np.where(par, np.inf, np.maximum(ta, tb))
            t0 = np.maximum(t0, tmin)
            t1 = np.minimum(t1, tmax)
        hit = ok & (t0 <= t1)
        keep[chunk[hit.any(axis=1)]] = True
    return keep


def _deduplicate(x: np.ndarray, r: np.ndarray, radius: float) -> np.ndarray:
    """Indices of one representative per cluster, ordered lexicographically by position."""
    if not len(x):
        return np.zeros(0, int)
    tree = cKDTree(x)
    taken = np.zeros(len(x), bool)
    keep = []
    for i in np.argsort(r, kind="stable"):
        if taken[i]:
            continue
        keep.append(i)
        taken[tree.query_ball_point(x[i], radius)] = True
    keep = np.array(keep, int)
    return keep[np.lexsort((x[keep, 1], x[keep, 0]))]


def _newton(f, x0: np.ndarray, tol: float, scale: float, iters: int = 60) -> tuple[np.ndarray, np.ndarray]:
    x = x0.copy()
    h = 1e-7 * scale
    res = np.full(len(x), np.inf)
    act = np.ones(len(x), bool)
    for _ in range(iters):
        idx = np.nonzero(act)[0]
        if not len(idx):
            break
        xi = x[idx]
        fx = f.forward(xi)
        d = fx - xi
        r = np.linalg.norm(d, axis=1)
        res[idx] = r
        bad = ~np.isfinite(r)
        done = r <= tol
        act[idx[bad | done]] = False
        go = ~(bad | done)
        if not np.any(go):
            break
        idx, xi, fx, d = idx[go], xi[go], fx[go], d[go]
        J = np.empty((len(idx), 2, 2))
        for ax in (0, 1):
            e = np.zeros(2)
            e[ax] = h
            fp = f.forward(xi + e)
            col = (fp - fx) / h
            miss = ~np.all(np.isfinite(col), axis=1)
            if np.any(miss):
                fm = f.forward(xi[miss] - e)
                col[miss] = (fx[miss] - fm) / h
            J[:, :, ax] = col
        A = J - np.eye(2)
        det = A[:, 0, 0] * A[:, 1, 1] - A[:, 0, 1] * A[:, 1, 0]
        sing = ~np.isfinite(det) | (np.abs(det) < 1e-14)
        step = np.zeros_like(xi)
        ok = ~sing
        if np.any(ok):
            step[ok] = np.linalg.solve(A[ok], -d[ok][:, :, None])[:, :, 0]
        lim = 0.25 * scale
        n = np.linalg.norm(step, axis=1)
        step[n > lim] *= (lim / n[n > lim])[:, None]
        x[idx] = xi + step
        act[idx[sing]] = False
    return x, res


def certify_point(f, p: np.ndarray, r0: float, tol: float, residual: float, tries: int = 8) -> FixedPointCertificate:
    """Smallest-degree-box certificate around a numerical fixed point."""
    r = r0
    wind = 0
    for _ in range(tries):
        try:
            wind = displacement_winding(f, box_curve(p, r), max_points=20_000)
            if wind != 0:
                break
        except (MarginTooSmall, OutsideDomain):
            pass
        r *= 0.25
    box = (float(p[0] - r), float(p[1] - r), float(p[0] + r), float(p[1] + r))
    return FixedPointCertificate(box, int(wind), (float(p[0]), float(p[1])), float(residual), float(tol))


def grid_margin(f, region, gridN: int = 200) -> tuple[float, np.ndarray | None]:
    """min |f(x) - x| over grid points of the closed region, with the argmin."""
    dom = as_region(region)
    lo, hi = dom.vertices.min(axis=0), dom.vertices.max(axis=0)
    xs = np.linspace(lo[0], hi[0], gridN)
    ys = np.linspace(lo[1], hi[1], gridN)
    G = np.stack(np.meshgrid(xs, ys), axis=-1).reshape(-1, 2)
    G = np.vstack([G[dom.contains(G, closed=True)], dom.vertices])
    d = np.linalg.norm(f.forward(G) - G, axis=1)
    if not np.any(np.isfinite(d)):
        return math.nan, None
    k = int(np.nanargmin(d))
    return float(d[k]), G[k]


def find_fixed_points(f, region, tol: float = 1e-10, leaf: float | None = None, max_boxes: int = 400_000,
                      gridN: int = 200, lipschitz: float | None = None, certify: bool = True,
                      max_points: int = 64) -> FixedPointList:
    """All fixed points of ``f`` in a closed polygonal region.

    Boxes are discarded when 3x3 samples prove |f(x) - x| > 0 throughout
    (Lipschitz bound of the displacement); the rest are split down to
    ``leaf`` size and seeded into Newton iteration.  Each fixed point gets a
    degree certificate on a small box.  Raises BudgetExceeded (with partial
    certificates) once ``max_boxes`` boxes were examined.
    """
    dom = as_region(region)
    lo, hi = dom.vertices.min(axis=0), dom.vertices.max(axis=0)
    scale = float(max(hi - lo))
    center = 0.5 * (lo + hi)
    half = 0.5 * scale * (1 + 1e-9)
    Ld, rigorous = (float(lipschitz), True) if lipschitz is not None else displacement_lipschitz(f)
    leaf_half = (leaf / 2) if leaf else half / 256
    offs = np.array([(i, j) for j in (-1, 0, 1) for i in (-1, 0, 1)], float)
    centers = center[None].copy()
    h = half
    examined = 0
    seeds = []
    over_budget = False
    while len(centers):
        centers = centers[_boxes_meeting(dom, centers, h)]
        examined += len(centers)
        pts = (centers[:, None, :] + h * offs[None]).reshape(-1, 2)
        d = (f.forward(pts) - pts).reshape(len(centers), 9, 2)
        mag = np.linalg.norm(d, axis=2)
        defined = np.all(np.isfinite(mag), axis=1)
        if rigorous:
            excluded = defined & (np.nanmin(np.where(defined[:, None], mag, np.inf), axis=1) > Ld * h * math.sqrt(0.5) * (1 + 1e-9))
        else:
            excluded = np.zeros(len(centers), bool)
        live = ~excluded
        if h <= leaf_half or examined > max_boxes:
            over_budget = examined > max_boxes and h > leaf_half
            m = np.where(np.isfinite(mag[live]), mag[live], np.inf)
            best = np.argmin(m, axis=1)
            has = np.isfinite(m[np.arange(len(best)), best])
            P = pts.reshape(len(centers), 9, 2)[live]
            seeds.append(P[np.arange(len(best)), best][has])
            break
        c = centers[live]
        hh = 0.5 * h
        centers = np.vstack([c + hh * np.array([sx, sy]) for sx in (-1, 1) for sy in (-1, 1)])
        h = hh
    seeds = np.vstack(seeds) if seeds else np.zeros((0, 2))
    found = np.zeros((0, 2))
    res = np.zeros(0)
    truncated = False
    if len(seeds):
        x, r = _newton(f, seeds, tol, scale)
        ok = np.isfinite(r) & (r <= tol)
        x, r = x[ok], r[ok]
        if len(x):
            inside = dom.contains(x, closed=True)
            x, r = x[inside], r[inside]
        keep = _deduplicate(x, r, 1e-7 * scale)
        truncated = len(keep) > max_points
        found, res = x[keep[:max_points]], r[keep[:max_points]]
    out = FixedPointList()
    for p, rr in zip(found, res):
        if certify:
            out.append(certify_point(f, p, max(leaf_half, 1e-6 * scale), tol, rr))
        else:
            out.append(FixedPointCertificate((p[0], p[1], p[0], p[1]), 0, (float(p[0]), float(p[1])), float(rr), tol))
    out.margin, _ = grid_margin(f, dom, gridN) if gridN else (math.nan, None)
    out.boxes = examined
    out.rigorous = rigorous
    out.truncated = truncated
    if over_budget:
        raise BudgetExceeded(f"fixed-point search examined {examined} boxes", partial=out)
    return out
