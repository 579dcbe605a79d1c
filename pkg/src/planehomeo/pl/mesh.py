"""Triangulations, the mesher wrapper, point location and generic PL maps."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import triangle as _triangle

from ..errors import InvalidGeometry, OutsideDomain, OutsideImage
from ..geom.polygon import as_points, signed_area

#: barycentric slack accepted by point location (dimensionless)
BARY_TOL = 1e-12


def tri_det(v: np.ndarray, tris: np.ndarray) -> np.ndarray:
    a, b, c = v[tris[:, 0]], v[tris[:, 1]], v[tris[:, 2]]
    return (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])


def boundary_loops(triangles: np.ndarray) -> list[list[int]]:
    """Oriented boundary cycles (interior on the left) of a triangle soup."""
    e = np.vstack([triangles[:, [0, 1]], triangles[:, [1, 2]], triangles[:, [2, 0]]])
    keys = {(int(a), int(b)) for a, b in e}
    nxt = {}
    for a, b in keys:
        if (b, a) not in keys:
            if a in nxt:
                raise InvalidGeometry("boundary is not a disjoint union of cycles")
            nxt[a] = b
    loops, seen = [], set()
    for s in sorted(nxt):
        if s in seen:
            continue
        loop, v = [], s
        while v not in seen:
            seen.add(v)
            loop.append(v)
            v = nxt[v]
        loops.append(loop)
    return loops


@dataclass(frozen=True)
class Triangulation:
    """Vertices, CCW triangles and the CCW outer boundary loop."""

    vertices: np.ndarray
    triangles: np.ndarray
    boundary_loop: np.ndarray
    holes: tuple[np.ndarray, ...] = ()

    def __post_init__(self):
        v = as_points(self.vertices)
        t = np.asarray(self.triangles, dtype=np.int64).reshape(-1, 3)
        for arr in (v, t):
            arr.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "triangles", t)
        object.__setattr__(self, "boundary_loop", np.asarray(self.boundary_loop, dtype=np.int64))

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def is_ccw(self) -> bool:
        return bool(np.all(tri_det(self.vertices, self.triangles) > 0))

    @property
    def boundary_mask(self) -> np.ndarray:
        m = np.zeros(len(self.vertices), bool)
        m[self.boundary_loop] = True
        for h in self.holes:
            m[h] = True
        return m

    def edges(self) -> np.ndarray:
        """Unique undirected edges, sorted pairs."""
        t = self.triangles
        e = np.sort(np.vstack([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]]), axis=1)
        return np.unique(e, axis=0)

    def boundary_polygon(self) -> np.ndarray:
        return self.vertices[self.boundary_loop]


def subdivide_loop(poly: np.ndarray, h: float | None) -> tuple[np.ndarray, np.ndarray]:
    """Insert equally spaced points so every edge is at most ``h``.

    Returns the new loop and, for every new vertex, its vertex-index
    parameter on the original loop.
    """
    poly = as_points(poly)
    n = len(poly)
    if not h:
        return poly.copy(), np.arange(n, dtype=float)
    pts, par = [], []
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        k = max(1, int(np.ceil(np.linalg.norm(b - a) / h)))
        t = np.arange(k) / k
        pts.append(a + t[:, None] * (b - a))
        par.append(i + t)
    return np.vstack(pts), np.concatenate(par)


def _rotate_to(loop: list[int], start: int) -> list[int]:
    k = loop.index(start)
    return loop[k:] + loop[:k]


def mesh_polygon(poly, max_area: float | None = None, min_angle: float = 25.0,
                 holes: list[np.ndarray] | None = None, hole_points=None,
                 steiner_on_boundary: bool = True) -> Triangulation:
    """Constrained quality triangulation of a simple CCW polygon.

    Input vertices keep their indices (0..n-1); ``boundary_loop`` starts at
    vertex 0.  Triangle may insert extra points on boundary segments unless
    ``steiner_on_boundary`` is False.  ``holes`` are inner CW-or-CCW loops
    whose interiors are removed, located by ``hole_points``.
    """
    poly = as_points(poly)
    if signed_area(poly) <= 0:
        raise InvalidGeometry("mesh_polygon expects a CCW outer loop")
    loops = [poly] + [as_points(h) for h in (holes or [])]
    verts, segs, off = [], [], 0
    for L in loops:
        k = len(L)
        verts.append(L)
        segs.append(off + np.c_[np.arange(k), (np.arange(k) + 1) % k])
        off += k
    data = {"vertices": np.vstack(verts), "segments": np.vstack(segs)}
    if hole_points is not None and len(hole_points):
        data["holes"] = np.asarray(hole_points, float)
    opts = f"pq{min_angle:g}Q"
    if max_area:
        opts += f"a{max_area:.12g}"
    if not steiner_on_boundary:
        opts += "Y"
    out = _triangle.triangulate(data, opts)
    v = np.asarray(out["vertices"], float)
    t = np.asarray(out["triangles"], np.int64)
    neg = tri_det(v, t) < 0
    t[neg] = t[neg][:, [0, 2, 1]]
    keep = tri_det(v, t) > 0
    t = t[keep]
    cycles = boundary_loops(t)
    outer = next((c for c in cycles if 0 in c), None)
    if outer is None:
        raise InvalidGeometry("mesher lost the outer boundary")
    outer = _rotate_to(outer, 0)
    inner = []
    off = len(poly)
    for L in loops[1:]:
        cyc = next((c for c in cycles if off in c), None)
        if cyc is None:
            raise InvalidGeometry("mesher lost an inner boundary")
        inner.append(np.array(_rotate_to(cyc, off)))
        off += len(L)
    return Triangulation(v, t, np.array(outer), tuple(inner))


class TriangleLocator:
    """Uniform bucket grid over triangle bounding boxes.

    Queries return the lowest-index triangle whose closed (slightly padded)
    barycentric region contains the point, or -1.
    """

    def __init__(self, vertices: np.ndarray, triangles: np.ndarray, target_per_bucket: float = 2.0):
        self.v = np.asarray(vertices, float)
        self.t = np.asarray(triangles, np.int64)
        P = self.v[self.t]
        self.lo_t = P.min(axis=1)
        self.hi_t = P.max(axis=1)
        self.lo = self.lo_t.min(axis=0)
        hi = self.hi_t.max(axis=0)
        span = np.maximum(hi - self.lo, 1e-300)
        nb = max(1, int(np.sqrt(len(self.t) / target_per_bucket)))
        aspect = span[0] / span[1]
        nx = int(np.clip(round(nb * np.sqrt(aspect)), 1, 4096))
        ny = int(np.clip(round(nb / np.sqrt(aspect)), 1, 4096))
        self.shape = (nx, ny)
        self.cell = span / np.array([nx, ny])
        pad = 1e-9 * span
        i0 = self._cell_index(self.lo_t - pad)
        i1 = self._cell_index(self.hi_t + pad)
        rows, cols = [], []
        for k in range(len(self.t)):
            xs = np.arange(i0[k, 0], i1[k, 0] + 1)
            ys = np.arange(i0[k, 1], i1[k, 1] + 1)
            cells = (xs[:, None] * ny + ys[None, :]).ravel()
            rows.append(cells)
            cols.append(np.full(len(cells), k))
        rows = np.concatenate(rows)
        cols = np.concatenate(cols)
        order = np.lexsort((cols, rows))
        rows, cols = rows[order], cols[order]
        self.cand = cols
        self.start = np.searchsorted(rows, np.arange(nx * ny + 1))
        # affine data for barycentric coordinates
        a = P[:, 0]
        self.origin = a
        M = np.stack([P[:, 1] - a, P[:, 2] - a], axis=2)  # columns e1, e2
        det = M[:, 0, 0] * M[:, 1, 1] - M[:, 0, 1] * M[:, 1, 0]
        inv = np.empty_like(M)
        inv[:, 0, 0] = M[:, 1, 1] / det
        inv[:, 1, 1] = M[:, 0, 0] / det
        inv[:, 0, 1] = -M[:, 0, 1] / det
        inv[:, 1, 0] = -M[:, 1, 0] / det
        self.inv = inv

    def _cell_index(self, p: np.ndarray) -> np.ndarray:
        idx = np.floor((p - self.lo) / self.cell).astype(np.int64)
        return np.clip(idx, 0, np.array(self.shape) - 1)

    def barycentric(self, tri: np.ndarray, pts: np.ndarray) -> np.ndarray:
        d = pts - self.origin[tri]
        l1 = self.inv[tri, 0, 0] * d[:, 0] + self.inv[tri, 0, 1] * d[:, 1]
        l2 = self.inv[tri, 1, 0] * d[:, 0] + self.inv[tri, 1, 1] * d[:, 1]
        return np.stack([1.0 - l1 - l2, l1, l2], axis=1)

    def locate(self, pts) -> tuple[np.ndarray, np.ndarray]:
        """Triangle index (or -1) and barycentric coordinates per point."""
        pts = np.asarray(pts, float).reshape(-1, 2)
        n = len(pts)
        found = np.full(n, -1, np.int64)
        bary = np.full((n, 3), np.nan)
        ok = np.all(np.isfinite(pts), axis=1)
        inside_box = ok & np.all(pts >= self.lo - self.cell * 1e-9, axis=1) & np.all(
            pts <= self.lo + self.cell * np.array(self.shape) * (1 + 1e-12) + 1e-300, axis=1)
        q = np.nonzero(inside_box)[0]
        if len(q) == 0:
            return found, bary
        ci = self._cell_index(pts[q])
        cell = ci[:, 0] * self.shape[1] + ci[:, 1]
        s0 = self.start[cell]
        cnt = self.start[cell + 1] - s0
        pending = np.ones(len(q), bool)
        for slot in range(int(cnt.max(initial=0))):
            act = np.nonzero(pending & (cnt > slot))[0]
            if len(act) == 0:
                break
            tri = self.cand[s0[act] + slot]
            b = self.barycentric(tri, pts[q[act]])
            hit = np.all(b >= -BARY_TOL, axis=1)
            sel = act[hit]
            found[q[sel]] = tri[hit]
            bary[q[sel]] = b[hit]
            pending[sel] = False
        return found, bary


@dataclass(frozen=True, eq=False)
class PLMap:
    """Simplicial map given by the same triangles on source and target vertices."""

    src: np.ndarray
    dst: np.ndarray
    triangles: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        for name in ("src", "dst"):
            a = np.asarray(getattr(self, name), float)
            a.setflags(write=False)
            object.__setattr__(self, name, a)
        t = np.asarray(self.triangles, np.int64)
        t.setflags(write=False)
        object.__setattr__(self, "triangles", t)

    @property
    def forward_locator(self) -> TriangleLocator:
        if "fwd" not in self._cache:
            self._cache["fwd"] = TriangleLocator(self.src, self.triangles)
        return self._cache["fwd"]

    @property
    def inverse_locator(self) -> TriangleLocator:
        if "inv" not in self._cache:
            self._cache["inv"] = TriangleLocator(self.dst, self.triangles)
        return self._cache["inv"]

    def _apply(self, loc: TriangleLocator, vals: np.ndarray, pts, strict: bool, err):
        pts = np.asarray(pts, float)
        shape = pts.shape
        tri, b = loc.locate(pts.reshape(-1, 2))
        out = np.full((len(tri), 2), np.nan)
        ok = tri >= 0
        if strict and not np.all(ok):
            bad = pts.reshape(-1, 2)[~ok][0]
            raise err(f"point {bad.tolist()} is outside the triangulated region")
        V = vals[self.triangles[tri[ok]]]
        out[ok] = np.einsum("ni,nij->nj", b[ok], V)
        return out.reshape(shape)

    def forward(self, pts, strict: bool = False) -> np.ndarray:
        return self._apply(self.forward_locator, self.dst, pts, strict, OutsideDomain)

    def inverse(self, pts, strict: bool = False) -> np.ndarray:
        return self._apply(self.inverse_locator, self.src, pts, strict, OutsideImage)

    def forward_triangle(self, pts) -> np.ndarray:
        return self.forward_locator.locate(np.asarray(pts, float).reshape(-1, 2))[0]

    def jacobians(self) -> np.ndarray:
        """Per-triangle linear part A of the affine map, shape (T, 2, 2)."""
        if "jac" not in self._cache:
            t = self.triangles
            S = np.stack([self.src[t[:, 1]] - self.src[t[:, 0]], self.src[t[:, 2]] - self.src[t[:, 0]]], axis=2)
            T = np.stack([self.dst[t[:, 1]] - self.dst[t[:, 0]], self.dst[t[:, 2]] - self.dst[t[:, 0]]], axis=2)
            self._cache["jac"] = T @ np.linalg.inv(S)
        return self._cache["jac"]


def pullback_polyline(chart: PLMap, model_pts: np.ndarray, inverse: bool = True) -> np.ndarray:
    """World polyline for a model polyline, exact at every mesh-edge crossing.

    Each model segment is split where it crosses the model triangulation's
    edges, so the image polyline is the true PL preimage.
    """
    model_pts = as_points(model_pts)
    V = chart.dst if inverse else chart.src
    edges = np.sort(np.vstack([chart.triangles[:, [0, 1]], chart.triangles[:, [1, 2]],
                               chart.triangles[:, [2, 0]]]), axis=1)
    edges = np.unique(edges, axis=0)
    e0, e1 = V[edges[:, 0]], V[edges[:, 1]]
    out = [model_pts[:1]]
    for p, q in zip(model_pts[:-1], model_pts[1:]):
        r = q - p
        s = e1 - e0
        den = r[0] * s[:, 1] - r[1] * s[:, 0]
        w = e0 - p
        with np.errstate(divide="ignore", invalid="ignore"):
            t = (w[:, 0] * s[:, 1] - w[:, 1] * s[:, 0]) / den
            u = (w[:, 0] * r[1] - w[:, 1] * r[0]) / den
        hit = (den != 0) & (t > 1e-12) & (t < 1 - 1e-12) & (u >= -1e-12) & (u <= 1 + 1e-12)
        ts = np.unique(np.round(t[hit], 14))
        out.append(p + ts[:, None] * r)
        out.append(q[None])
    M = np.vstack(out)
    W = chart.inverse(M) if inverse else chart.forward(M)
    keep = np.r_[True, np.any(np.abs(np.diff(W, axis=0)) > 0, axis=1)]
    return W[keep & np.all(np.isfinite(W), axis=1)]
