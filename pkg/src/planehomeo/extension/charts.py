"""Certified PL charts: disk charts of Jordan polygons and rectangle charts of annuli.

Both charts fix the boundary on a convex model and place interior vertices
by mean-value (convex combination) coordinates, which yields an embedding
whenever the model boundary is convex and no interior edge joins two
boundary vertices on one straight side.  The embedding is then certified
by checking every model triangle with the exact orientation predicate.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph
from scipy.sparse.linalg import splu

from ..errors import InvalidGeometry, MeshRefinementExceeded
from ..geom.polygon import JordanDomain, PolyArc, as_points, regular_polygon, signed_area
from ..geom.predicates import orient_many, point_segment_distance
from ..pl.mesh import PLMap, Triangulation, mesh_polygon, subdivide_loop


def mean_value_laplacian(V: np.ndarray, T: np.ndarray) -> sparse.csr_matrix:
    """Row i holds w_ij (j != i) and -sum_j w_ij, with mean-value weights."""
    n = len(V)
    rows, cols, vals = [], [], []
    for a, b, c in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        i, j, k = T[:, a], T[:, b], T[:, c]
        e1 = V[j] - V[i]
        e2 = V[k] - V[i]
        l1 = np.linalg.norm(e1, axis=1)
        l2 = np.linalg.norm(e2, axis=1)
        cosang = np.clip(np.einsum("ij,ij->i", e1, e2) / (l1 * l2), -1.0, 1.0)
        half = np.tan(0.5 * np.arccos(cosang))
        rows += [i, i]
        cols += [j, k]
        vals += [half / l1, half / l2]
    rows, cols, vals = np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)
    W = sparse.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    return W - sparse.diags(np.asarray(W.sum(axis=1)).ravel())


def convex_combination_solve(V: np.ndarray, T: np.ndarray, fixed: np.ndarray, fixed_pos: np.ndarray) -> np.ndarray:
    """Positions with the ``fixed`` vertices pinned and the rest at mean-value averages."""
    n = len(V)
    L = mean_value_laplacian(V, T)
    free = np.ones(n, bool)
    free[fixed] = False
    out = np.zeros((n, 2))
    out[fixed] = fixed_pos
    fi = np.nonzero(free)[0]
    if len(fi):
        A = L[fi][:, fi].tocsc()
        B = L[fi][:, fixed]
        rhs = -(B @ fixed_pos)
        lu = splu(A)
        out[fi] = np.column_stack([lu.solve(rhs[:, 0]), lu.solve(rhs[:, 1])])
    return out


def embedding_certified(model: np.ndarray, T: np.ndarray) -> bool:
    return bool(np.all(orient_many(model[T[:, 0]], model[T[:, 1]], model[T[:, 2]]) > 0))


def loop_input_parameter(loop_xy: np.ndarray, loop_idx: np.ndarray, n_input: int, offset: int = 0) -> np.ndarray:
    """Fractional input-vertex parameter for every vertex of a meshed boundary loop.

    Input vertices (mesh indices ``offset .. offset+n_input-1``) get their
    integer position; mesher Steiner points between two consecutive inputs
    get the distance-weighted fraction.
    """
    m = len(loop_idx)
    par = np.full(m, np.nan)
    is_in = (loop_idx >= offset) & (loop_idx < offset + n_input)
    par[is_in] = loop_idx[is_in] - offset
    anchors = np.nonzero(is_in)[0]
    if len(anchors) == 0:
        raise InvalidGeometry("boundary loop contains no input vertex")
    for a, b in zip(anchors, np.r_[anchors[1:], anchors[0] + m]):
        if b - a <= 1:
            continue
        seg = [k % m for k in range(a, b + 1)]
        d = np.r_[0.0, np.cumsum(np.linalg.norm(np.diff(loop_xy[seg], axis=0), axis=1))]
        p0 = par[seg[0]]
        p1 = par[seg[-1]]
        if p1 <= p0:
            p1 += n_input
        frac = d / d[-1]
        par[seg[1:-1]] = (p0 + frac * (p1 - p0))[1:-1] % n_input
    return par


def lerp_periodic(values: np.ndarray, par, period: float | None):
    """Evaluate per-input-vertex ``values`` at fractional parameters (closed loop)."""
    par = np.asarray(par, float)
    n = len(values)
    i = np.floor(par).astype(int) % n
    t = par - np.floor(par)
    a, b = values[i], values[(i + 1) % n]
    if period is not None:
        d = (b - a + 0.5 * period) % period - 0.5 * period
        return (a + t * d) % period
    return a + t * (b - a)


def _insert_boundary_point(poly: np.ndarray, p: np.ndarray, tol: float) -> tuple[np.ndarray, int]:
    d = np.linalg.norm(poly - p, axis=1)
    k = int(np.argmin(d))
    if d[k] <= tol:
        return poly, k
    a, b = poly, np.roll(poly, -1, axis=0)
    dist, t = point_segment_distance(p[None, :], a, b)
    j = int(np.argmin(dist))
    if dist[j] > 1e3 * tol:
        raise InvalidGeometry(f"anchor {p.tolist()} is not on the region boundary")
    q = a[j] + t[j] * (b[j] - a[j])
    return np.insert(poly, j + 1, q, axis=0), j + 1


@dataclass(frozen=True, eq=False)
class DiskChart:
    """PL homeomorphism from a Jordan polygon onto an inscribed polygon of the unit disk.

    The boundary arc from anchor A counter-clockwise to anchor B goes to the
    lower half circle, the remaining arc to the upper half, both by
    arclength; A lands on (-1, 0) and B on (1, 0).
    """

    mesh: Triangulation
    model: np.ndarray
    anchors: tuple[int, int]  # mesh vertex indices of A and B
    n_input: int  # mesh vertices 0..n_input-1 are the input boundary polygon
    refinements: int
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def pl(self) -> PLMap:
        if "pl" not in self._cache:
            self._cache["pl"] = PLMap(self.mesh.vertices, self.model, self.mesh.triangles)
        return self._cache["pl"]

    @property
    def parameterPositions(self) -> np.ndarray:
        return self.model

    def to_model(self, pts, strict: bool = False) -> np.ndarray:
        return self.pl.forward(pts, strict)

    def to_world(self, pts, strict: bool = False) -> np.ndarray:
        return self.pl.inverse(pts, strict)

    def _split(self):
        if "split" not in self._cache:
            loop = list(self.mesh.boundary_loop)
            ia, ib = loop.index(self.anchors[0]), loop.index(self.anchors[1])
            rot = loop[ia:] + loop[:ia]
            k = (ib - ia) % len(loop)
            lower = np.array(rot[: k + 1])
            upper = np.array((rot[k:] + rot[:1])[::-1])
            self._cache["split"] = (lower, upper)
        return self._cache["split"]

    @property
    def lower_chain(self) -> np.ndarray:
        """Mesh indices from A to B along the lower half, model x increasing."""
        return self._split()[0]

    @property
    def upper_chain(self) -> np.ndarray:
        """Mesh indices from A to B along the upper half, model x increasing."""
        return self._split()[1]

    @property
    def input_parameter(self) -> dict[int, float]:
        """Fractional input-polygon parameter for every boundary vertex."""
        if "ipar" not in self._cache:
            loop = self.mesh.boundary_loop
            par = loop_input_parameter(self.mesh.vertices[loop], loop, self.n_input)
            self._cache["ipar"] = dict(zip(loop.tolist(), par.tolist()))
        return self._cache["ipar"]

    def chain_lookup(self, chain: np.ndarray, s) -> tuple[np.ndarray, np.ndarray]:
        """Segment index and fraction of model abscissa ``s`` on a chain."""
        x = self.model[chain, 0]
        s = np.clip(np.asarray(s, float), x[0], x[-1])
        k = np.clip(np.searchsorted(x, s, side="right") - 1, 0, len(x) - 2)
        t = (s - x[k]) / (x[k + 1] - x[k])
        return k, np.clip(t, 0.0, 1.0)


def schoenflies_chart(region, anchorA, anchorB, boundary_step: float | None = 0.0,
                      max_area: float | None = None, max_refinements: int = 4,
                      min_angle: float = 25.0, steiner_on_boundary: bool = True) -> DiskChart:
    """Disk chart of a Jordan polygon with anchors sent to (-1, 0) and (1, 0).

    ``boundary_step`` subdivides the boundary first (0 picks perimeter/96,
    None keeps the given vertices).  The mesh is refined until the
    mean-value embedding passes the all-triangles-CCW certificate.
    """
    D = region if isinstance(region, JordanDomain) else JordanDomain(PolyArc(as_points(region), closed=True))
    poly = D.vertices
    tol = 1e-9 * D.diameter
    poly, ia = _insert_boundary_point(poly, np.asarray(anchorA, float), tol)
    poly, ib = _insert_boundary_point(poly, np.asarray(anchorB, float), tol)
    if ia == ib:
        raise InvalidGeometry("anchors coincide")
    # re-locate A after B's insertion may have shifted indices
    ia = int(np.argmin(np.linalg.norm(poly - np.asarray(anchorA, float), axis=1)))
    perim = PolyArc(poly, closed=True).length
    if boundary_step == 0.0:
        boundary_step = perim / 96.0
    if boundary_step:
        loop, par = subdivide_loop(poly, boundary_step)
        ia = int(np.nonzero(par == ia)[0][0])
        ib = int(np.nonzero(par == ib)[0][0])
        poly = loop
    # rotate so that A is vertex 0
    poly = np.roll(poly, -ia, axis=0)
    ib = (ib - ia) % len(poly)
    ia = 0
    h = np.median(np.linalg.norm(np.roll(poly, -1, axis=0) - poly, axis=1))
    area = max_area or max(0.5 * h * h, 1e-4 * abs(signed_area(poly)))
    for r in range(max_refinements + 1):
        mesh = mesh_polygon(poly, max_area=area, min_angle=min_angle, steiner_on_boundary=steiner_on_boundary)
        loop = list(mesh.boundary_loop)
        kb = loop.index(ib)
        xy = mesh.vertices[loop]
        seg = np.linalg.norm(np.diff(np.vstack([xy, xy[:1]]), axis=0), axis=1)
        low_len = seg[:kb].sum()
        up_len = seg[kb:].sum()
        ang = np.empty(len(loop))
        c = np.r_[0.0, np.cumsum(seg)]
        ang[:kb + 1] = np.pi + np.pi * c[:kb + 1] / low_len
        ang[kb:] = 2 * np.pi + np.pi * (c[kb:len(loop)] - low_len) / up_len
        ang[kb] = 0.0
        pos = np.c_[np.cos(ang), np.sin(ang)]
        pos[0] = (-1.0, 0.0)
        pos[kb] = (1.0, 0.0)
        model = convex_combination_solve(mesh.vertices, mesh.triangles, np.array(loop), pos)
        if embedding_certified(model, mesh.triangles):
            return DiskChart(mesh, model, (0, ib), len(poly), r)
        area *= 0.25
    raise MeshRefinementExceeded(f"no certified disk embedding after {max_refinements} refinements")


def disk_chart_with_boundary(poly, boundary_model: np.ndarray, anchors: tuple[int, int] = (0, 1),
                             max_area: float | None = None, max_refinements: int = 4,
                             min_angle: float = 25.0) -> DiskChart:
    """Disk chart with prescribed model positions for the polygon vertices.

    ``boundary_model`` must be a convex CCW polygon; the mesh adds no
    boundary points, so two charts given the same vertex list and model
    positions agree exactly along their common boundary.
    """
    poly = as_points(poly)
    boundary_model = as_points(boundary_model)
    if len(boundary_model) != len(poly):
        raise InvalidGeometry("one model position is needed per polygon vertex")
    h = np.median(np.linalg.norm(np.roll(poly, -1, axis=0) - poly, axis=1))
    area = max_area or max(0.5 * h * h, 1e-4 * abs(signed_area(poly)))
    for r in range(max_refinements + 1):
        mesh = mesh_polygon(poly, max_area=area, min_angle=min_angle, steiner_on_boundary=False)
        loop = np.asarray(mesh.boundary_loop)
        if len(loop) != len(poly) or not np.array_equal(np.sort(loop), np.arange(len(poly))):
            raise InvalidGeometry("mesher changed the boundary")
        model = convex_combination_solve(mesh.vertices, mesh.triangles, loop, boundary_model[loop])
        if embedding_certified(model, mesh.triangles):
            return DiskChart(mesh, model, anchors, len(poly), r)
        area *= 0.25
    raise MeshRefinementExceeded(f"no certified disk embedding after {max_refinements} refinements")


def _interior_point(poly: np.ndarray) -> np.ndarray:
    m = mesh_polygon(poly, min_angle=0.0)
    P = m.vertices[m.triangles]
    e1, e2 = P[:, 1] - P[:, 0], P[:, 2] - P[:, 0]
    a = np.abs(e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
    return P[int(np.argmax(a))].mean(axis=0)


@dataclass(frozen=True, eq=False)
class AnnulusChart:
    """PL homeomorphism from the region between a Jordan polygon and a big circle
    onto the rectangle [0,1] x [0,1] with the sides Y=0 and Y=1 glued.

    X is the radial coordinate (0 on the inner polygon, 1 on the outer
    circle), Y the angular one.  Beyond the outer polygon the chart continues
    along rays from ``center``, with X = 1 + distance / H.
    """

    mesh: Triangulation  # world mesh; cut vertices duplicated
    model: np.ndarray
    center: np.ndarray
    R: float
    H: float
    outer: np.ndarray  # outer polygon vertices (CCW)
    outer_Y0: float  # PL angular parameter of the cut's outer end
    inner_input: np.ndarray  # the inner polygon as given
    inner_theta: np.ndarray  # Y value per inner input vertex
    cut: np.ndarray  # mesh indices of the cut path inner -> outer (left copies)
    refinements: int
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def pl(self) -> PLMap:
        if "pl" not in self._cache:
            self._cache["pl"] = PLMap(self.mesh.vertices, self.model, self.mesh.triangles)
        return self._cache["pl"]

    def _outer_Y(self, k: np.ndarray, t: np.ndarray) -> np.ndarray:
        M = len(self.outer)
        return ((k + t) / M - self.outer_Y0) % 1.0

    def _ray_hit(self, pts: np.ndarray):
        """Edge index and fraction where the ray centre -> pts crosses the outer polygon."""
        M = len(self.outer)
        d = pts - self.center
        phi = np.arctan2(d[:, 1], d[:, 0])
        vphi = np.arctan2(self.outer[:, 1] - self.center[1], self.outer[:, 0] - self.center[0])
        base = vphi[0]
        rel = (phi - base) % (2 * np.pi)
        vrel = (vphi - base) % (2 * np.pi)
        k = np.clip(np.searchsorted(vrel, rel, side="right") - 1, 0, M - 1)
        a = self.outer[k] - self.center
        b = self.outer[(k + 1) % M] - self.center
        # solve a + t (b - a) parallel to d
        e = b - a
        den = d[:, 0] * e[:, 1] - d[:, 1] * e[:, 0]
        t = -(d[:, 0] * a[:, 1] - d[:, 1] * a[:, 0]) / den
        t = np.clip(t, 0.0, 1.0)
        q = self.center + a + t[:, None] * e
        return k, t, q

    def to_model(self, pts) -> np.ndarray:
        """(X, Y) per point; NaN inside the inner polygon."""
        pts = np.asarray(pts, float).reshape(-1, 2)
        out = self.pl.forward(pts)
        miss = np.nonzero(~np.isfinite(out[:, 0]))[0]
        if len(miss):
            k, t, q = self._ray_hit(pts[miss])
            r_q = np.linalg.norm(q - self.center, axis=1)
            r_p = np.linalg.norm(pts[miss] - self.center, axis=1)
            beyond = r_p >= r_q * (1 - 1e-12)
            idx = miss[beyond]
            out[idx, 0] = 1.0 + np.maximum(r_p[beyond] - r_q[beyond], 0.0) / self.H
            out[idx, 1] = self._outer_Y(k[beyond], t[beyond])
        out[:, 1] = np.where(np.isfinite(out[:, 1]), out[:, 1] % 1.0, np.nan)
        return out

    def to_world(self, XY) -> np.ndarray:
        XY = np.asarray(XY, float).reshape(-1, 2)
        X = XY[:, 0]
        Y = XY[:, 1] % 1.0
        out = np.full((len(XY), 2), np.nan)
        inside = X <= 1.0
        if np.any(inside):
            out[inside] = self.pl.inverse(np.c_[np.clip(X[inside], 0.0, 1.0), Y[inside]])
        far = np.nonzero(~inside & np.isfinite(X))[0]
        if len(far):
            M = len(self.outer)
            u = ((Y[far] + self.outer_Y0) % 1.0) * M
            k = np.floor(u).astype(int) % M
            t = u - np.floor(u)
            q = self.outer[k] + t[:, None] * (self.outer[(k + 1) % M] - self.outer[k])
            d = q - self.center
            d /= np.linalg.norm(d, axis=1)[:, None]
            out[far] = q + ((X[far] - 1.0) * self.H)[:, None] * d
        return out

    def inner_Y(self, par) -> np.ndarray:
        """Y of inner-polygon points given by fractional input-vertex parameter."""
        return lerp_periodic(self.inner_theta, par, 1.0)


def _split_dividing_edges(V: list, T: np.ndarray, model: dict[int, tuple[float, float]]):
    """Split interior edges whose endpoints are pinned on one straight model side."""
    V = [np.asarray(v, float) for v in V]
    while True:
        e = np.vstack([T[:, [0, 1]], T[:, [1, 2]], T[:, [2, 0]]])
        owner = np.repeat(np.arange(len(T))[None], 3, axis=0).ravel()
        key = np.sort(e, axis=1)
        order = np.lexsort((key[:, 1], key[:, 0]))
        key, owner = key[order], owner[order]
        dup = np.nonzero(np.all(key[1:] == key[:-1], axis=1))[0]
        bad = []
        for d in dup:
            a, b = int(key[d, 0]), int(key[d, 1])
            if a in model and b in model:
                pa, pb = model[a], model[b]
                if (pa[0] == pb[0] and pa[0] in (0.0, 1.0)) or (pa[1] == pb[1] and pa[1] in (0.0, 1.0)):
                    bad.append((a, b, int(owner[d]), int(owner[d + 1])))
        if not bad:
            return V, T
        T = T.tolist()
        drop = set()
        for a, b, t1, t2 in bad:
            if t1 in drop or t2 in drop:
                continue
            m = len(V)
            V.append(0.5 * (V[a] + V[b]))
            for tk in (t1, t2):
                tri = T[tk]
                c = next(v for v in tri if v not in (a, b))
                # keep orientation: replace a (resp. b) by m in a copy each
                T.append([m if v == a else v for v in tri])
                T.append([m if v == b else v for v in tri])
                drop.add(tk)
            _ = c
        T = np.array([t for k, t in enumerate(T) if k not in drop], np.int64)


def annulus_chart(inner, center=None, R: float | None = None, n_outer: int = 64,
                  inner_theta: np.ndarray | None = None, start: int | None = None,
                  max_area: float | None = None, H: float | None = None,
                  max_refinements: int = 3, min_angle: float = 25.0) -> AnnulusChart:
    """Rectangle chart of the annulus between polygon ``inner`` (CCW) and an
    ``n_outer``-gon of radius ``R`` about ``center``.

    ``inner_theta`` gives the angular coordinate per inner vertex (strictly
    increasing from 0 at ``start``); the default is normalised arclength
    from the rightmost vertex.
    """
    inner = as_points(inner)
    n_in = len(inner)
    lo, hi = inner.min(axis=0), inner.max(axis=0)
    center = 0.5 * (lo + hi) if center is None else np.asarray(center, float)
    diam = float(np.linalg.norm(hi - lo))
    R = 3.0 * diam if R is None else float(R)
    H = R if H is None else float(H)
    if np.max(np.linalg.norm(inner - center, axis=1)) >= R * np.cos(np.pi / n_outer):
        raise InvalidGeometry("outer circle does not enclose the inner polygon")
    if start is None:
        start = int(np.argmax(inner[:, 0] - 1e-9 * inner[:, 1]))
    if inner_theta is None:
        seg = np.linalg.norm(np.roll(inner, -1, axis=0) - inner, axis=1)
        c = np.r_[0.0, np.cumsum(seg)][:-1]
        theta = ((c - c[start]) / seg.sum()) % 1.0
    else:
        theta = np.asarray(inner_theta, float) % 1.0
        theta = (theta - theta[start]) % 1.0
    outer = regular_polygon(n_outer, R, center)
    hole = _interior_point(inner)
    h_in = np.median(np.linalg.norm(np.roll(inner, -1, axis=0) - inner, axis=1))
    area = max_area
    for r in range(max_refinements + 1):
        mesh = mesh_polygon(outer, max_area=area, holes=[inner], hole_points=[hole], min_angle=min_angle)
        chart = _build_annulus(mesh, inner, theta, start, outer, center, R, H, r)
        if chart is not None:
            return chart
        area = (area or 4 * R * R) * 0.25 if area else 50.0 * h_in * h_in
    raise MeshRefinementExceeded(f"no certified annulus embedding after {max_refinements} refinements")


def _build_annulus(mesh, inner, theta, start, outer, center, R, H, refinements):
    V = mesh.vertices
    T = mesh.triangles
    n_out, n_in = len(outer), len(inner)
    in_loop = mesh.holes[0][::-1]  # CCW around the hole
    out_loop = mesh.boundary_loop
    n = len(V)
    bmask = np.zeros(n, bool)
    bmask[in_loop] = True
    bmask[out_loop] = True
    outer_set = np.zeros(n, bool)
    outer_set[out_loop] = True
    s_idx = n_out + start  # mesh index of the inner start vertex
    # graph for the cut: interior vertices, the start, and outer vertices as sinks
    E = np.sort(np.vstack([T[:, [0, 1]], T[:, [1, 2]], T[:, [2, 0]]]), axis=1)
    E = np.unique(E, axis=0)
    a, b = E[:, 0], E[:, 1]
    ok_a = ~bmask[a] | (a == s_idx) | outer_set[a]
    ok_b = ~bmask[b] | (b == s_idx) | outer_set[b]
    keep = ok_a & ok_b & ~(outer_set[a] & outer_set[b]) & ~((a == s_idx) & bmask[b] & ~outer_set[b]) \
        & ~((b == s_idx) & bmask[a] & ~outer_set[a])
    a, b = a[keep], b[keep]
    w = np.linalg.norm(V[a] - V[b], axis=1)
    sink = n
    oa = np.nonzero(outer_set)[0]
    G = sparse.coo_matrix((np.r_[w, w, np.full(len(oa), 1e-300)],
                           (np.r_[a, b, oa], np.r_[b, a, np.full(len(oa), sink)])), shape=(n + 1, n + 1)).tocsr()
    dist, pred = csgraph.dijkstra(G, directed=True, indices=s_idx, return_predecessors=True)
    if not np.isfinite(dist[sink]):
        raise InvalidGeometry("no cut path from the inner to the outer boundary")
    path = []
    v = pred[sink]
    while v != s_idx:
        path.append(int(v))
        v = pred[v]
    path.append(s_idx)
    path = path[::-1]
    # split triangles around the path into left and right sides
    on_path = {v: k for k, v in enumerate(path)}
    pairs = set()
    for k in range(len(path) - 1):
        pairs.add((path[k], path[k + 1]))
        pairs.add((path[k + 1], path[k]))
    inc: dict[int, list[int]] = {v: [] for v in path}
    for ti, tri in enumerate(T):
        for v in tri:
            if int(v) in inc:
                inc[int(v)].append(ti)
    tri_edges = {}
    for ti, tri in enumerate(T):
        for i in range(3):
            tri_edges[(int(tri[i]), int(tri[(i + 1) % 3]))] = ti
    right: dict[int, set] = {}
    for k, v in enumerate(path):
        # seed: triangle on the left of the directed path edge at v
        if k < len(path) - 1:
            seed = tri_edges.get((v, path[k + 1]))
        else:
            seed = tri_edges.get((path[k - 1], v))
        if seed is None:
            return None
        left = {seed}
        stack = [seed]
        while stack:
            t = stack.pop()
            for u in T[t]:
                u = int(u)
                if u == v or (v, u) in pairs:
                    continue
                for nb in (tri_edges.get((u, v)), tri_edges.get((v, u))):
                    if nb is not None and nb not in left and v in T[nb]:
                        left.add(nb)
                        stack.append(nb)
        right[v] = set(inc[v]) - left
    V2 = list(V)
    copy = {}
    for v in path:
        copy[v] = len(V2)
        V2.append(V[v].copy())
    T2 = T.copy()
    for v in path:
        for t in right[v]:
            T2[t][T2[t] == v] = copy[v]
    # model positions of boundary vertices
    model: dict[int, tuple[float, float]] = {}
    ipar = loop_input_parameter(V[in_loop], in_loop, n_in, offset=n_out)
    thY = lerp_periodic(theta, ipar, 1.0)
    for v, y in zip(in_loop.tolist(), thY.tolist()):
        model[v] = (0.0, y)
    opar = loop_input_parameter(V[out_loop], out_loop, n_out, offset=0)
    end = path[-1]
    Y0 = float(opar[list(out_loop).index(end)]) / n_out
    for v, p in zip(out_loop.tolist(), opar.tolist()):
        model[v] = (1.0, (p / n_out - Y0) % 1.0)
    cl = np.r_[0.0, np.cumsum(np.linalg.norm(np.diff(V[path], axis=0), axis=1))]
    cl /= cl[-1]
    for v, x in zip(path, cl.tolist()):
        model[v] = (x, 0.0)
        model[copy[v]] = (x, 1.0)
    V2, T2 = _split_dividing_edges(V2, T2, model)
    V2 = np.array(V2)
    fixed = np.array(sorted(model))
    pos = np.array([model[k] for k in fixed])
    M = convex_combination_solve(V2, T2, fixed, pos)
    if not embedding_certified(M, T2):
        return None
    wmesh = Triangulation(V2, T2, out_loop, (in_loop,))
    return AnnulusChart(wmesh, M, center, R, H, outer, Y0, inner, theta, np.array(path), refinements)
