"""Reduce a disconnected intersection D n f(D) to one component C by gluing.

E = f(D) splits along the arcs gamma_i = alpha pieces of dC into C and lobes
C_i.  Each C_i is carried by a PL map g_i onto a thin bump over gamma_i
outside D, built in an exterior chart of D, so that f~ = g o f maps D onto a
domain meeting D exactly in C.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ContainmentViolation, DegenerateGamma
from .extension.charts import AnnulusChart, DiskChart, annulus_chart, disk_chart_with_boundary, schoenflies_chart
from .geom.boolean import ALPHA, IntersectionComponent, intersect_domains, lobes
from .geom.neighborhood import set_distance
from .geom.polygon import JordanDomain, PolyArc, loop_parameter, validate_jordan
from .pl.homeo import MapHandle, PLHomeo

TAU_FIX = 1e-8


def _subdivide_open(chain: np.ndarray, h: float) -> np.ndarray:
    out = [chain[:1]]
    for a, b in zip(chain[:-1], chain[1:]):
        k = max(1, int(math.ceil(np.linalg.norm(b - a) / h)))
        t = (np.arange(1, k + 1) / k)[:, None]
        out.append(a + t * (b - a))
    return np.vstack(out)


def _lipschitz(chart: DiskChart) -> tuple[float, float]:
    J = chart.pl.jacobians()
    return (float(np.linalg.norm(J, ord=2, axis=(1, 2)).max()),
            float(np.linalg.norm(np.linalg.inv(J), ord=2, axis=(1, 2)).max()))


@dataclass(frozen=True, eq=False)
class GlueMap:
    """g_i: lobe C_i -> bump C~_i through two disk charts sharing gamma_i."""

    lobe: JordanDomain
    bump: JordanDomain
    gamma: np.ndarray  # common boundary polyline, a -> b
    src: DiskChart
    dst: DiskChart

    def forward(self, pts) -> np.ndarray:
        return self.dst.to_world(self.src.to_model(pts))

    def inverse(self, pts) -> np.ndarray:
        return self.src.to_world(self.dst.to_model(pts))

    @property
    def lipschitz(self) -> float:
        return _lipschitz(self.src)[0] * _lipschitz(self.dst)[1]

    @property
    def inverse_lipschitz(self) -> float:
        return _lipschitz(self.dst)[0] * _lipschitz(self.src)[1]

    def orientation_certified(self) -> bool:
        from .extension.charts import embedding_certified

        return embedding_certified(self.src.model, self.src.mesh.triangles) and \
            embedding_certified(self.dst.model, self.dst.mesh.triangles)


@dataclass(frozen=True, eq=False)
class ReducedMap(MapHandle):
    """f~ = g o f with g the identity on C and g_i on the lobe C_i."""

    f: PLHomeo
    component: JordanDomain
    glue: tuple[GlueMap, ...]
    image: JordanDomain
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def domain(self) -> JordanDomain:
        return self.f.domain

    @property
    def lipschitz(self) -> float:
        g = max([1.0] + [gi.lipschitz for gi in self.glue])
        return self.f.lipschitz * g

    @property
    def displacement_lipschitz(self) -> float:
        return self.lipschitz + 1.0

    def apply_glue(self, y: np.ndarray) -> np.ndarray:
        out = np.full_like(y, np.nan)
        ok = np.all(np.isfinite(y), axis=1)
        inC = np.zeros(len(y), bool)
        inC[ok] = self.component.contains(y[ok], closed=True)
        out[inC] = y[inC]
        rest = np.nonzero(ok & ~inC)[0]
        for gi in self.glue:
            if not len(rest):
                break
            hit = gi.lobe.contains(y[rest], closed=True)
            if np.any(hit):
                out[rest[hit]] = gi.forward(y[rest[hit]])
                rest = rest[~hit]
        return out

    def forward(self, pts, strict: bool = False) -> np.ndarray:
        pts = np.asarray(pts, float)
        y = self.f.forward(pts.reshape(-1, 2), strict)
        return self.apply_glue(y).reshape(pts.shape)

    def inverse(self, pts, strict: bool = False) -> np.ndarray:
        pts = np.asarray(pts, float)
        z = pts.reshape(-1, 2)
        y = np.full_like(z, np.nan)
        inC = self.component.contains(z, closed=True)
        y[inC] = z[inC]
        rest = np.nonzero(~inC)[0]
        for gi in self.glue:
            if not len(rest):
                break
            hit = gi.bump.contains(z[rest], closed=True)
            if np.any(hit):
                y[rest[hit]] = gi.inverse(z[rest[hit]])
                rest = rest[~hit]
        return self.f.inverse(y, strict).reshape(pts.shape)


@dataclass(frozen=True, eq=False)
class ReductionResult:
    normalizer: DiskChart
    exterior: AnnulusChart
    component: IntersectionComponent
    gammaArcs: tuple[PolyArc, ...]
    gammaMidpoints: np.ndarray
    gammaIntervals: np.ndarray  # angular (Y) interval per gamma in the exterior chart
    bumpHeights: np.ndarray
    halfDisks: tuple[JordanDomain, ...]
    glueMaps: tuple[GlueMap, ...]
    reducedMap: ReducedMap

    @property
    def reducedImage(self) -> JordanDomain:
        return self.reducedMap.image

    def half_disk_separation(self) -> float:
        """Minimum pairwise distance of the half-disks (inf for fewer than two)."""
        d = math.inf
        H = self.halfDisks
        for i in range(len(H)):
            for j in range(i + 1, len(H)):
                d = min(d, set_distance(H[i].boundary, H[j].boundary))
        return d

    def reduced_components(self) -> list[IntersectionComponent]:
        return intersect_domains(self.reducedMap.domain, self.reducedImage)


def _gamma_pieces(C: IntersectionComponent):
    out = []
    for p in C.pieces:
        if p.label != ALPHA:
            continue
        if p.closed:
            raise ContainmentViolation("D lies inside E along this component; nothing to reduce")
        out.append(p)
    return out


def reduce_to_connected(f: PLHomeo, C: IntersectionComponent, bump_samples: int = 48,
                        lobe_step: float | None = None) -> ReductionResult:
    """Glue construction making f~(D) n D = C.

    Bumps sit over the gamma_i in the exterior chart of D with heights
    min(0.4 * neighbouring gap, 0.25 * min midpoint separation) in the angular
    coordinate, so they are pairwise disjoint and meet D only in gamma_i.
    """
    D, E = f.domain, f.image
    ov = C.overlay
    pieces = _gamma_pieces(C)
    lob = [L for L in lobes(D, E, C) if L.side == "A"]
    normal = _normalizer(D)
    ext = annulus_chart(D.vertices)
    Dv = D.vertices

    # angular intervals of the gammas on dD
    Y = []
    for p in pieces:
        ends = ov.xy[[p.nodes[0], p.nodes[-1]]]
        ya, yb = ext.inner_Y(loop_parameter(Dv, ends))
        if yb <= ya:
            yb += 1.0
        if yb - ya < 1e-9:
            raise DegenerateGamma(f"gamma at {ends[0].tolist()} is below resolution")
        Y.append((ya, yb))
    Y = np.array(Y).reshape(-1, 2)
    n = len(Y)
    heights = np.zeros(n)
    mids = 0.5 * (Y[:, 0] + Y[:, 1]) % 1.0
    if n:
        order = np.argsort(Y[:, 0])
        gap_after = np.empty(n)
        for k, i in enumerate(order):
            j = order[(k + 1) % n]
            g = (Y[j, 0] - Y[i, 1]) % 1.0 if n > 1 else 1.0 - (Y[i, 1] - Y[i, 0])
            gap_after[i] = g
        gap_before = np.empty(n)
        for k, i in enumerate(order):
            gap_before[i] = gap_after[order[(k - 1) % n]]
        gap = np.minimum(gap_after, gap_before)
        if n > 1:
            dm = np.abs(mids[:, None] - mids[None])
            dm = np.minimum(dm, 1.0 - dm)
            sep = dm[~np.eye(n, dtype=bool)].min()
        else:
            sep = math.inf
        heights = np.minimum(np.minimum(0.4 * gap, 0.25 * sep), 0.5)
        if np.any(heights < 1e-9):
            raise DegenerateGamma("gammas are too close to place disjoint half-disks")

    glue, bumps, arcs, mid_pts = [], [], [], []
    for p, (ya, yb), h in zip(pieces, Y, heights):
        a, b = p.nodes[0], p.nodes[-1]
        lobe = next((L for L in lob if L.nodes[0] == a and L.nodes[L.n_outer - 1] == b), None)
        if lobe is None:
            raise ContainmentViolation(f"no lobe over the gamma arc starting at node {a}")
        gamma_raw = ov.xy[list(p.nodes)]
        step = lobe_step or PolyArc(lobe.region.vertices, closed=True).length / 96.0
        gamma = _subdivide_open(gamma_raw, step)
        outer = _subdivide_open(ov.xy[list(lobe.outer_nodes)], step)
        crest = _crest(ext, ya, yb, h, _fractions(outer), bump_samples)
        lobe_poly = validate_jordan(PolyArc(np.vstack([outer, gamma[::-1][1:-1]]), closed=True), D.tau_rel)
        bump_poly = validate_jordan(PolyArc(np.vstack([gamma[:1], crest, gamma[::-1][:-1]]), closed=True),
                                    D.tau_rel)
        src = schoenflies_chart(lobe_poly, gamma[0], gamma[-1], boundary_step=None, steiner_on_boundary=False)
        if len(src.mesh.boundary_loop) != len(lobe_poly.vertices):
            raise ContainmentViolation("lobe chart altered the lobe boundary")
        dst = disk_chart_with_boundary(bump_poly.vertices, src.model[: len(lobe_poly.vertices)], src.anchors)
        glue.append(GlueMap(lobe_poly, bump_poly, gamma, src, dst))
        bumps.append(bump_poly)
        arcs.append(PolyArc(gamma_raw))
        mid_pts.append(ext.to_world(np.array([[0.0, 0.5 * (ya + yb)]]))[0])

    Et = _reduced_image(C, pieces, glue, D)
    comp = C.domain
    fmap = ReducedMap(f, comp, tuple(glue), Et)
    return ReductionResult(normal, ext, C, tuple(arcs), np.array(mid_pts).reshape(-1, 2), Y, heights,
                           tuple(bumps), tuple(glue), fmap)


def _fractions(chain: np.ndarray) -> np.ndarray:
    seg = np.linalg.norm(np.diff(chain, axis=0), axis=1)
    c = np.r_[0.0, np.cumsum(seg)]
    return c / c[-1]


def _crest(ext: AnnulusChart, ya: float, yb: float, h: float, fractions: np.ndarray, dense: int) -> np.ndarray:
    """Interior crest points of the bump X = h sin(pi u) over Y in [ya, yb], one per interior fraction.

    Points sit at the given arclength fractions of a dense sampling of the
    crest, so the crest has as many vertices as the lobe's outer arc.
    """
    u = np.linspace(0.0, 1.0, max(dense, 8 * len(fractions)))
    pts = ext.to_world(np.c_[h * np.sin(np.pi * u), ya + u * (yb - ya)])
    fr = _fractions(pts)
    inner = fractions[1:-1]
    return np.c_[np.interp(inner, fr, pts[:, 0]), np.interp(inner, fr, pts[:, 1])]


def _normalizer(D: JordanDomain) -> DiskChart:
    """Disk chart of D anchored at the two boundary vertices realising the diameter."""
    V = D.vertices
    d = np.linalg.norm(V[:, None] - V[None], axis=2)
    i, j = np.unravel_index(int(np.argmax(d)), d.shape)
    i, j = (int(i), int(j)) if i < j else (int(j), int(i))
    return schoenflies_chart(D, V[i], V[j])


def _reduced_image(C: IntersectionComponent, pieces, glue, D: JordanDomain) -> JordanDomain:
    """dE~: the boundary of C with every gamma replaced by its bump crest."""
    ov = C.overlay
    crest = {(p.nodes[0], p.nodes[-1]): g for p, g in zip(pieces, glue)}
    pts = []
    for p in C.pieces:
        key = (p.nodes[0], p.nodes[-1])
        if p.label == ALPHA and key in crest:
            g = crest[key]
            V = g.bump.vertices
            k = len(V) - len(g.gamma) + 2  # gamma[0], crest..., (gamma reversed without its first point)
            pts.append(V[: k - 1])
        else:
            pts.append(ov.xy[list(p.nodes[:-1])] if not p.closed else ov.xy[list(p.nodes)])
    return validate_jordan(PolyArc(np.vstack(pts), closed=True), D.tau_rel)


@dataclass(frozen=True)
class TransferCheck:
    ok: bool
    residual: float
    diagnostic: str

    def __bool__(self) -> bool:
        return self.ok


def fixed_point_transfer_check(f, C, result: ReductionResult | None, p, tol: float = TAU_FIX) -> TransferCheck:
    """A fixed point of f~ in C is a fixed point of f: f~ = f on f^-1(C)."""
    p = np.asarray(p, float).reshape(1, 2)
    dom = C.domain if isinstance(C, IntersectionComponent) else C
    if not dom.contains(p, closed=True)[0]:
        return TransferCheck(False, math.nan, f"point {p[0].tolist()} is outside the component")
    fp = f.forward(p)[0]
    r = float(np.linalg.norm(fp - p[0]))
    if not math.isfinite(r):
        return TransferCheck(False, r, "f is undefined at the point")
    if result is not None:
        rt = float(np.linalg.norm(result.reducedMap.forward(p)[0] - p[0]))
        if r <= tol and not rt <= tol:
            return TransferCheck(False, r, f"f~ disagrees with f at the point (|f~(p) - p| = {rt:.3g})")
    if r > tol:
        return TransferCheck(False, r, f"|f(p) - p| = {r:.3g} exceeds {tol:.1g}")
    return TransferCheck(True, r, "fixed point of f in the component")
