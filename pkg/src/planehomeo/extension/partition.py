"""Arc partition of the plane minus int(D n E) with the lambda / pi functions.

Every point outside int(D n E) lies on exactly one arc L^z, indexed by its
base point z on the union boundary d(D u E).  Inside a lobe (a component of
E \\ D or D \\ E) the arc is the pullback of a vertical chord of the lobe's
disk chart; outside D u E it is the pullback of a radial segment of the
exterior annulus chart, continued along rays beyond the truncation polygon.

Arcs are identified by ``theta``, the angular coordinate of z in the
exterior chart (in [0, 1)).  Lambda values are model-space lengths: chord
length in the disk model inside lobes, ``X * H`` in the annulus model.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from ..errors import (
    ContainmentViolation,
    InsideIntersection,
    NonGenericContact,
    NotConnectedIntersection,
    OutsideTruncation,
    PartitionFailure,
    PreconditionViolation,
)
from ..geom.boolean import ALPHA, BETA, D_OUTER, E_OUTER, SHARED, Lobe, Overlay, lobes
from ..geom.polygon import JordanDomain, Location, loop_parameter, loop_point
from .charts import AnnulusChart, DiskChart, annulus_chart, lerp_periodic, schoenflies_chart


def _wrap_into(q, start: float, period: float):
    """Shift ``q`` by multiples of ``period`` into [start, start + period)."""
    return start + np.mod(np.asarray(q, float) - start, period)


@dataclass(frozen=True, eq=False)
class LobeChart:
    """A lobe with its disk chart and the two boundary chains as monotone tables.

    The upper chain is the inner arc (on the family's base boundary), the
    lower chain the outer arc (on the union boundary).  ``u_up`` is the base
    boundary parameter, ``th_low`` the exterior angle, both unwrapped.
    """

    lobe: Lobe
    chart: DiskChart
    xs_up: np.ndarray
    ys_up: np.ndarray
    W_up: np.ndarray
    u_up: np.ndarray
    xs_low: np.ndarray
    ys_low: np.ndarray
    W_low: np.ndarray
    th_low: np.ndarray

    def y_up(self, s):
        return np.interp(s, self.xs_up, self.ys_up)

    def y_low(self, s):
        return np.interp(s, self.xs_low, self.ys_low)

    def chord_length(self, s):
        return self.y_up(s) - self.y_low(s)

    def s_from_u(self, u, period):
        return np.interp(_wrap_into(u, self.u_up[0], period), self.u_up, self.xs_up)

    def u_from_s(self, s, period):
        return np.mod(np.interp(s, self.xs_up, self.u_up), period)

    def s_from_theta(self, th):
        return np.interp(_wrap_into(th, self.th_low[0], 1.0), self.th_low, self.xs_low)

    def theta_from_s(self, s):
        return np.mod(np.interp(s, self.xs_low, self.th_low), 1.0)

    def up_point(self, s):
        return np.c_[np.interp(s, self.xs_up, self.W_up[:, 0]), np.interp(s, self.xs_up, self.W_up[:, 1])]

    def low_point(self, s):
        return np.c_[np.interp(s, self.xs_low, self.W_low[:, 0]), np.interp(s, self.xs_low, self.W_low[:, 1])]


@dataclass(frozen=True, eq=False)
class ArcFamily:
    """Transport data for one side: arcs measured from the base boundary (dD or dE).

    ``project`` sends a point outside int(base) to (u, lambda, theta) and
    ``lift`` inverts it, where u is the vertex-index parameter of the arc's
    foot on the base boundary.
    """

    base: JordanDomain
    lobes: tuple[LobeChart, ...]
    # base boundary edge table (overlay sub-edges in boundary order)
    be_s0: np.ndarray
    be_s1: np.ndarray
    be_lobe: np.ndarray  # lobe index, -1 for edges on the union boundary
    be_union: np.ndarray  # union loop index of the edge's first node (direct edges)
    # union loop edge table
    ue_lobe: np.ndarray  # lobe index if the edge is a lobe outer edge, else -1
    ue_u0: np.ndarray
    ue_du: np.ndarray
    exterior: AnnulusChart
    union_theta: np.ndarray  # unwrapped theta per union node, closing value appended
    H: float

    @property
    def period(self) -> float:
        return float(len(self.base.vertices))

    def union_par_from_theta(self, th):
        th = _wrap_into(th, self.union_theta[0], 1.0)
        return np.interp(th, self.union_theta, np.arange(len(self.union_theta), dtype=float))

    def theta_from_union_par(self, par):
        n = len(self.union_theta) - 1
        return lerp_periodic(self.union_theta[:-1] % 1.0, np.mod(par, n), 1.0)

    def project(self, pts) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(u, lambda, theta) for points outside int(base); NaN where undefined."""
        pts = np.asarray(pts, float).reshape(-1, 2)
        N = len(pts)
        u = np.full(N, np.nan)
        lam = np.full(N, np.nan)
        th = np.full(N, np.nan)
        todo = np.ones(N, bool)
        for lc in self.lobes:
            idx = np.nonzero(todo)[0]
            if not len(idx):
                break
            m = lc.chart.to_model(pts[idx])
            ok = np.isfinite(m[:, 0])
            k = idx[ok]
            s = m[ok, 0]
            u[k] = lc.u_from_s(s, self.period)
            lam[k] = np.maximum(lc.y_up(s) - m[ok, 1], 0.0)
            th[k] = lc.theta_from_s(s)
            todo[k] = False
        idx = np.nonzero(todo)[0]
        if len(idx):
            XY = self.exterior.to_model(pts[idx])
            ok = np.isfinite(XY[:, 0])
            k, X, Y = idx[ok], XY[ok, 0], XY[ok, 1]
            par = self.union_par_from_theta(Y)
            n_union = len(self.ue_lobe)
            e = np.clip(np.floor(par).astype(int), 0, n_union - 1)
            t = par - e
            ll = self.ue_lobe[e]
            direct = ll < 0
            u[k[direct]] = np.mod(self.ue_u0[e[direct]] + t[direct] * self.ue_du[e[direct]], self.period)
            lam[k[direct]] = X[direct] * self.H
            for j in np.unique(ll[~direct]):
                sel = ll == j
                lc = self.lobes[j]
                s = lc.s_from_theta(Y[sel])
                u[k[sel]] = lc.u_from_s(s, self.period)
                lam[k[sel]] = lc.chord_length(s) + X[sel] * self.H
            th[k] = Y
        return u, lam, th

    def _base_edge(self, u):
        u = np.mod(np.asarray(u, float), self.period)
        e = np.clip(np.searchsorted(self.be_s0, u, side="right") - 1, 0, len(self.be_s0) - 1)
        return u, e

    def theta_of_foot(self, u) -> np.ndarray:
        """Arc id of the arc through the base boundary point with parameter u."""
        u, e = self._base_edge(u)
        th = np.empty(len(u))
        ll = self.be_lobe[e]
        direct = ll < 0
        t = (u[direct] - self.be_s0[e[direct]]) / (self.be_s1[e[direct]] - self.be_s0[e[direct]])
        th[direct] = self.theta_from_union_par(self.be_union[e[direct]] + t)
        for j in np.unique(ll[~direct]):
            sel = ll == j
            lc = self.lobes[j]
            th[sel] = lc.theta_from_s(lc.s_from_u(u[sel], self.period))
        return th

    def lift(self, u, lam) -> np.ndarray:
        """The point on the arc with foot parameter u at distance lambda."""
        u, e = self._base_edge(u)
        lam = np.asarray(lam, float).ravel()
        out = np.full((len(u), 2), np.nan)
        ll = self.be_lobe[e]
        direct = ll < 0
        if np.any(direct):
            d = np.nonzero(direct)[0]
            t = (u[d] - self.be_s0[e[d]]) / (self.be_s1[e[d]] - self.be_s0[e[d]])
            th = self.theta_from_union_par(self.be_union[e[d]] + t)
            out[d] = self.exterior.to_world(np.c_[lam[d] / self.H, th])
        for j in np.unique(ll[~direct]):
            sel = np.nonzero(ll == j)[0]
            lc = self.lobes[j]
            s = lc.s_from_u(u[sel], self.period)
            L = lc.chord_length(s)
            inside = lam[sel] <= L
            k = sel[inside]
            if len(k):
                out[k] = lc.chart.to_world(np.c_[s[inside], lc.y_up(s[inside]) - lam[k]])
            k = sel[~inside]
            if len(k):
                so = s[~inside]
                out[k] = self.exterior.to_world(np.c_[(lam[k] - L[~inside]) / self.H, lc.theta_from_s(so)])
        return out

    def foot(self, u) -> np.ndarray:
        u = np.asarray(u, float)
        out = np.full(u.shape + (2,), np.nan)
        ok = np.isfinite(u)
        out[ok] = loop_point(self.base.vertices, u[ok])
        return out


@dataclass(frozen=True)
class ArcProjection:
    theta: float  # continuous arc id in [0, 1)
    arcId: int  # nearest sampled arc
    piD: np.ndarray
    piE: np.ndarray
    lamD: float
    lamE: float


@dataclass(frozen=True, eq=False)
class ArcPartition:
    """The arc family {L^z} for (D, E) with sampled arcs and lambda tables.

    Sampled arc k has base point at theta_k = k / n_arcs; ``arcs[k]`` holds its
    sample points from the foot nearest int(D n E) outwards to the truncation
    circle; ``lambdaD`` / ``lambdaE`` are NaN where the sample is interior to
    D (resp. E).  ``piD`` / ``piE`` are the feet's boundary parameters.
    """

    D: JordanDomain
    E: JordanDomain
    overlay: Overlay
    truncationRadius: float
    center: np.ndarray
    famD: ArcFamily
    famE: ArcFamily
    density: int
    arc_theta: np.ndarray
    arcs: np.ndarray  # (n_arcs, samples, 2)
    lambdaD: np.ndarray  # (n_arcs, samples)
    lambdaE: np.ndarray
    piD: np.ndarray  # (n_arcs,)
    piE: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def R(self) -> float:
        return self.truncationRadius

    @property
    def n_arcs(self) -> int:
        return len(self.arc_theta)

    @property
    def exterior(self) -> AnnulusChart:
        return self.famD.exterior

    @property
    def lobesA(self) -> tuple[LobeChart, ...]:
        return self.famD.lobes

    @property
    def lobesB(self) -> tuple[LobeChart, ...]:
        return self.famE.lobes

    def measure(self, pts) -> dict[str, np.ndarray]:
        """Vectorised projections; entries NaN where undefined, no errors raised."""
        pts = np.asarray(pts, float).reshape(-1, 2)
        outD = self.D.locate(pts) != Location.INSIDE
        outE = self.E.locate(pts) != Location.INSIDE
        N = len(pts)
        uD = np.full(N, np.nan)
        lD = np.full(N, np.nan)
        uE = np.full(N, np.nan)
        lE = np.full(N, np.nan)
        th = np.full(N, np.nan)
        if np.any(outD):
            a, b, c = self.famD.project(pts[outD])
            uD[outD], lD[outD], th[outD] = a, b, c
        if np.any(outE):
            a, b, c = self.famE.project(pts[outE])
            uE[outE], lE[outE] = a, b
            fill = outE.copy()
            fill[outE] = ~np.isfinite(th[outE])
            th[fill] = c[~np.isfinite(th[outE])]
        # feet on the other side: an arc through a point of int D still has a D-foot
        need = np.isfinite(th) & ~np.isfinite(uD)
        if np.any(need):
            uD[need] = self._foot_from_theta(self.famD, th[need])
        need = np.isfinite(th) & ~np.isfinite(uE)
        if np.any(need):
            uE[need] = self._foot_from_theta(self.famE, th[need])
        return {"theta": th, "uD": uD, "uE": uE, "lamD": lD, "lamE": lE,
                "piD": self.famD.foot(uD), "piE": self.famE.foot(uE)}

    @staticmethod
    def _foot_from_theta(fam: ArcFamily, th) -> np.ndarray:
        par = fam.union_par_from_theta(th)
        e = np.clip(np.floor(par).astype(int), 0, len(fam.ue_lobe) - 1)
        t = par - e
        out = np.empty(len(th))
        ll = fam.ue_lobe[e]
        d = ll < 0
        out[d] = np.mod(fam.ue_u0[e[d]] + t[d] * fam.ue_du[e[d]], fam.period)
        for j in np.unique(ll[~d]):
            sel = ll == j
            lc = fam.lobes[j]
            out[sel] = lc.u_from_s(lc.s_from_theta(th[sel]), fam.period)
        return out

    def nearest_arc(self, theta) -> np.ndarray:
        return np.mod(np.round(np.asarray(theta) * self.n_arcs).astype(int), self.n_arcs)

    def to_json(self) -> dict:
        def clean(a):
            return [[None if not np.isfinite(v) else round(float(v), 12) for v in row] for row in a]
        return {
            "format": "planehomeo-partition/1",
            "truncationRadius": self.truncationRadius,
            "center": self.center.tolist(),
            "density": self.density,
            "arcs": [
                {
                    "id": k,
                    "theta": round(float(self.arc_theta[k]), 12),
                    "vertices": np.round(self.arcs[k], 12).tolist(),
                    "lambdaD": clean(self.lambdaD[k : k + 1])[0],
                    "lambdaE": clean(self.lambdaE[k : k + 1])[0],
                    "piD": round(float(self.piD[k]), 12),
                    "piE": round(float(self.piE[k]), 12),
                }
                for k in range(self.n_arcs)
            ],
        }

    def dump(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, separators=(",", ":"))


def project_and_measure(P: ArcPartition, x) -> ArcProjection:
    """Arc id, both feet and both lambda values of a single point."""
    x = np.asarray(x, float).reshape(1, 2)
    if P.D.locate(x)[0] == Location.INSIDE and P.E.locate(x)[0] == Location.INSIDE:
        raise InsideIntersection(f"{x[0].tolist()} lies in int(D n E)")
    if np.linalg.norm(x[0] - P.center) > P.R * (1 + 1e-12):
        raise OutsideTruncation(f"{x[0].tolist()} lies outside the truncation disk of radius {P.R:g}")
    m = P.measure(x)
    th = float(m["theta"][0])
    if not np.isfinite(th):
        raise PartitionFailure(f"no arc found through {x[0].tolist()}")
    return ArcProjection(th, int(P.nearest_arc(th)), m["piD"][0], m["piE"][0],
                         float(m["lamD"][0]), float(m["lamE"][0]))


# construction ------------------------------------------------------------------


def _lobe_chart(lobe: Lobe, base: JordanDomain, union_poly: np.ndarray, union_theta_nodes: np.ndarray,
                boundary_step: float | None) -> LobeChart:
    V = lobe.region.vertices
    chart = schoenflies_chart(lobe.region, V[0], V[lobe.n_outer - 1], boundary_step=boundary_step)
    Wm = chart.mesh.vertices
    up, low = chart.upper_chain, chart.lower_chain
    n = len(base.vertices)
    u_up = np.unwrap(loop_parameter(base.vertices, Wm[up]), period=n)
    if u_up[-1] < u_up[0]:
        raise PartitionFailure("inner arc runs against the base boundary orientation")
    par = loop_parameter(union_poly, Wm[low])
    th = np.unwrap(lerp_periodic(union_theta_nodes, par, 1.0), period=1.0)
    return LobeChart(lobe, chart, chart.model[up, 0], chart.model[up, 1], Wm[up], u_up,
                     chart.model[low, 0], chart.model[low, 1], Wm[low], th)


def _family(base: JordanDomain, edges, lobe_list, lobe_charts, union_nodes, union_labels, outer_label,
            own_u, exterior, union_theta, H) -> ArcFamily:
    pos = {u: k for k, u in enumerate(union_nodes)}
    pair_lobe = {}
    outer_pair = {}
    for j, lb in enumerate(lobe_list):
        inner = lb.inner_nodes
        for a, b in zip(inner[:-1], inner[1:]):
            pair_lobe[(a, b)] = j
        outer = lb.outer_nodes
        for a, b in zip(outer[:-1], outer[1:]):
            outer_pair[(a, b)] = j
    s0, s1, bl, bu = [], [], [], []
    for u, v, lab, a0, a1 in edges:
        if lab == "opp":
            raise NonGenericContact("boundaries run along each other with opposite orientation")
        s0.append(a0)
        s1.append(a1)
        if lab == "in":
            if (u, v) not in pair_lobe:
                raise PartitionFailure("inner boundary edge not covered by a lobe")
            bl.append(pair_lobe[(u, v)])
            bu.append(-1)
        else:
            bl.append(-1)
            bu.append(pos[u])
    n = len(base.vertices)
    m = len(union_nodes)
    ul, u0, du = np.full(m, -1), np.zeros(m), np.zeros(m)
    for k in range(m):
        a, b = union_nodes[k], union_nodes[(k + 1) % m]
        if union_labels[k] == outer_label:
            ul[k] = outer_pair[(a, b)]
        else:
            u0[k] = own_u[a]
            du[k] = (own_u[b] - own_u[a]) % n
            if du[k] == 0:
                du[k] = n
    return ArcFamily(base, tuple(lobe_charts), np.array(s0), np.array(s1), np.array(bl), np.array(bu),
                     ul, u0, du, exterior, union_theta, H)


def build_partition(D: JordanDomain, E: JordanDomain, R: float | None = None, density: int = 256,
                    samples_per_arc: int = 64, lobe_boundary_step: float | None = 0.0,
                    n_outer: int = 64) -> ArcPartition:
    """Arc partition for two Jordan domains with connected intersection.

    ``R`` defaults to three times the diameter of D u E; the truncation disk
    is centred at the centre of the bounding box of D u E.  ``density`` is
    the number of sampled arcs per unit length of the union boundary.
    """
    ov = Overlay(D, E)
    comps = ov.regions("intersection")
    if len(comps) != 1:
        raise NotConnectedIntersection(f"D n E has {len(comps)} components; expected exactly one")
    comp = comps[0]
    labels = {p.label for p in comp.pieces}
    if (ALPHA in labels) != (BETA in labels) or (ALPHA not in labels and labels != {SHARED}):
        raise ContainmentViolation("one domain contains the other; no lobes on both sides")
    uloops = ov.loops("union")
    if len(uloops) != 1:
        raise PartitionFailure(f"union boundary has {len(uloops)} loops")
    loop = uloops[0]
    union_nodes = [u for u, _, _ in loop]
    union_labels = [lab for _, _, lab in loop]
    union_poly = ov.xy[union_nodes]
    allv = np.vstack([D.vertices, E.vertices])
    lo, hi = allv.min(axis=0), allv.max(axis=0)
    center = 0.5 * (lo + hi)
    diam = float(np.linalg.norm(hi - lo))
    if R is None:
        R = 3.0 * diam
    elif R < 3.0 * diam * (1 - 1e-12):
        raise PreconditionViolation(f"truncation radius {R:g} is below 3 x diameter = {3 * diam:g}")
    H = float(R)
    ext = annulus_chart(union_poly, center=center, R=R, n_outer=n_outer, H=H)
    theta_nodes = ext.inner_theta
    start = int(np.argmin(theta_nodes))
    th_unwrapped = np.unwrap(np.r_[theta_nodes, theta_nodes[0]], period=1.0)
    if not np.all(np.diff(th_unwrapped) > 0):
        raise PartitionFailure("exterior angular coordinate is not monotone on the union boundary")
    _ = start
    all_lobes = lobes(D, E, comp)
    A = [lb for lb in all_lobes if lb.side == "A"]
    B = [lb for lb in all_lobes if lb.side == "B"]
    chA = [_lobe_chart(lb, D, union_poly, theta_nodes, lobe_boundary_step) for lb in A]
    chB = [_lobe_chart(lb, E, union_poly, theta_nodes, lobe_boundary_step) for lb in B]
    famD = _family(D, ov.d_edges, A, chA, union_nodes, union_labels, E_OUTER, ov.uD, ext, th_unwrapped, H)
    famE = _family(E, ov.e_edges, B, chB, union_nodes, union_labels, D_OUTER, ov.uE, ext, th_unwrapped, H)
    perim = float(np.linalg.norm(np.roll(union_poly, -1, axis=0) - union_poly, axis=1).sum())
    n_arcs = max(8, int(np.ceil(density * perim)))
    arc_theta = np.arange(n_arcs) / n_arcs
    arcs, lamD, lamE, piD, piE = _sample_arcs(famD, famE, arc_theta, samples_per_arc)
    return ArcPartition(D, E, ov, float(R), center, famD, famE, int(density), arc_theta,
                        arcs, lamD, lamE, piD, piE)


def _sample_arcs(famD: ArcFamily, famE: ArcFamily, arc_theta: np.ndarray, S: int):
    n = len(arc_theta)
    n_chord = S // 3
    n_ray = S - n_chord
    piD = ArcPartition._foot_from_theta(famD, arc_theta)
    piE = ArcPartition._foot_from_theta(famE, arc_theta)
    par = famD.union_par_from_theta(arc_theta)
    e = np.clip(np.floor(par).astype(int), 0, len(famD.ue_lobe) - 1)
    # chord length of each arc inside its lobe (0 for arcs based on shared edges)
    L = np.zeros(n)
    side = np.zeros(n, int)  # 0 shared, 1 chord in an A-lobe, 2 chord in a B-lobe
    for fam, code in ((famD, 1), (famE, 2)):
        ll = fam.ue_lobe[e]
        for j in np.unique(ll[ll >= 0]):
            sel = ll == j
            lc = fam.lobes[j]
            L[sel] = lc.chord_length(lc.s_from_theta(arc_theta[sel]))
            side[sel] = code
    frac_c = np.arange(n_chord) / n_chord
    X = np.linspace(0.0, 1.0, n_ray)
    lam_own = np.where(side[:, None] > 0,
                       np.c_[L[:, None] * frac_c, L[:, None] + X * famD.H],
                       np.linspace(0.0, 1.0, S)[None, :] * famD.H)
    lam_other = np.where(side[:, None] > 0, np.c_[np.full((n, n_chord), np.nan), np.tile(X * famD.H, (n, 1))],
                         lam_own)
    arcs = np.full((n, S, 2), np.nan)
    lamD = np.where((side == 2)[:, None], lam_other, lam_own)
    lamE = np.where((side == 2)[:, None], lam_own, lam_other)
    useE = side == 2
    for fam, sel, foot, lam in ((famD, ~useE, piD, lamD), (famE, useE, piE, lamE)):
        if np.any(sel):
            u = np.repeat(foot[sel], S)
            arcs[sel] = fam.lift(u, lam[sel].ravel()).reshape(-1, S, 2)
    return arcs, lamD, lamE, piD, piE
