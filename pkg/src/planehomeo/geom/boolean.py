"""Overlay of two Jordan polygons: intersection/union loops with labelled pieces.

Both boundaries are split at every contact (proper crossings, vertex touches,
collinear overlaps).  Each sub-edge is classified against the other polygon,
and region boundaries are re-linked from the labelled sub-edges.  Every node
remembers its vertex-index parameter on ``D`` and/or ``E`` so that downstream
code can move between world coordinates and boundary parameters exactly.

Labels used on pieces:

``alpha``    piece of dD lying in int E
``beta``     piece of dE lying in int D
``shared``   piece of dD and dE with both interiors on the same side
``d_outer``  piece of dD outside E (union boundary)
``e_outer``  piece of dE outside D (union boundary)
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from ..errors import ContainmentViolation, InvalidGeometry, NonGenericContact
from .polygon import (
    TAU_PT,
    JordanDomain,
    Location,
    PolyArc,
    bbox_diagonal,
    signed_area,
    validate_jordan,
)
from .predicates import intersecting_segment_pairs, orient, point_segment_distance

ALPHA, BETA, SHARED, D_OUTER, E_OUTER = "alpha", "beta", "shared", "d_outer", "e_outer"


@dataclass(frozen=True)
class Piece:
    label: str
    nodes: tuple[int, ...]
    arc: PolyArc
    closed: bool = False

    @property
    def endpoints(self) -> tuple[np.ndarray, np.ndarray]:
        v = self.arc.vertices
        return v[0], (v[0] if self.closed else v[-1])


class Overlay:
    """Split-and-classify structure shared by intersection, union and lobes."""

    def __init__(self, D: JordanDomain, E: JordanDomain, refine: float | None = None,
                 tau_rel: float = TAU_PT):
        self.D, self.E = D, E
        P, Q = D.vertices, E.vertices
        n, m = len(P), len(Q)
        self.tol = tol = tau_rel * bbox_diagonal(P, Q)
        xy = [tuple(p) for p in P] + [tuple(q) for q in Q]
        uD = [float(i) for i in range(n)] + [math.nan] * m
        uE = [math.nan] * n + [float(j) for j in range(m)]
        parent = list(range(n + m))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        def union(a, b):
            ra, rb = find(a), find(b)
            if ra == rb:
                return
            if rb < ra:
                ra, rb = rb, ra
            parent[rb] = ra
            if math.isnan(uD[ra]):
                uD[ra] = uD[rb]
            if math.isnan(uE[ra]):
                uE[ra] = uE[rb]

        def new_node(p, ud, ue):
            xy.append((float(p[0]), float(p[1])))
            uD.append(ud)
            uE.append(ue)
            parent.append(len(parent))
            return len(parent) - 1

        splitsD = [[] for _ in range(n)]
        splitsE = [[] for _ in range(m)]
        Pn, Qn = np.roll(P, -1, axis=0), np.roll(Q, -1, axis=0)
        ii, jj = intersecting_segment_pairs(P, Pn, Q, Qn, pad=tol)
        lenP = np.linalg.norm(Pn - P, axis=1)
        lenQ = np.linalg.norm(Qn - Q, axis=1)
        for i, j in zip(ii.tolist(), jj.tolist()):
            a0, a1, b0, b1 = P[i], Pn[i], Q[j], Qn[j]
            touched = False
            for pt, node in ((b0, n + j), (b1, n + (j + 1) % m)):
                d, t = point_segment_distance(pt, a0, a1)
                if d <= tol:
                    touched = True
                    if t * lenP[i] <= tol:
                        union(i, node)
                    elif (1 - t) * lenP[i] <= tol:
                        union((i + 1) % n, node)
                    else:
                        splitsD[i].append((float(t), node))
                        uD[node] = i + float(t)
            for pt, node in ((a0, i), (a1, (i + 1) % n)):
                d, t = point_segment_distance(pt, b0, b1)
                if d <= tol:
                    touched = True
                    if t * lenQ[j] <= tol:
                        union(node, n + j)
                    elif (1 - t) * lenQ[j] <= tol:
                        union(node, n + (j + 1) % m)
                    else:
                        splitsE[j].append((float(t), node))
                        uE[node] = j + float(t)
            if touched:
                continue
            o1, o2 = orient(a0, a1, b0), orient(a0, a1, b1)
            o3, o4 = orient(b0, b1, a0), orient(b0, b1, a1)
            if o1 * o2 < 0 and o3 * o4 < 0:
                r = a1 - a0
                s = b1 - b0
                den = r[0] * s[1] - r[1] * s[0]
                qp = b0 - a0
                ta = (qp[0] * s[1] - qp[1] * s[0]) / den
                tb = (qp[0] * r[1] - qp[1] * r[0]) / den
                ta = min(max(ta, 0.0), 1.0)
                tb = min(max(tb, 0.0), 1.0)
                k = new_node(a0 + ta * r, i + ta, j + tb)
                splitsD[i].append((ta, k))
                splitsE[j].append((tb, k))

        roots = [find(k) for k in range(len(parent))]
        self._xy = np.array(xy, float)
        self._uD = np.array(uD, float)
        self._uE = np.array(uE, float)
        for k, r in enumerate(roots):
            if k != r:
                if math.isnan(self._uD[r]):
                    self._uD[r] = self._uD[k]
                if math.isnan(self._uE[r]):
                    self._uE[r] = self._uE[k]

        d_edges = self._chain(splitsD, n, 0, roots)
        e_edges = self._chain(splitsE, m, n, roots)
        self._classify(d_edges, e_edges)
        if refine:
            d_edges, e_edges = self._refine(d_edges, e_edges, refine)
        # chains: lists of (u, v, label, t-interval) in boundary order
        self.d_edges = d_edges
        self.e_edges = e_edges
        self.d_chain = [e[0] for e in d_edges]
        self.e_chain = [e[0] for e in e_edges]
        for chain in (self.d_chain, self.e_chain):
            if len(set(chain)) != len(chain):
                raise NonGenericContact("boundary visits a contact node twice")
        self.d_pos = {u: k for k, u in enumerate(self.d_chain)}
        self.e_pos = {u: k for k, u in enumerate(self.e_chain)}

    # construction helpers -------------------------------------------------

    @staticmethod
    def _chain(splits, count, offset, roots):
        edges = []
        for i in range(count):
            pts = [(0.0, roots[offset + i])] + [(t, roots[k]) for t, k in splits[i]]
            pts.append((1.0, roots[offset + (i + 1) % count]))
            pts.sort(key=lambda p: p[0])
            seq = [pts[0]]
            for t, k in pts[1:]:
                if k != seq[-1][1]:
                    seq.append((t, k))
            for (t0, u), (t1, v) in zip(seq[:-1], seq[1:]):
                edges.append([u, v, None, i + t0, i + t1])
        if not edges:
            raise InvalidGeometry("boundary collapsed during overlay")
        return edges

    def _classify(self, d_edges, e_edges):
        dset = {(e[0], e[1]) for e in d_edges}
        eset = {(e[0], e[1]) for e in e_edges}
        for edges, own, other, dom in ((d_edges, dset, eset, self.E), (e_edges, eset, dset, self.D)):
            pending = []
            for e in edges:
                if (e[0], e[1]) in other:
                    e[2] = "same"
                elif (e[1], e[0]) in other:
                    e[2] = "opp"
                else:
                    pending.append(e)
            if pending:
                mids = np.array([(self._xy[e[0]] + self._xy[e[1]]) / 2 for e in pending])
                loc = dom.locate(mids, tol=self.tol)
                for e, code in zip(pending, loc):
                    if code == Location.BOUNDARY:
                        raise NonGenericContact("sub-edge runs along the other boundary without shared nodes")
                    e[2] = "in" if code == Location.INSIDE else "out"

    def _refine(self, d_edges, e_edges, h):
        shared = {}
        xy = list(map(tuple, self._xy))
        uD = list(self._uD)
        uE = list(self._uE)

        def expand(edges, own_u, other_u):
            out = []
            for u, v, lab, s0, s1 in edges:
                L = float(np.linalg.norm(self._xy[v] - self._xy[u]))
                k = max(1, int(math.ceil(L / h)))
                if k == 1:
                    out.append([u, v, lab, s0, s1])
                    continue
                key = (min(u, v), max(u, v))
                fr = [s / k for s in range(1, k)]
                if lab in ("same", "opp") and key in shared:
                    mids = shared[key]
                    if u != key[0]:
                        mids = mids[::-1]
                    for f, w in zip(fr, mids):
                        own_u[w] = s0 + (s1 - s0) * f
                else:
                    mids = []
                    for f in fr:
                        p = self._xy[u] + f * (self._xy[v] - self._xy[u])
                        xy.append((float(p[0]), float(p[1])))
                        own_u.append(s0 + (s1 - s0) * f)
                        other_u.append(math.nan)
                        mids.append(len(xy) - 1)
                    if lab in ("same", "opp"):
                        shared[key] = mids if u == key[0] else mids[::-1]
                seq = [u] + list(mids) + [v]
                for f0, f1, a, b in zip([0.0] + fr, fr + [1.0], seq[:-1], seq[1:]):
                    out.append([a, b, lab, s0 + (s1 - s0) * f0, s0 + (s1 - s0) * f1])
            return out

        d2 = expand(d_edges, uD, uE)
        e2 = expand(e_edges, uE, uD)
        self._xy = np.array(xy, float)
        self._uD = np.array(uD, float)
        self._uE = np.array(uE, float)
        return d2, e2

    # accessors ------------------------------------------------------------

    @property
    def xy(self) -> np.ndarray:
        return self._xy

    @property
    def uD(self) -> np.ndarray:
        """Vertex-index parameter on dD per node (NaN if the node is not on dD)."""
        return self._uD

    @property
    def uE(self) -> np.ndarray:
        return self._uE

    def is_contact(self, node: int) -> bool:
        return not (math.isnan(self._uD[node]) or math.isnan(self._uE[node]))

    # region loops ---------------------------------------------------------

    def _region_edges(self, mode: str):
        out = []
        for u, v, lab, *_ in self.d_edges:
            if mode == "intersection" and lab == "in":
                out.append((u, v, ALPHA))
            elif lab == "same":
                out.append((u, v, SHARED))
            elif mode == "union" and lab == "out":
                out.append((u, v, D_OUTER))
        for u, v, lab, *_ in self.e_edges:
            if mode == "intersection" and lab == "in":
                out.append((u, v, BETA))
            elif mode == "union" and lab == "out":
                out.append((u, v, E_OUTER))
        return out

    def loops(self, mode: str) -> list[list[tuple[int, int, str]]]:
        edges = self._region_edges(mode)
        outgoing: dict[int, list[int]] = {}
        for k, (u, _, _) in enumerate(edges):
            outgoing.setdefault(u, []).append(k)
        for u, ks in outgoing.items():
            if len(ks) > 1:
                raise NonGenericContact(f"pinch point at {self._xy[u].tolist()}: region boundary is not a Jordan curve")
        used = [False] * len(edges)
        loops = []
        for start in range(len(edges)):
            if used[start]:
                continue
            loop = []
            k = start
            while not used[k]:
                used[k] = True
                loop.append(edges[k])
                nxt = outgoing.get(edges[k][1])
                if not nxt:
                    raise NonGenericContact("open region boundary chain")
                k = nxt[0]
            if k != start:
                raise NonGenericContact("region boundary chain does not close")
            loops.append(loop)
        return loops

    def _pieces(self, loop):
        labels = [lab for _, _, lab in loop]
        n = len(loop)

        def breaks_before(k):
            prev = labels[k - 1]
            if labels[k] != prev:
                return True
            return labels[k] != SHARED and self.is_contact(loop[k][0])

        starts = [k for k in range(n) if breaks_before(k)]
        if not starts:
            nodes = tuple(u for u, _, _ in loop)
            arc = PolyArc(self._xy[list(nodes)], closed=True)
            return [Piece(labels[0], nodes, arc, closed=True)], 0
        pieces = []
        for a, b in zip(starts, starts[1:] + [starts[0] + n]):
            seg = [loop[k % n] for k in range(a, b)]
            nodes = tuple([seg[0][0]] + [v for _, v, _ in seg])
            pieces.append(Piece(seg[0][2], nodes, PolyArc(self._xy[list(nodes)])))
        return pieces, starts[0]

    def regions(self, mode: str) -> list["IntersectionComponent"]:
        out = []
        for loop in self.loops(mode):
            pieces, shift = self._pieces(loop)
            nodes = [loop[(k + shift) % len(loop)][0] for k in range(len(loop))]
            poly = self._xy[nodes]
            area = signed_area(poly)
            perim = float(np.linalg.norm(np.roll(poly, -1, axis=0) - poly, axis=1).sum())
            if abs(area) <= self.tol * perim:
                warnings.warn("discarding sliver component below predicate resolution", RuntimeWarning)
                continue
            if area < 0:
                raise NonGenericContact("region loop is clockwise (hole); inputs are not Jordan domains")
            out.append(IntersectionComponent(self, tuple(nodes), tuple(pieces), mode))
        return out

    # boundary walks -------------------------------------------------------

    def walk(self, which: str, a: int, b: int) -> list[int]:
        """Nodes along dD or dE from node ``a`` CCW to node ``b`` inclusive."""
        chain, pos = (self.d_chain, self.d_pos) if which == "D" else (self.e_chain, self.e_pos)
        i, j = pos[a], pos[b]
        if j <= i:
            j += len(chain)
        return [chain[k % len(chain)] for k in range(i, j + 1)]


@dataclass(frozen=True)
class IntersectionComponent:
    """One connected component of D n E (or the loop of D u E) with labelled pieces."""

    overlay: Overlay
    nodes: tuple[int, ...]
    pieces: tuple[Piece, ...]
    mode: str = "intersection"
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def parentD(self) -> JordanDomain:
        return self.overlay.D

    @property
    def parentE(self) -> JordanDomain:
        return self.overlay.E

    @property
    def boundary(self) -> PolyArc:
        return PolyArc(self.overlay.xy[list(self.nodes)], closed=True)

    @property
    def vertices(self) -> np.ndarray:
        return self.overlay.xy[list(self.nodes)]

    @property
    def domain(self) -> JordanDomain:
        if "domain" not in self._cache:
            self._cache["domain"] = validate_jordan(self.boundary, self.parentD.tau_rel)
        return self._cache["domain"]

    @property
    def area(self) -> float:
        return signed_area(self.vertices)

    def locate(self, pts, tol=None):
        return self.domain.locate(pts, tol)

    def contains(self, pts, closed: bool = True):
        return self.domain.contains(pts, closed)

    def pieces_with(self, label: str) -> list[Piece]:
        return [p for p in self.pieces if p.label == label]

    def alpha_endpoints(self) -> list[int]:
        return self._endpoints(ALPHA)

    def beta_endpoints(self) -> list[int]:
        return self._endpoints(BETA)

    def _endpoints(self, label):
        seen = []
        for p in self.pieces:
            if p.label == label and not p.closed:
                for k in (p.nodes[0], p.nodes[-1]):
                    if k not in seen:
                        seen.append(k)
        return seen

    # invariant checks -----------------------------------------------------

    def check_partition(self) -> bool:
        """Pieces tile the boundary loop exactly, in order."""
        walked = []
        for p in self.pieces:
            walked.extend(p.nodes[:-1] if not p.closed else p.nodes)
        k = walked.index(self.nodes[0]) if self.nodes[0] in walked else -1
        if k < 0 or len(walked) != len(self.nodes):
            return False
        return tuple(walked[k:] + walked[:k]) == self.nodes

    def check_cyclic_order(self) -> bool:
        """Endpoint order along dD (dE) agrees with order along the component boundary."""
        ok = True
        for eps, u in ((self.alpha_endpoints(), self.overlay.uD), (self.beta_endpoints(), self.overlay.uE)):
            if len(eps) < 3:
                continue
            pos = {v: k for k, v in enumerate(self.nodes)}
            along_c = sorted(eps, key=lambda v: pos[v])
            along_b = sorted(eps, key=lambda v: u[v])
            r = [along_b.index(v) for v in along_c]
            descents = sum(1 for a, b in zip(r, r[1:] + r[:1]) if b < a)
            ok &= descents == 1
        return ok

    def check_beta_containment(self, samples: int = 200, seed: int = 0) -> bool:
        """Component lies in the Jordan domain bounded by beta_j and [d_j, c_j] on dD."""
        rng = np.random.default_rng(seed)
        comp = self.domain
        lo, hi = comp.vertices.min(0), comp.vertices.max(0)
        pts = rng.uniform(lo, hi, size=(samples * 4, 2))
        pts = pts[comp.contains(pts, closed=False)][:samples]
        pts = np.vstack([pts, comp.vertices])
        ov = self.overlay
        for p in self.pieces_with(BETA):
            if p.closed:
                continue
            c, d = p.nodes[0], p.nodes[-1]
            ring = list(p.nodes) + ov.walk("D", d, c)[1:-1]
            J = JordanDomain(PolyArc(ov.xy[ring], closed=True), comp.tau_rel)
            if J.area < 0:
                J = JordanDomain(J.boundary.reversed(), comp.tau_rel)
            if not np.all(J.contains(pts, closed=True)):
                return False
        return True


def intersect_domains(D: JordanDomain, E: JordanDomain, refine: float | None = None) -> list[IntersectionComponent]:
    """Connected components of ``D & E`` with alpha/beta/shared boundary pieces."""
    return Overlay(D, E, refine=refine).regions("intersection")


def union_boundary(D: JordanDomain, E: JordanDomain, refine: float | None = None) -> list[IntersectionComponent]:
    return Overlay(D, E, refine=refine).regions("union")


@dataclass(frozen=True)
class Lobe:
    """Jordan domain bounded by one inner arc (on dD n dE-side of D n E) and one outer arc."""

    region: JordanDomain
    side: str  # "A" (part of E outside D) or "B" (part of D outside E)
    nodes: tuple[int, ...]
    n_outer: int  # nodes[:n_outer] is the outer arc, nodes[n_outer - 1:] + nodes[:1] the inner arc

    @property
    def outer_nodes(self) -> tuple[int, ...]:
        return self.nodes[: self.n_outer]

    @property
    def inner_nodes(self) -> tuple[int, ...]:
        """Inner arc in its own boundary direction (along dD for A, dE for B)."""
        return tuple(reversed(self.nodes[self.n_outer - 1:] + self.nodes[:1]))

    @property
    def innerArc(self) -> PolyArc:
        return PolyArc(self.region.vertices[self.n_outer - 1:].tolist() + [self.region.vertices[0].tolist()])

    @property
    def outerArc(self) -> PolyArc:
        return PolyArc(self.region.vertices[: self.n_outer])


def lobes(D: JordanDomain, E: JordanDomain, component: IntersectionComponent) -> list[Lobe]:
    """Jordan domains A_i over the alpha pieces and B_j over the beta pieces of a component."""
    ov = component.overlay
    out = []
    for piece in component.pieces:
        if piece.label not in (ALPHA, BETA):
            continue
        if piece.closed:
            raise ContainmentViolation("inner arc is a full boundary loop; complement is an annulus")
        a, b = piece.nodes[0], piece.nodes[-1]
        outer = ov.walk("E" if piece.label == ALPHA else "D", a, b)
        inner_back = list(reversed(piece.nodes))[1:-1]
        nodes = outer + inner_back
        region = validate_jordan(PolyArc(ov.xy[nodes], closed=True), D.tau_rel)
        if region.area <= 0 or not np.allclose(region.vertices[0], ov.xy[nodes[0]]):
            raise InvalidGeometry("lobe boundary has unexpected orientation")
        out.append(Lobe(region, "A" if piece.label == ALPHA else "B", tuple(nodes), len(outer)))
    return out
