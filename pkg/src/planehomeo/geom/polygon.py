"""Polygonal arcs, Jordan domains, and point location."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from ..errors import DegenerateArea, InvalidGeometry, SelfIntersection
from .predicates import (
    crossing_parity,
    distance_to_polyline,
    intersecting_segment_pairs,
    orient_many,
)

#: default vertex-merge tolerance, relative to the bounding-box diagonal
TAU_PT = 1e-12


class Location(enum.IntEnum):
    OUTSIDE = -1
    BOUNDARY = 0
    INSIDE = 1


def as_points(xy) -> np.ndarray:
    pts = np.asarray(xy, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(1, 2)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise InvalidGeometry(f"expected (n, 2) coordinates, got shape {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise InvalidGeometry("non-finite coordinate")
    return pts


def signed_area(poly: np.ndarray) -> float:
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def bbox_diagonal(*polys: np.ndarray) -> float:
    pts = np.vstack(polys)
    return float(np.linalg.norm(pts.max(axis=0) - pts.min(axis=0)))


@dataclass(frozen=True)
class PolyArc:
    """Ordered vertex list; ``closed`` arcs have an implicit closing edge."""

    vertices: np.ndarray
    closed: bool = False

    def __post_init__(self):
        v = as_points(self.vertices)
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        if len(v) < 2:
            raise InvalidGeometry("a PolyArc needs at least two vertices")
        if np.any(np.all(np.diff(v, axis=0) == 0, axis=1)):
            raise InvalidGeometry("consecutive vertices coincide")
        if self.length <= 0:
            raise InvalidGeometry("zero-length arc")

    @property
    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        v = self.vertices
        if self.closed:
            return v, np.roll(v, -1, axis=0)
        return v[:-1], v[1:]

    @property
    def length(self) -> float:
        a, b = self.edges
        return float(np.linalg.norm(b - a, axis=1).sum())

    def reversed(self) -> "PolyArc":
        return PolyArc(self.vertices[::-1].copy(), self.closed)

    def is_simple(self) -> tuple[bool, tuple[int, int] | None]:
        """Return (simple, witness edge pair)."""
        a, b = self.edges
        n = len(a)
        ii, jj = intersecting_segment_pairs(a, b, a, b)
        keep = ii < jj
        ii, jj = ii[keep], jj[keep]
        adjacent = (jj == ii + 1) | (self.closed & (ii == 0) & (jj == n - 1))
        for i, j in zip(ii[~adjacent], jj[~adjacent]):
            return False, (int(i), int(j))
        # adjacent edges may only share their common vertex
        for i, j in zip(ii[adjacent], jj[adjacent]):
            if j == i + 1:
                p, q, r = a[i], b[i], b[j]
            else:
                p, q, r = a[j], b[j], b[i]
            if orient_many(p, q, r) == 0 and np.dot(q - p, r - q) < 0:
                return False, (int(i), int(j))
        return True, None


@dataclass(frozen=True)
class JordanDomain:
    """Closed region bounded by a simple, counter-clockwise polygon."""

    boundary: PolyArc
    tau_rel: float = TAU_PT
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def vertices(self) -> np.ndarray:
        return self.boundary.vertices

    @property
    def area(self) -> float:
        return signed_area(self.vertices)

    @property
    def diameter(self) -> float:
        return bbox_diagonal(self.vertices)

    @property
    def tol(self) -> float:
        return self.tau_rel * max(self.diameter, 1e-300)

    def locate(self, pts, tol: float | None = None) -> np.ndarray:
        """Location codes (see :class:`Location`) for every row of ``pts``."""
        pts = as_points(pts)
        tol = self.tol if tol is None else tol
        V = self.vertices
        lo, hi = V.min(axis=0) - tol, V.max(axis=0) + tol
        inbox = np.nonzero(np.all((pts >= lo) & (pts <= hi), axis=1))[0]
        out = np.full(len(pts), Location.OUTSIDE, dtype=np.int8)
        if not len(inbox):
            return out
        q = pts[inbox]
        inside = crossing_parity(q, V)
        out[inbox] = np.where(inside, Location.INSIDE, Location.OUTSIDE)
        # boundary samples at spacing h bound the true distance from below by (nearest sample) - h/2
        tree, h = self._sample_tree()
        near, _ = tree.query(q, distance_upper_bound=(h / 2 + tol) * (1 + 1e-9) + 1e-300)
        cand = np.nonzero(np.isfinite(near))[0]
        if len(cand):
            d = distance_to_polyline(q[cand], V)
            out[inbox[cand[d <= tol]]] = Location.BOUNDARY
        return out

    def _sample_tree(self):
        if "tree" not in self._cache:
            V = self.vertices
            n = len(V)
            per = self.boundary.length
            h = per / max(2048, 4 * n)
            W = np.roll(V, -1, axis=0)
            pts = [V]
            for i in range(n):
                k = int(np.ceil(np.linalg.norm(W[i] - V[i]) / h))
                if k > 1:
                    t = (np.arange(1, k) / k)[:, None]
                    pts.append(V[i] + t * (W[i] - V[i]))
            self._cache["tree"] = (cKDTree(np.vstack(pts)), h)
        return self._cache["tree"]

    def contains(self, pts, closed: bool = True) -> np.ndarray:
        loc = self.locate(pts)
        return loc >= 0 if closed else loc > 0


def validate_jordan(curve, tau_rel: float = TAU_PT) -> JordanDomain:
    """Check that a closed polygon is simple and return it oriented CCW.

    Raises :class:`SelfIntersection` (with the offending edge pair) or
    :class:`DegenerateArea`.
    """
    if not isinstance(curve, PolyArc):
        curve = PolyArc(np.asarray(curve, float), closed=True)
    v = curve.vertices
    if np.all(v[0] == v[-1]) and len(v) > 3:
        v = v[:-1]
        curve = PolyArc(v, closed=True)
    if len(v) < 3:
        raise DegenerateArea("a Jordan polygon needs at least three vertices")
    if not curve.closed:
        curve = PolyArc(v, closed=True)
    simple, witness = curve.is_simple()
    if not simple:
        raise SelfIntersection(f"boundary edges {witness} intersect", witness)
    area = signed_area(v)
    diag = bbox_diagonal(v)
    if abs(area) <= tau_rel * diag * diag:
        raise DegenerateArea(f"signed area {area:g} is numerically zero")
    if area < 0:
        curve = curve.reversed()
    return JordanDomain(curve, tau_rel)


def domain(vertices, tau_rel: float = TAU_PT) -> JordanDomain:
    """Shorthand for ``validate_jordan`` on a raw vertex list."""
    return validate_jordan(PolyArc(np.asarray(vertices, float), closed=True), tau_rel)


def locate(x, D: JordanDomain) -> Location:
    return Location(int(D.locate(x)[0]))


def regular_polygon(n: int, radius: float = 1.0, center=(0.0, 0.0), phase: float = 0.0) -> np.ndarray:
    th = phase + 2 * np.pi * np.arange(n) / n
    return np.c_[center[0] + radius * np.cos(th), center[1] + radius * np.sin(th)]


def rectangle(x0: float, y0: float, x1: float, y1: float) -> np.ndarray:
    return np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]], float)


def loop_point(poly: np.ndarray, u) -> np.ndarray:
    """Point at vertex-index parameter ``u`` (edge ``floor(u)``, fraction ``u % 1``)."""
    n = len(poly)
    u = np.mod(np.asarray(u, float), n)
    i = np.floor(u).astype(int) % n
    t = u - np.floor(u)
    a = poly[i]
    b = poly[(i + 1) % n]
    return a + t[..., None] * (b - a)


def loop_parameter(poly: np.ndarray, pts) -> np.ndarray:
    """Vertex-index parameter of the nearest boundary point for each query."""
    pts = as_points(pts)
    a = poly
    b = np.roll(poly, -1, axis=0)
    from .predicates import point_segment_distance

    d, t = point_segment_distance(pts[:, None, :], a[None], b[None])
    k = np.argmin(d, axis=1)
    return k + t[np.arange(len(pts)), k]
