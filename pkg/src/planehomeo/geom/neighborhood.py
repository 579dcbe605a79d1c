"""Connected components of closed epsilon-neighbourhoods of polygonal sets.

Two closed eps-neighbourhoods meet exactly when the underlying pieces are at
distance <= 2 eps, so components are the classes of the "within 2 eps" graph
over the base pieces.  Offset boundaries are never materialised.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidInput, NonPositiveEpsilon
from .polygon import PolyArc, as_points, crossing_parity
from .predicates import intersecting_segment_pairs, point_segment_distance


def _as_piece(obj) -> PolyArc:
    if isinstance(obj, PolyArc):
        return obj
    if hasattr(obj, "boundary") and isinstance(obj.boundary, PolyArc):
        return obj.boundary
    pts = as_points(obj)
    return PolyArc(pts, closed=len(pts) >= 3)


def set_distance(a, b) -> float:
    """Euclidean distance between two closed pieces (filled if closed, curves otherwise)."""
    a, b = _as_piece(a), _as_piece(b)
    a0, a1 = a.edges
    b0, b1 = b.edges
    ii, _ = intersecting_segment_pairs(a0, a1, b0, b1)
    if len(ii):
        return 0.0
    if a.closed and np.any(crossing_parity(b.vertices[:1], a.vertices)):
        return 0.0
    if b.closed and np.any(crossing_parity(a.vertices[:1], b.vertices)):
        return 0.0
    # disjoint segments: the minimum is attained at an endpoint of one of them
    d1, _ = point_segment_distance(a.vertices[:, None, :], b0[None], b1[None])
    d2, _ = point_segment_distance(b.vertices[:, None, :], a0[None], a1[None])
    return float(min(d1.min(), d2.min()))


@dataclass(frozen=True)
class EpsilonNeighborhood:
    base: tuple[PolyArc, ...]
    epsilon: float
    labels: np.ndarray  # component id per base piece, ids numbered by first occurrence

    @property
    def components(self) -> list[list[int]]:
        out: dict[int, list[int]] = {}
        for k, c in enumerate(self.labels.tolist()):
            out.setdefault(c, []).append(k)
        return [out[c] for c in sorted(out)]

    @property
    def n_components(self) -> int:
        return len(set(self.labels.tolist()))

    def same_component(self, i: int, j: int) -> bool:
        return bool(self.labels[i] == self.labels[j])

    def refines(self, coarser: "EpsilonNeighborhood") -> bool:
        """True if every component here lies inside one component of ``coarser``."""
        return all(len({int(coarser.labels[k]) for k in comp}) == 1 for comp in self.components)


def pairwise_distances(base) -> np.ndarray:
    pieces = [_as_piece(p) for p in base]
    n = len(pieces)
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            out[i, j] = out[j, i] = set_distance(pieces[i], pieces[j])
    return out


def epsilon_components(base, eps: float, distances: np.ndarray | None = None) -> EpsilonNeighborhood:
    """Components of the closed ``eps``-neighbourhood of a finite union of pieces."""
    if not eps > 0:
        raise NonPositiveEpsilon(f"epsilon must be positive, got {eps!r}")
    pieces = tuple(_as_piece(p) for p in base)
    dist = pairwise_distances(pieces) if distances is None else distances
    n = len(pieces)
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    ii, jj = np.nonzero(np.triu(dist <= 2.0 * eps, k=1))
    for i, j in zip(ii.tolist(), jj.tolist()):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)
    roots = [find(k) for k in range(n)]
    relabel: dict[int, int] = {}
    labels = np.array([relabel.setdefault(r, len(relabel)) for r in roots], dtype=int)
    return EpsilonNeighborhood(pieces, float(eps), labels)


def separation_threshold(C, C2) -> float:
    """Half the set distance between two disjoint polygonal sets.

    ``C`` and ``C2`` may each be a single piece or a list of pieces.
    """
    def pieces(x):
        if isinstance(x, (list, tuple)) and x and not np.isscalar(x[0]) and not (
            isinstance(x[0], (list, tuple)) and len(x[0]) == 2 and np.isscalar(x[0][0])
        ):
            return [_as_piece(p) for p in x]
        return [_as_piece(x)]

    A, B = pieces(C), pieces(C2)
    d = min(set_distance(a, b) for a in A for b in B)
    scale = max(np.ptp(np.vstack([p.vertices for p in A + B]), axis=0).max(), 1.0)
    if d <= 1e-12 * scale:
        raise InvalidInput("sets touch or overlap; no separating epsilon exists")
    return 0.5 * d
