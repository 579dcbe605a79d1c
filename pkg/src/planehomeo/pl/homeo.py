"""Piecewise-linear homeomorphisms between Jordan polygons and lazy map handles."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import FlippedTriangle, GenerationFailed, OutsideDomain, OutsideImage, TargetBoundaryNotSimple
from ..geom.polygon import JordanDomain, PolyArc, as_points, signed_area
from ..geom.predicates import orient_many
from .mesh import PLMap, Triangulation, mesh_polygon, subdivide_loop


class MapHandle:
    """Pointwise-evaluable plane map; NaN marks points outside its domain."""

    #: Lipschitz bound of the map (None when unknown)
    lipschitz: float | None = None

    def forward(self, pts, strict: bool = False) -> np.ndarray:  # pragma: no cover - interface
        raise NotImplementedError

    def inverse(self, pts, strict: bool = False) -> np.ndarray:
        raise NotImplementedError(f"{type(self).__name__} has no inverse")

    def __call__(self, pts) -> np.ndarray:
        return self.forward(pts)


class FunctionMap(MapHandle):
    """Wrap vectorised callables ``forward(pts)`` / ``inverse(pts)``."""

    def __init__(self, fwd, inv=None, lipschitz: float | None = None):
        self._fwd, self._inv, self.lipschitz = fwd, inv, lipschitz

    def forward(self, pts, strict: bool = False):
        pts = np.asarray(pts, float)
        out = np.asarray(self._fwd(pts.reshape(-1, 2)), float).reshape(pts.shape)
        if strict and not np.all(np.isfinite(out)):
            raise OutsideDomain("map undefined at some input")
        return out

    def inverse(self, pts, strict: bool = False):
        if self._inv is None:
            return super().inverse(pts, strict)
        pts = np.asarray(pts, float)
        out = np.asarray(self._inv(pts.reshape(-1, 2)), float).reshape(pts.shape)
        if strict and not np.all(np.isfinite(out)):
            raise OutsideImage("inverse undefined at some input")
        return out


def identity_map() -> FunctionMap:
    return FunctionMap(lambda p: p, lambda p: p, 1.0)


def translation_map(t) -> FunctionMap:
    t = np.asarray(t, float)
    return FunctionMap(lambda p: p + t, lambda p: p - t, 1.0)


@dataclass(frozen=True, eq=False)
class PLHomeo(MapHandle):
    """PL homeomorphism f: D -> E given by a triangulation of D and vertex images."""

    source: Triangulation
    targets: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        t = as_points(self.targets)
        t.setflags(write=False)
        object.__setattr__(self, "targets", t)

    @property
    def pl(self) -> PLMap:
        if "pl" not in self._cache:
            self._cache["pl"] = PLMap(self.source.vertices, self.targets, self.source.triangles)
        return self._cache["pl"]

    @property
    def domain(self) -> JordanDomain:
        """D, with vertices exactly the mesh boundary loop (vertex k of D maps to vertex k of E)."""
        if "D" not in self._cache:
            self._cache["D"] = JordanDomain(PolyArc(self.source.boundary_polygon(), closed=True))
        return self._cache["D"]

    @property
    def image(self) -> JordanDomain:
        if "E" not in self._cache:
            self._cache["E"] = JordanDomain(PolyArc(self.targets[self.source.boundary_loop], closed=True))
        return self._cache["E"]

    @property
    def lipschitz(self) -> float:
        if "lip" not in self._cache:
            self._cache["lip"] = float(np.linalg.norm(self.pl.jacobians(), ord=2, axis=(1, 2)).max())
        return self._cache["lip"]

    @property
    def inverse_lipschitz(self) -> float:
        if "ilip" not in self._cache:
            inv = np.linalg.inv(self.pl.jacobians())
            self._cache["ilip"] = float(np.linalg.norm(inv, ord=2, axis=(1, 2)).max())
        return self._cache["ilip"]

    @property
    def displacement_lipschitz(self) -> float:
        """Lipschitz bound of x -> f(x) - x."""
        if "dlip" not in self._cache:
            A = self.pl.jacobians() - np.eye(2)
            self._cache["dlip"] = float(np.linalg.norm(A, ord=2, axis=(1, 2)).max())
        return self._cache["dlip"]

    def forward(self, pts, strict: bool = False) -> np.ndarray:
        return self.pl.forward(pts, strict)

    def inverse(self, pts, strict: bool = False) -> np.ndarray:
        return self.pl.inverse(pts, strict)


def image_triangle_signs(src: Triangulation, targets: np.ndarray) -> np.ndarray:
    t = src.triangles
    return orient_many(targets[t[:, 0]], targets[t[:, 1]], targets[t[:, 2]])


def build_pl_homeo(src: Triangulation, targets) -> PLHomeo:
    """Validate vertex images and return the PL homeomorphism.

    Every image triangle must be positively oriented and the image of the
    boundary loop must be a simple closed curve.  Together these certify an
    orientation-preserving homeomorphism onto the image polygon.
    """
    targets = as_points(targets)
    if len(targets) != src.n_vertices:
        raise ValueError(f"expected {src.n_vertices} target positions, got {len(targets)}")
    sign = image_triangle_signs(src, targets)
    bad = np.nonzero(sign <= 0)[0]
    if len(bad):
        k = int(bad[0])
        raise FlippedTriangle(f"image of triangle {k} is not positively oriented", k)
    loop = targets[src.boundary_loop]
    try:
        arc = PolyArc(loop, closed=True)
    except Exception as exc:
        raise TargetBoundaryNotSimple(str(exc)) from exc
    simple, witness = arc.is_simple()
    if not simple:
        raise TargetBoundaryNotSimple(f"image boundary edges {witness} intersect")
    if signed_area(loop) <= 0:
        raise TargetBoundaryNotSimple("image boundary is not counter-clockwise")
    return PLHomeo(src, targets)


def evaluate(f: MapHandle, x) -> np.ndarray:
    """Image of one point or an (n, 2) array; raises OutsideDomain."""
    return f.forward(x, strict=True)


def invert(f: MapHandle, y) -> np.ndarray:
    return f.inverse(y, strict=True)


def is_orientation_preserving(f: PLHomeo) -> bool:
    return bool(np.all(image_triangle_signs(f.source, f.targets) > 0))


class Composed(MapHandle):
    """x -> g(f(x)); undefined wherever either factor is."""

    def __init__(self, g: MapHandle, f: MapHandle):
        self.g, self.f = g, f
        lg, lf = getattr(g, "lipschitz", None), getattr(f, "lipschitz", None)
        self.lipschitz = lg * lf if lg is not None and lf is not None else None

    def forward(self, pts, strict: bool = False):
        return self.g.forward(self.f.forward(pts, strict), strict)

    def inverse(self, pts, strict: bool = False):
        return self.f.inverse(self.g.inverse(pts, strict), strict)


class Power(MapHandle):
    """k-fold iterate; a point is in the domain iff every intermediate image is."""

    def __init__(self, f: MapHandle, k: int):
        if k < 0:
            raise ValueError("power needs k >= 0")
        self.f, self.k = f, int(k)
        lf = getattr(f, "lipschitz", None)
        self.lipschitz = lf ** k if lf is not None else None

    def forward(self, pts, strict: bool = False):
        x = np.asarray(pts, float)
        for _ in range(self.k):
            x = self.f.forward(x, strict)
        return x

    def inverse(self, pts, strict: bool = False):
        y = np.asarray(pts, float)
        for _ in range(self.k):
            y = self.f.inverse(y, strict)
        return y


def compose(g: MapHandle, f: MapHandle) -> Composed:
    return Composed(g, f)


def power(f: MapHandle, k: int) -> Power:
    return Power(f, k)


def mesh_domain(D: JordanDomain, max_area: float | None = None, boundary_step: float | None = None,
                min_angle: float = 25.0) -> Triangulation:
    """Quality mesh of a Jordan polygon with the default resolution ``diameter/12``."""
    h = boundary_step or D.diameter / 12.0
    loop, _ = subdivide_loop(D.vertices, h)
    return mesh_polygon(loop, max_area=max_area or 0.5 * h * h, min_angle=min_angle)


def random_op_homeo(seed: int, D: JordanDomain, displacementScale: float,
                    mesh: Triangulation | None = None, max_rounds: int = 60) -> PLHomeo:
    """Seeded random orientation-preserving PL map close to the identity.

    Every vertex is moved by a vector drawn uniformly from the disk of radius
    ``displacementScale``.  Moves touching a flipped triangle are halved until
    the validator accepts (halving keeps the result seed-determined).
    """
    src = mesh if mesh is not None else mesh_domain(D)
    rng = np.random.default_rng(seed)
    n = src.n_vertices
    r = displacementScale * np.sqrt(rng.uniform(0, 1, n))
    th = rng.uniform(0, 2 * np.pi, n)
    disp = np.c_[r * np.cos(th), r * np.sin(th)]
    for _ in range(max_rounds):
        targets = src.vertices + disp
        sign = image_triangle_signs(src, targets)
        bad = sign <= 0
        if not np.any(bad):
            try:
                return build_pl_homeo(src, targets)
            except TargetBoundaryNotSimple:
                disp[src.boundary_loop] *= 0.5
                continue
        disp[np.unique(src.triangles[bad])] *= 0.5
    raise GenerationFailed(f"no valid perturbation after {max_rounds} rounds (seed {seed})")
