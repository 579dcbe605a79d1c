"""Deterministic map generators for scenarios, the gallery and test campaigns."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..geom.polygon import JordanDomain, domain, rectangle, regular_polygon
from ..geom.sampling import random_star_polygon
from ..pl.homeo import PLHomeo, build_pl_homeo, mesh_domain, random_op_homeo
from ..pl.mesh import Triangulation, mesh_polygon, subdivide_loop


@dataclass
class Generated:
    """A generated PL map with whatever the construction knows about it."""

    map: PLHomeo
    params: dict
    planted: dict = field(default_factory=dict)

    @property
    def D(self) -> JordanDomain:
        return self.map.domain


def pl_from_formula(D: JordanDomain, fn, h: float, min_angle: float = 30.0, aspect: float = 1.0) -> PLHomeo:
    """Quality mesh of D at edge length h with vertex images fn(vertices).

    ``aspect`` > 1 meshes in coordinates (x, aspect * y), giving triangles
    that are short in y for maps that stretch y strongly.
    """
    S = np.array([1.0, aspect])
    loop, _ = subdivide_loop(D.vertices * S, h)
    mesh = mesh_polygon(loop, max_area=0.45 * h * h, min_angle=min_angle)
    if aspect != 1.0:
        mesh = Triangulation(mesh.vertices / S, mesh.triangles, mesh.boundary_loop, mesh.holes)
    return build_pl_homeo(mesh, fn(mesh.vertices))


def stadium(half_length: float = 1.0, eps: float = 0.1, n_cap: int = 16) -> np.ndarray:
    """Closed eps-neighbourhood of [-half_length, half_length] x {0}, as a CCW polygon."""
    right = [(half_length + eps * math.cos(t), eps * math.sin(t))
             for t in np.linspace(-np.pi / 2, np.pi / 2, n_cap + 1)]
    left = [(-half_length + eps * math.cos(t), eps * math.sin(t))
            for t in np.linspace(np.pi / 2, 3 * np.pi / 2, n_cap + 1)]
    return np.array(right + left)


# segment to semicircle --------------------------------------------------------


def semicircle_bend(pts: np.ndarray) -> np.ndarray:
    """(x, y) -> (1 - 0.8 y)(cos, sin)(pi (1 + x) / 2): the segment onto the upper unit semicircle, reversed.

    The radial factor 0.8 keeps the image boundary off the tangency with the stadium caps.
    """
    th = 0.5 * np.pi * (1.0 + pts[:, 0])
    r = 1.0 - 0.8 * pts[:, 1]
    return np.c_[r * np.cos(th), r * np.sin(th)]


def segment_semicircle(eps: float = 0.1, h: float | None = None) -> Generated:
    """Stadium around S = [-1, 1] x {0} bent onto the upper semicircle with (-1,0) <-> (1,0).

    The intersection has two components and the ends of S form a period-two
    orbit, yet the map has no fixed point.
    """
    D = domain(stadium(1.0, eps))
    f = pl_from_formula(D, semicircle_bend, h or eps / 2)
    return Generated(f, {"eps": eps}, {"period2": [[-1.0, 0.0], [1.0, 0.0]]})


# truncated horseshoe ----------------------------------------------------------

HS = {"c0": 0.2, "rho": 0.3, "band": 0.2, "y_bot": -0.3, "y_top": 1.2, "cap": 0.75}


def _hs_length(p=HS) -> float:
    return 2 * (p["y_top"] - p["y_bot"]) + math.pi * p["rho"]


def horseshoe_fold(pts: np.ndarray, p=HS) -> np.ndarray:
    """Stretch the unit square along y and fold it into an arch whose legs cross the square."""
    L = _hs_length(p)
    c0, rho = p["c0"], p["rho"]
    s = L * pts[:, 1]
    t = p["band"] * (pts[:, 0] - 0.5)
    s1 = p["y_top"] - p["y_bot"]
    s2 = s1 + math.pi * rho
    out = np.empty_like(pts)
    a = s <= s1
    out[a] = np.c_[c0 + t[a], p["y_bot"] + s[a]]
    b = (s > s1) & (s < s2)
    phi = math.pi - (s[b] - s1) / rho
    out[b] = np.c_[c0 + rho + (rho - t[b]) * np.cos(phi), p["y_top"] + (rho - t[b]) * np.sin(phi)]
    c = s >= s2
    out[c] = np.c_[c0 + 2 * rho - t[c], p["y_top"] - (s[c] - s2)]
    return out


def horseshoe_period2(p=HS) -> np.ndarray:
    """The unique period-two orbit of the fold (left-leg point first)."""
    L = _hs_length(p)
    c0, rho, w = p["c0"], p["rho"], p["band"]
    s2 = p["y_top"] - p["y_bot"] + math.pi * rho
    # left leg: x' = c0 + w (x - 1/2), y' = y_bot + L y ; right leg: x' = c0 + 2 rho - w (x - 1/2), y' = y_top + s2 - L y
    A0, b0 = np.diag([w, L]), np.array([c0 - 0.5 * w, p["y_bot"]])
    A1, b1 = np.diag([-w, -L]), np.array([c0 + 2 * rho + 0.5 * w, p["y_top"] + s2])
    # q = A0 x + b0 (x in the left-leg strip) and x = A1 q + b1
    M = A1 @ A0
    x = np.linalg.solve(np.eye(2) - M, A1 @ b0 + b1)
    q = A0 @ x + b0
    return np.array([x, q])


def horseshoe_domain(slot: float, p=HS, n_cap: int = 32) -> JordanDomain:
    """Square plus a half-ellipse cap, minus a slot from the right side around a period-two point."""
    x2 = horseshoe_period2(p)
    q = x2[np.argmax(x2[:, 0])]  # the point in the right leg, reached from x = 1
    y0, y1 = q[1] - slot / 2, q[1] + slot / 2
    xs = q[0] - slot
    cap = [(0.5 + 0.5 * math.cos(t), 1.0 + p["cap"] * math.sin(t)) for t in np.linspace(0, np.pi, n_cap + 1)]
    poly = [(0.0, 0.0), (1.0, 0.0), (1.0, y0), (xs, y0), (xs, y1), (1.0, y1)] + cap
    return domain(np.array(poly))


def truncated_horseshoe(slot: float, h: float = 0.04, p=HS) -> Generated:
    D = horseshoe_domain(slot, p)
    f = pl_from_formula(D, lambda v: horseshoe_fold(v, p), h, aspect=5.0)
    return Generated(f, {"slot": slot, "h": h, **p}, {"removed_period2": horseshoe_period2(p).tolist()})


def search_horseshoe_slot(period_search, start: float = 0.32, shrink: float = 0.5, tries: int = 8,
                          h: float = 0.04) -> tuple[float, Generated]:
    """Widest slot start * shrink**j for which ``period_search(gen)`` returns (n2, n3) with n2 == 0 < n3."""
    w = start
    for _ in range(tries):
        g = truncated_horseshoe(w, h)
        n2, n3 = period_search(g)
        if n2 == 0 and n3 > 0:
            return w, g
        w *= shrink
    raise RuntimeError("no slot width separates period two from period three")


# planted periodic orbits -------------------------------------------------------


def twisted_rotation(pts: np.ndarray, center, k: int, rho0: float, beta: float, eps: float) -> np.ndarray:
    """Polar map theta -> theta + 2 pi / k + eps sin(k theta), rho -> rho + beta rho (rho0 - rho).

    The circle rho = rho0 carries the period-k orbits theta = j pi / k; the
    centre is fixed.
    """
    d = pts - center
    r = np.hypot(d[:, 0], d[:, 1])
    th = np.arctan2(d[:, 1], d[:, 0])
    th2 = th + 2 * np.pi / k + eps * np.sin(k * th)
    r2 = r + beta * r * (rho0 - r)
    return center + np.c_[r2 * np.cos(th2), r2 * np.sin(th2)]


def planted_periodic(seed: int, k: int, h: float | None = None) -> Generated:
    """Star domain about a random centre with a planted period-k orbit and a fixed centre."""
    rng = np.random.default_rng(seed)
    center = rng.uniform(-1, 1, 2)
    rho0 = 1.0
    beta = float(rng.uniform(0.15, 0.3))
    eps = float(rng.uniform(0.05, 0.15)) / k
    n = int(rng.integers(7, 12))
    poly = random_star_polygon(rng, n, center=center, rmin=1.35 * rho0, rmax=1.8 * rho0)
    D = domain(poly)
    f = pl_from_formula(D, lambda v: twisted_rotation(v, center, k, rho0, beta, eps), h or 0.06)
    orbit = [(center + rho0 * np.array([math.cos(2 * np.pi * j / k), math.sin(2 * np.pi * j / k)])).tolist()
             for j in range(k)]
    return Generated(f, {"seed": seed, "k": k, "beta": beta, "eps": eps, "center": center.tolist()},
                     {"orbit": orbit, "fixed": center.tolist()})


# fixed-point-free families ----------------------------------------------------


def lens_domain(n: int = 64) -> JordanDomain:
    return domain(regular_polygon(n, 1.0))


def shifted_perturbation(seed: int, shape: str = "square", shift: float | None = None,
                         wobble: float = 0.05) -> Generated:
    """Random near-identity PL map followed by a translation.

    ``shape`` is "square" (unit square, images overlap as shifted squares) or
    "lens" (64-gon unit disk, overlapping disks form a lens).  The shift
    exceeds the wobble, so the map is fixed-point free with margin at least
    shift - wobble.
    """
    rng = np.random.default_rng(seed)
    D = domain(rectangle(0, 0, 1, 1)) if shape == "square" else lens_domain()
    size = 1.0 if shape == "square" else 2.0
    shift = shift if shift is not None else float(rng.uniform(0.25, 0.5)) * size
    ang = float(rng.uniform(0, 2 * np.pi))
    t = shift * np.array([math.cos(ang), math.sin(ang)])
    base = random_op_homeo(seed, D, wobble * size, mesh=mesh_domain(D))
    f = build_pl_homeo(base.source, base.targets + t)
    return Generated(f, {"seed": seed, "shape": shape, "shift": t.tolist(), "wobble": wobble * size},
                     {"min_displacement": shift - wobble * size})


def random_homeo(seed: int, scale: float = 0.3) -> Generated:
    """Random star domain with a random near-identity PL map."""
    rng = np.random.default_rng(seed)
    D = domain(random_star_polygon(rng, int(rng.integers(6, 12)), rmin=0.6, rmax=1.0))
    return Generated(random_op_homeo(seed, D, scale), {"seed": seed, "scale": scale})


def wavy_translation(amplitude: float = 0.3, shift=(1.0, 0.0)):
    """(x, y) -> (x + a + A sin y, y + b + A sin x): a fixed-point-free plane homeomorphism for A < 1/2.

    Fixed-point free because |A sin| < |a| on the first coordinate when |a| > A.
    """
    from ..pl.homeo import FunctionMap

    a, b = shift
    A = amplitude

    def fwd(p):
        return np.c_[p[:, 0] + a + A * np.sin(p[:, 1]), p[:, 1] + b + A * np.sin(p[:, 0])]

    def inv(q):
        # fixed-point iteration: contraction with constant A < 1
        p = q - np.array([a, b])
        for _ in range(200):
            p_new = np.c_[q[:, 0] - a - A * np.sin(p[:, 1]), q[:, 1] - b - A * np.sin(p[:, 0])]
            if np.max(np.abs(p_new - p), initial=0.0) < 1e-15:
                p = p_new
                break
            p = p_new
        return p

    return FunctionMap(fwd, inv, lipschitz=1.0 + A)


GENERATORS = {
    "segment_semicircle": segment_semicircle,
    "truncated_horseshoe": truncated_horseshoe,
    "planted_periodic": planted_periodic,
    "shifted_perturbation": shifted_perturbation,
    "random_homeo": random_homeo,
}
