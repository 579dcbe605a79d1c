"""Seeded random polygon generators for experiments and property tests."""

from __future__ import annotations

import numpy as np


def random_star_polygon(rng: np.random.Generator, n: int, center=(0.0, 0.0), rmin: float = 0.5,
                        rmax: float = 1.0, jitter: float = 0.8) -> np.ndarray:
    """Star-shaped simple polygon with ``n`` vertices, CCW.

    Angles are equally spaced plus a jitter of at most ``jitter`` half-steps,
    so consecutive angles stay strictly increasing.
    """
    step = 2 * np.pi / n
    th = step * np.arange(n) + rng.uniform(-0.5, 0.5, n) * jitter * step + rng.uniform(0, 2 * np.pi)
    r = rng.uniform(rmin, rmax, n)
    return np.c_[center[0] + r * np.cos(th), center[1] + r * np.sin(th)]


def random_polygon_pair(seed: int, max_vertices: int = 32):
    """Two overlapping-or-nearby star polygons, reproducible from ``seed``."""
    rng = np.random.default_rng(seed)
    n1, n2 = rng.integers(3, max_vertices + 1, size=2)
    c2 = rng.uniform(-1.2, 1.2, 2)
    P = random_star_polygon(rng, int(n1))
    Q = random_star_polygon(rng, int(n2), center=c2)
    return P, Q
