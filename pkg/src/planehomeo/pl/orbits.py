"""Forward orbits with domain and component exit tracking."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .homeo import MapHandle


@dataclass(frozen=True)
class OrbitRecord:
    points: np.ndarray  # (m, 2), points[k+1] = f(points[k])
    escapeIndex: int | None  # least n with f^n(x) outside the tracked component
    componentIds: tuple[int, ...]  # per point: index into the tracked list, -1 outside all
    exited_domain: bool = False

    def __len__(self) -> int:
        return len(self.points)


def component_ids(pts: np.ndarray, components) -> np.ndarray:
    """Index of the first component containing each point (closed), -1 if none."""
    pts = np.asarray(pts, float).reshape(-1, 2)
    out = np.full(len(pts), -1, int)
    for k, comp in enumerate(components):
        free = out < 0
        if np.any(free):
            hit = comp.contains(pts[free], closed=True)
            idx = np.nonzero(free)[0][hit]
            out[idx] = k
    return out


def iterate(f: MapHandle, x, maxIter: int, trackComponent=None, components=()) -> OrbitRecord:
    """Orbit of ``x`` up to ``maxIter`` steps.

    Stops early when the map is undefined at the current point or, if
    ``trackComponent`` is given, the first time the orbit leaves it.
    ``components`` (which may include the tracked one) label every step.
    """
    comps = list(components)
    if trackComponent is not None and all(c is not trackComponent for c in comps):
        comps.append(trackComponent)
    track_id = next((k for k, c in enumerate(comps) if c is trackComponent), None)
    p = np.asarray(x, float).reshape(2)
    pts = [p]
    escape = None
    exited = False
    if trackComponent is not None and not trackComponent.contains(p[None], closed=True)[0]:
        escape, maxIter = 0, 0
    for n in range(1, maxIter + 1):
        q = f.forward(p[None])[0]
        if not np.all(np.isfinite(q)):
            exited = True
            break
        pts.append(q)
        p = q
        if trackComponent is not None and not trackComponent.contains(q[None], closed=True)[0]:
            escape = n
            break
    P = np.array(pts)
    ids = tuple(int(i) for i in component_ids(P, comps)) if comps else tuple([-1] * len(P))
    return OrbitRecord(P, escape, ids, exited)
