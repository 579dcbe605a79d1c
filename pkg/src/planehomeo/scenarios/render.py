"""Deterministic SVG output: fixed 1e-6 precision, stable element ids, no timestamps."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from ..dynamics.escape import NON_ESCAPING, EscapeField
from ..extension.partition import ArcPartition
from ..geom.boolean import IntersectionComponent
from ..geom.polygon import JordanDomain, PolyArc

#: fill colours by role; D white, E light grey and the reduced E~ dark grey
ROLE_FILL = {"D": "#ffffff", "E": "#d9d9d9", "Et": "#808080", "component": "#9ecae1", "U": "#fdd0a2"}


@dataclass(frozen=True)
class Layer:
    obj: object
    role: str = ""
    label: str = ""


def _num(v: float) -> str:
    s = f"{v:.6f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def _path(points: np.ndarray, closed: bool, T) -> str:
    P = T(points)
    d = "M" + " L".join(f"{_num(x)} {_num(y)}" for x, y in P)
    return d + (" Z" if closed else "")


def _bounds(layers) -> tuple[np.ndarray, np.ndarray]:
    pts = []
    for L in layers:
        o = L.obj
        if isinstance(o, (JordanDomain, IntersectionComponent)):
            pts.append(o.vertices)
        elif isinstance(o, PolyArc):
            pts.append(o.vertices)
        elif isinstance(o, EscapeField):
            pts.append(np.array([[o.xs[0], o.ys[0]], [o.xs[-1], o.ys[-1]]]))
        elif isinstance(o, ArcPartition):
            pts.append(o.D.vertices)
            pts.append(o.E.vertices)
        elif isinstance(o, np.ndarray) and o.ndim == 2:
            pts.append(o)
    allp = np.vstack(pts) if pts else np.zeros((1, 2))
    lo, hi = allp.min(axis=0), allp.max(axis=0)
    pad = 0.05 * max(float(np.max(hi - lo)), 1e-9)
    return lo - pad, hi + pad


def _colour(t: float) -> str:
    """Dark-to-light ramp for t in [0, 1]."""
    a = np.array([33, 102, 172])
    b = np.array([253, 219, 199])
    c = np.round(a + (b - a) * float(np.clip(t, 0, 1))).astype(int)
    return "#%02x%02x%02x" % tuple(c)


def svg_string(objects, size: int = 600, clip_partition: float | None = None) -> str:
    layers = [o if isinstance(o, Layer) else Layer(o) for o in objects]
    lo, hi = _bounds(layers)
    span = hi - lo
    s = size / float(max(span))
    W, H = span * s

    def T(P):
        P = np.asarray(P, float)
        return np.c_[(P[:, 0] - lo[0]) * s, (hi[1] - P[:, 1]) * s]

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_num(W)}" height="{_num(H)}" '
           f'viewBox="0 0 {_num(W)} {_num(H)}">']
    for i, L in enumerate(layers):
        o = L.obj
        gid = f"layer-{i}" + (f"-{L.label or L.role}" if (L.label or L.role) else "")
        out.append(f'<g id="{escape(gid)}">')
        if isinstance(o, (JordanDomain, IntersectionComponent)):
            fill = ROLE_FILL.get(L.role, "none")
            out.append(f'<path id="{gid}-0" d="{_path(o.vertices, True, T)}" fill="{fill}" '
                       f'fill-opacity="{0.85 if L.role in ("E", "Et") else 1}" stroke="#000000" stroke-width="1"/>')
        elif isinstance(o, PolyArc):
            out.append(f'<path id="{gid}-0" d="{_path(o.vertices, o.closed, T)}" fill="none" '
                       f'stroke="#d62728" stroke-width="1.5"/>')
        elif isinstance(o, ArcPartition):
            step = max(1, o.n_arcs // 128)
            for k in range(0, o.n_arcs, step):
                arc = o.arcs[k]
                arc = arc[np.all(np.isfinite(arc), axis=1)]
                if clip_partition is not None:
                    arc = arc[np.linalg.norm(arc - o.center, axis=1) <= clip_partition]
                if len(arc) > 1:
                    out.append(f'<path id="{gid}-{k}" d="{_path(arc, False, T)}" fill="none" '
                               f'stroke="#555555" stroke-width="0.4"/>')
        elif isinstance(o, EscapeField):
            times = o.times
            tmax = max(1, o.max_time)
            dx = (o.xs[1] - o.xs[0]) if len(o.xs) > 1 else 1.0
            dy = (o.ys[1] - o.ys[0]) if len(o.ys) > 1 else 1.0
            for r in range(times.shape[0]):
                row = times[r]
                c = 0
                while c < len(row):
                    v = row[c]
                    e = c
                    while e + 1 < len(row) and row[e + 1] == v:
                        e += 1
                    if v >= 0 or v == NON_ESCAPING:
                        x0 = o.xs[c] - dx / 2
                        y1 = o.ys[r] + dy / 2
                        P = T(np.array([[x0, y1]]))[0]
                        col = "#000000" if v == NON_ESCAPING else _colour((v - 1) / tmax)
                        out.append(f'<rect id="{gid}-{r}-{c}" x="{_num(P[0])}" y="{_num(P[1])}" '
                                   f'width="{_num((e - c + 1) * dx * s)}" height="{_num(dy * s)}" fill="{col}"/>')
                    c = e + 1
        elif isinstance(o, np.ndarray):
            for k, (x, y) in enumerate(T(o)):
                out.append(f'<circle id="{gid}-{k}" cx="{_num(x)}" cy="{_num(y)}" r="3" fill="#d62728"/>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_svg(objects, path, size: int = 600, **kw) -> Path:
    """Write layers (domains, components, arcs, partitions, escape fields, point sets) to an SVG file."""
    path = Path(path)
    path.write_text(svg_string(objects, size, **kw))
    return path
