"""Orientation predicate with exact sign, plus vectorized segment helpers.

The orientation test uses a floating-point filter and falls back to rational
arithmetic when the filter cannot certify the sign.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from ..errors import InvalidGeometry

_EPS = np.finfo(float).eps / 2.0
# Shewchuk's ccwerrboundA
_CCW_BOUND = (3.0 + 16.0 * _EPS) * _EPS


def _exact_orient(px, py, qx, qy, rx, ry) -> int:
    px, py, qx, qy, rx, ry = map(Fraction, (px, py, qx, qy, rx, ry))
    det = (qx - px) * (ry - py) - (qy - py) * (rx - px)
    return (det > 0) - (det < 0)


def orient(p, q, r) -> int:
    """Sign of det(q - p, r - p): +1 for a left turn, -1 right, 0 collinear."""
    px, py = float(p[0]), float(p[1])
    qx, qy = float(q[0]), float(q[1])
    rx, ry = float(r[0]), float(r[1])
    if not all(np.isfinite((px, py, qx, qy, rx, ry))):
        raise InvalidGeometry("orient: non-finite coordinate")
    left = (qx - px) * (ry - py)
    right = (qy - py) * (rx - px)
    det = left - right
    bound = _CCW_BOUND * (abs(left) + abs(right))
    if det > bound:
        return 1
    if -det > bound:
        return -1
    return _exact_orient(px, py, qx, qy, rx, ry)


def orient_many(p: np.ndarray, q: np.ndarray, r: np.ndarray) -> np.ndarray:
    """Vectorized :func:`orient`; inputs broadcast as (..., 2) arrays."""
    p, q, r = np.broadcast_arrays(np.asarray(p, float), np.asarray(q, float), np.asarray(r, float))
    if p.ndim == 1:
        return orient_many(p[None], q[None], r[None])[0]
    left = (q[..., 0] - p[..., 0]) * (r[..., 1] - p[..., 1])
    right = (q[..., 1] - p[..., 1]) * (r[..., 0] - p[..., 0])
    det = left - right
    bound = _CCW_BOUND * (np.abs(left) + np.abs(right))
    out = np.where(det > bound, 1, np.where(-det > bound, -1, 0)).astype(np.int8)
    unsure = np.abs(det) <= bound
    if np.any(unsure):
        if not (np.all(np.isfinite(p)) and np.all(np.isfinite(q)) and np.all(np.isfinite(r))):
            raise InvalidGeometry("orient: non-finite coordinate")
        for idx in zip(*np.nonzero(unsure)):
            out[idx] = _exact_orient(p[idx][0], p[idx][1], q[idx][0], q[idx][1], r[idx][0], r[idx][1])
    return out


def point_segment_distance(pts: np.ndarray, a: np.ndarray, b: np.ndarray):
    """Distance from points to segments [a, b] and the clamped projection parameter.

    All arguments broadcast over leading axes.
    """
    pts, a, b = np.asarray(pts, float), np.asarray(a, float), np.asarray(b, float)
    ab = b - a
    den = np.einsum("...i,...i->...", ab, ab)
    num = np.einsum("...i,...i->...", pts - a, ab)
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0)
    t = np.clip(t, 0.0, 1.0)
    proj = a + t[..., None] * ab
    return np.linalg.norm(pts - proj, axis=-1), t


def segments_cross_mask(a0, a1, b0, b1) -> np.ndarray:
    """Closed-segment intersection test (touching counts), exact signs.

    Inputs broadcast as (..., 2).
    """
    o1 = orient_many(a0, a1, b0).astype(int)
    o2 = orient_many(a0, a1, b1).astype(int)
    o3 = orient_many(b0, b1, a0).astype(int)
    o4 = orient_many(b0, b1, a1).astype(int)
    proper = (o1 * o2 <= 0) & (o3 * o4 <= 0)
    collinear = (o1 == 0) & (o2 == 0)
    if np.any(collinear):
        a0b, a1b, b0b, b1b = np.broadcast_arrays(a0, a1, b0, b1)
        lo_a = np.minimum(a0b, a1b)
        hi_a = np.maximum(a0b, a1b)
        lo_b = np.minimum(b0b, b1b)
        hi_b = np.maximum(b0b, b1b)
        overlap = np.all((lo_a <= hi_b) & (lo_b <= hi_a), axis=-1)
        proper = np.where(collinear, overlap, proper)
    return proper


def intersecting_segment_pairs(A0, A1, B0, B1, chunk: int = 2048, pad: float = 0.0):
    """Index pairs (i, j) with segment A_i intersecting B_j (closed segments).

    Uses a bounding-box prefilter in chunks so large inputs stay in memory.
    """
    A0, A1, B0, B1 = (np.asarray(x, float) for x in (A0, A1, B0, B1))
    alo, ahi = np.minimum(A0, A1) - pad, np.maximum(A0, A1) + pad
    blo, bhi = np.minimum(B0, B1) - pad, np.maximum(B0, B1) + pad
    out_i, out_j = [], []
    for s in range(0, len(A0), chunk):
        sl = slice(s, s + chunk)
        ov = (
            (alo[sl, None, 0] <= bhi[None, :, 0])
            & (blo[None, :, 0] <= ahi[sl, None, 0])
            & (alo[sl, None, 1] <= bhi[None, :, 1])
            & (blo[None, :, 1] <= ahi[sl, None, 1])
        )
        ii, jj = np.nonzero(ov)
        if len(ii) == 0:
            continue
        ii = ii + s
        if pad > 0:
            out_i.append(ii)
            out_j.append(jj)
            continue
        hit = segments_cross_mask(A0[ii], A1[ii], B0[jj], B1[jj])
        out_i.append(ii[hit])
        out_j.append(jj[hit])
    if not out_i:
        return np.zeros(0, int), np.zeros(0, int)
    return np.concatenate(out_i), np.concatenate(out_j)


def crossing_parity(pts: np.ndarray, poly: np.ndarray) -> np.ndarray:
    """Even-odd point-in-polygon test for many points (half-open edge rule)."""
    pts = np.asarray(pts, float)
    x, y = pts[:, 0][:, None], pts[:, 1][:, None]
    a = poly
    b = np.roll(poly, -1, axis=0)
    inside = np.zeros(len(pts), dtype=bool)
    # chunk over points to bound memory
    step = max(1, 4_000_000 // max(1, len(poly)))
    for s in range(0, len(pts), step):
        xs, ys = x[s:s + step], y[s:s + step]
        cond = (a[None, :, 1] > ys) != (b[None, :, 1] > ys)
        with np.errstate(divide="ignore", invalid="ignore"):
            xint = a[None, :, 0] + (ys - a[None, :, 1]) * (b[None, :, 0] - a[None, :, 0]) / (
                b[None, :, 1] - a[None, :, 1]
            )
        inside[s:s + step] = np.logical_xor.reduce(cond & (xs < xint), axis=1)
    return inside


def distance_to_polyline(pts: np.ndarray, poly: np.ndarray, closed: bool = True) -> np.ndarray:
    pts = np.asarray(pts, float)
    a = poly if closed else poly[:-1]
    b = np.roll(poly, -1, axis=0) if closed else poly[1:]
    out = np.full(len(pts), np.inf)
    step = max(1, 2_000_000 // max(1, len(a)))
    for s in range(0, len(pts), step):
        d, _ = point_segment_distance(pts[s:s + step, None, :], a[None], b[None])
        out[s:s + step] = d.min(axis=1)
    return out
