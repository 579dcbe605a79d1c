from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from planehomeo.errors import FlippedTriangle, OutsideDomain, OutsideImage, TargetBoundaryNotSimple
from planehomeo.geom import domain, intersect_domains, rectangle, regular_polygon
from planehomeo.pl import (PLHomeo, build_pl_homeo, compose, evaluate, identity_map, invert,
                           is_orientation_preserving, iterate, mesh_domain, power, random_op_homeo)
from planehomeo.pl.homeo import image_triangle_signs
from planehomeo.scenarios.generators import segment_semicircle

SQUARE = domain(rectangle(0, 0, 1, 1))


@pytest.fixture(scope="module")
def square_mesh():
    return mesh_domain(SQUARE)


def rotation(k_sides=66, turn=2 * np.pi / 3):
    D = domain(regular_polygon(k_sides))
    tri = mesh_domain(D)
    c, s = np.cos(turn), np.sin(turn)
    return build_pl_homeo(tri, tri.vertices @ np.array([[c, s], [-s, c]]))


def interior_samples(D, n, seed=0):
    rng = np.random.default_rng(seed)
    lo, hi = D.vertices.min(0), D.vertices.max(0)
    pts = rng.uniform(lo, hi, (4 * n, 2))
    return pts[D.contains(pts, closed=False)][:n]


# build_pl_homeo -------------------------------------------------------------

def test_identity_targets_give_identity(square_mesh):
    f = build_pl_homeo(square_mesh, square_mesh.vertices)
    x = interior_samples(SQUARE, 50)
    assert np.allclose(evaluate(f, x), x, atol=1e-14)
    assert is_orientation_preserving(f)


def test_translation_targets(square_mesh):
    f = build_pl_homeo(square_mesh, square_mesh.vertices + [2, 0])
    assert np.allclose(f.image.vertices, f.domain.vertices + [2, 0])
    x = interior_samples(SQUARE, 50)
    assert np.allclose(evaluate(f, x), x + [2, 0], atol=1e-13)
    assert np.allclose(invert(f, x + [2, 0]), x, atol=1e-13)


def test_swapped_interior_targets_flip(square_mesh):
    T = square_mesh.vertices.copy()
    inner = np.nonzero(~square_mesh.boundary_mask)[0]
    # swap the two interior vertices farthest apart: some incident triangle must fold
    d = np.linalg.norm(T[inner][:, None] - T[inner][None], axis=2)
    i, j = np.unravel_index(np.argmax(d), d.shape)
    T[[inner[i], inner[j]]] = T[[inner[j], inner[i]]]
    with pytest.raises(FlippedTriangle) as exc:
        build_pl_homeo(square_mesh, T)
    k = exc.value.index
    assert image_triangle_signs(square_mesh, T)[k] <= 0


def test_boundary_image_must_be_simple():
    # a thin strip wound 1.2 times around a circle: every triangle stays positive, the boundary overlaps
    strip = domain(rectangle(0, 0, 10, 0.1))
    tri = mesh_domain(strip, boundary_step=0.05)
    x, y = tri.vertices.T
    th, r = x * (2.4 * np.pi / 10), 1.0 - y
    T = np.c_[r * np.cos(th), r * np.sin(th)]
    assert np.all(image_triangle_signs(tri, T) > 0)
    with pytest.raises(TargetBoundaryNotSimple):
        build_pl_homeo(tri, T)


def test_evaluate_on_shared_edge_consistent(square_mesh):
    f = random_op_homeo(3, SQUARE, 0.05, mesh=square_mesh)
    tri = square_mesh
    V, T = tri.vertices, tri.triangles
    # an interior edge and the two triangles on either side
    edges = {}
    for t, (a, b, c) in enumerate(T):
        for u, v in ((a, b), (b, c), (c, a)):
            edges.setdefault((min(u, v), max(u, v)), []).append(t)
    (u, v), ts = next((e, ts) for e, ts in sorted(edges.items()) if len(ts) == 2)
    p = 0.37 * V[u] + 0.63 * V[v]
    vals = []
    for t in ts:
        A = np.vstack([V[T[t]].T, np.ones(3)])
        lam = np.linalg.solve(A, np.r_[p, 1.0])
        vals.append(lam @ f.targets[T[t]])
    assert np.linalg.norm(vals[0] - vals[1]) <= 1e-14
    assert np.linalg.norm(evaluate(f, p) - vals[0]) <= 1e-14


def test_outside_raises(square_mesh):
    f = build_pl_homeo(square_mesh, square_mesh.vertices + [2, 0])
    with pytest.raises(OutsideDomain):
        evaluate(f, [5.0, 5.0])
    with pytest.raises(OutsideImage):
        invert(f, [0.5, 0.5])
    assert np.all(np.isnan(f.forward(np.array([[5.0, 5.0]]))))


def test_reflection_not_orientation_preserving():
    D = domain(regular_polygon(24))
    tri = mesh_domain(D)
    f = PLHomeo(tri, tri.vertices * [-1, 1])
    assert not is_orientation_preserving(f)


# composition and powers -----------------------------------------------------------

def test_compose_with_identity(square_mesh):
    f = random_op_homeo(5, SQUARE, 0.05, mesh=square_mesh)
    x = interior_samples(SQUARE, 100)
    assert np.array_equal(compose(f, identity_map()).forward(x), f.forward(x))


def test_power_of_translation(square_mesh):
    big = domain(rectangle(0, 0, 4, 1))
    tri = mesh_domain(big)
    f = build_pl_homeo(tri, tri.vertices + [0.5, 0])
    x = np.array([[0.2, 0.5], [0.1, 0.3]])
    assert np.allclose(power(f, 3).forward(x), x + [1.5, 0], atol=1e-13)
    # leaves the domain after the intermediate image exits
    assert np.all(np.isnan(power(f, 10).forward(x)))


def test_rotation_cubed_is_identity():
    f = rotation()
    x = interior_samples(f.domain, 100)
    assert np.max(np.linalg.norm(power(f, 3).forward(x) - x, axis=1)) < 1e-10


# random_op_homeo -----------------------------------------------------------------

def test_random_scale_zero_is_identity(square_mesh):
    f = random_op_homeo(1, SQUARE, 0.0, mesh=square_mesh)
    assert np.array_equal(f.targets, square_mesh.vertices)


def test_random_seed42_validates_and_reproduces(square_mesh):
    f = random_op_homeo(42, SQUARE, 0.05, mesh=square_mesh)
    g = random_op_homeo(42, SQUARE, 0.05, mesh=square_mesh)
    assert is_orientation_preserving(f)
    assert np.array_equal(f.targets, g.targets)
    build_pl_homeo(square_mesh, f.targets)


def test_random_many_seeds_all_validate():
    tri = mesh_domain(SQUARE, boundary_step=0.2)
    for seed in range(1000):
        f = random_op_homeo(seed, SQUARE, 0.05, mesh=tri)
        assert is_orientation_preserving(f)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.floats(0.01, 0.3))
def test_round_trip_and_injectivity(seed, scale):
    f = random_op_homeo(seed, SQUARE, scale)
    x = interior_samples(SQUARE, 1000, seed)
    y = f.forward(x)
    assert np.max(np.linalg.norm(f.inverse(y) - x, axis=1)) < 1e-10
    ys = interior_samples(f.image, 300, seed + 1)
    assert np.max(np.linalg.norm(f.forward(f.inverse(ys)) - ys, axis=1)) < 1e-10
    # injectivity sampling: distinct inputs stay distinct
    a, b = x[:500], x[500:1000]
    keep = np.linalg.norm(a - b, axis=1) > 1e-9
    assert np.all(np.linalg.norm(f.forward(a[keep]) - f.forward(b[keep]), axis=1) > 1e-12)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000))
def test_composition_stays_orientation_preserving(seed):
    f = random_op_homeo(seed, SQUARE, 0.05)
    g = random_op_homeo(seed + 1, f.image, 0.05)
    h = compose(g, f)
    x = interior_samples(SQUARE, 300, seed)
    step = 1e-7
    fx, fdx, fdy = h.forward(x), h.forward(x + [step, 0]), h.forward(x + [0, step])
    ok = np.all(np.isfinite(fx), axis=1) & np.all(np.isfinite(fdx), axis=1) & np.all(np.isfinite(fdy), axis=1)
    e1, e2 = (fdx - fx)[ok], (fdy - fx)[ok]
    assert ok.sum() > 100
    assert np.all(e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0] > 0)


# orbits --------------------------------------------------------------------------

def test_fixed_point_constant_orbit():
    f = rotation()
    rec = iterate(f, [0.0, 0.0], 10, trackComponent=intersect_domains(f.domain, f.image)[0])
    assert len(rec) == 11 and rec.escapeIndex is None
    assert np.allclose(rec.points, 0.0, atol=1e-14)


def test_segment_semicircle_orbit_alternates():
    g = segment_semicircle()
    f = g.map
    comps = intersect_domains(f.domain, f.image)
    left = min(comps, key=lambda c: c.vertices[:, 0].mean())
    rec = iterate(f, [-1.0, 0.0], 3, trackComponent=left, components=comps)
    assert rec.escapeIndex == 1
    right = max(comps, key=lambda c: c.vertices[:, 0].mean())
    assert right.contains(rec.points[1][None])[0]


def test_translation_orbit_escapes(square_mesh):
    from planehomeo.scenarios.generators import wavy_translation
    F = wavy_translation(0.0, (0.3, 0.0))
    rec = iterate(F, [0.5, 0.5], 50, trackComponent=SQUARE)
    assert rec.escapeIndex is not None and rec.escapeIndex <= int(np.ceil(SQUARE.diameter / 0.3)) + 1


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_orbit_points_match_repeated_evaluation(seed):
    f = rotation(turn=0.4 + seed % 7 * 0.1)
    x = interior_samples(f.domain, 1, seed)[0]
    rec = iterate(f, x, 12)
    p = x.copy()
    for k, q in enumerate(rec.points):
        assert np.linalg.norm(q - p) <= 1e-9 * max(k, 1)
        p = evaluate(f, p)
