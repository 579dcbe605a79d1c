from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from planehomeo.dynamics import (NON_ESCAPING, Verdict, displacement_winding, escape_map, find_fixed_points,
                                 find_periodic, free_disk_check, grid_margin, theorem_verdict)
from planehomeo.dynamics.degree import box_curve
from planehomeo.errors import MarginTooSmall
from planehomeo.geom import domain, intersect_domains, rectangle, regular_polygon
from planehomeo.pl import build_pl_homeo, mesh_domain
from planehomeo.scenarios.generators import planted_periodic, segment_semicircle, shifted_perturbation

from oracles import brute_degree, degree_case


def linear_map(D, L, c=(0.0, 0.0), shift=(0.0, 0.0), step=None):
    tri = mesh_domain(D, boundary_step=step) if step else mesh_domain(D)
    c = np.asarray(c, float)
    return build_pl_homeo(tri, (tri.vertices - c) @ np.asarray(L, float).T + c + shift)


def rot(a):
    return np.array([[np.cos(a), -np.sin(a)], [np.sin(a), np.cos(a)]])


HEX = domain(regular_polygon(24))


@pytest.fixture(scope="module")
def rotation3():
    return linear_map(HEX, rot(2 * np.pi / 3), step=0.25)


@pytest.fixture(scope="module")
def semicircle():
    f = segment_semicircle().map
    comps = intersect_domains(f.domain, f.image)
    return f, sorted(comps, key=lambda c: c.vertices[:, 0].mean())


# displacement_winding -------------------------------------------------------

def test_winding_rotation_by_pi_is_one():
    f = linear_map(domain(rectangle(-2, -2, 2, 2)), rot(np.pi))
    assert displacement_winding(f, box_curve((0.0, 0.0), 1.0)) == 1


def test_winding_translation_is_zero():
    f = linear_map(domain(rectangle(-2, -2, 2, 2)), np.eye(2), shift=(0.3, 0.1))
    assert displacement_winding(f, box_curve((0.0, 0.0), 1.0)) == 0


def test_winding_saddle_is_minus_one():
    f = linear_map(domain(rectangle(-2, -2, 2, 2)), np.diag([2.0, 0.5]), c=(0.2, -0.1))
    assert displacement_winding(f, box_curve((0.0, 0.0), 1.0)) == -1


def test_winding_raises_on_vanishing_displacement():
    f = linear_map(domain(rectangle(-2, -2, 2, 2)), rot(np.pi))
    # the curve passes through the fixed point at the origin
    with pytest.raises(MarginTooSmall):
        displacement_winding(f, box_curve((1.0, 0.0), 1.0))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 100_000))
def test_winding_matches_crossing_oracle(seed):
    f, curve = degree_case(seed)
    want, dist = brute_degree(f.source.vertices, f.source.triangles, f.targets, curve)
    try:
        got = displacement_winding(f, curve)
    except MarginTooSmall:
        assert dist < 1e-2
        return
    assert got == want


# find_fixed_points ---------------------------------------------------------------

def test_rotation_single_certified_fixed_point(rotation3):
    fps = find_fixed_points(rotation3, HEX)
    assert len(fps) == 1
    c = fps[0]
    assert c.certified and c.winding == 1
    assert np.linalg.norm(c.witness) < 1e-9 and c.residual < 1e-9
    assert c.contains((0.0, 0.0))


def test_translation_has_no_fixed_points():
    D = domain(rectangle(0, 0, 1, 1))
    f = linear_map(D, np.eye(2), shift=(0.2, 0.0))
    fps = find_fixed_points(f, D)
    assert len(fps) == 0
    assert fps.margin == pytest.approx(0.2, rel=1e-9)
    assert fps.rigorous and not fps.truncated


def test_planted_fixed_point_at_vertex():
    D = domain(rectangle(-1, -1, 1, 1))
    tri = mesh_domain(D)
    c = tri.vertices[np.argmin(np.linalg.norm(tri.vertices - [0.3, 0.2], axis=1))]
    f = build_pl_homeo(tri, (tri.vertices - c) @ rot(0.5).T * 0.8 + c)
    fps = find_fixed_points(f, D)
    assert len(fps) == 1
    assert np.linalg.norm(np.array(fps[0].witness) - c) <= 1e-9
    assert fps[0].certified


def test_identity_reports_truncation():
    D = domain(rectangle(0, 0, 1, 1))
    f = linear_map(D, np.eye(2))
    fps = find_fixed_points(f, D, leaf=1 / 16, max_points=8)
    assert fps.truncated and len(fps) == 8


def test_grid_margin_positive_for_shift():
    g = shifted_perturbation(3)
    m, where = grid_margin(g.map, g.D, 200)
    assert m >= g.planted["min_displacement"] - 1e-12
    assert g.D.contains(where[None], closed=True)[0]


# find_periodic ----------------------------------------------------------------

def test_rotation_period_three_found_two_absent(rotation3):
    orbits = find_periodic(rotation3, HEX, 3)
    assert orbits  # every non-centre point is period 3; the search reports at least one orbit
    for r in orbits:
        assert r.residual <= 1e-9
        assert len({tuple(np.round(p, 6)) for p in r.orbitPoints}) == 3
        assert r.single_component
    assert find_periodic(rotation3, HEX, 2) == []


def test_semicircle_orbit_needs_both_components(semicircle):
    f, comps = semicircle
    left = comps[0]
    free = find_periodic(f, left, 2, itinerary_filter=False, components=comps)
    assert len(free) >= 1
    r = free[0]
    assert set(r.componentItinerary) == {0, 1}
    assert r.residual <= 1e-8
    assert find_periodic(f, left, 2, itinerary_filter=True, components=comps) == []
    assert len(find_fixed_points(f, f.domain)) == 0


# escape_map ----------------------------------------------------------------------

def test_escape_translation_bounded_by_drift():
    D = domain(rectangle(0, 0, 1, 1))
    f = linear_map(D, np.eye(2), shift=(0.0, 0.3))
    C = intersect_domains(f.domain, f.image)[0]
    field = escape_map(f, C, gridN=50, maxIter=100)
    assert field.n_non_escaping == 0
    assert field.max_time <= int(np.ceil(1.0 / 0.3))
    assert np.all(field.times[field.inside] >= 1)


def test_escape_rotation_never_escapes(rotation3):
    C = intersect_domains(rotation3.domain, rotation3.image)[0]
    field = escape_map(rotation3, C, gridN=41, maxIter=30)
    centre = field.times[20, 20]
    assert centre == NON_ESCAPING


def test_escape_semicircle_time_one(semicircle):
    f, comps = semicircle
    for C in comps:
        field = escape_map(f, C, gridN=40, maxIter=10)
        t = field.times[field.inside]
        assert t.size and np.all(t == 1)


# free_disk_check -----------------------------------------------------------------

def test_free_disk_under_translation():
    D = domain(rectangle(0, 0, 6, 1))
    f = linear_map(D, np.eye(2), shift=(0.25, 0.0))
    U = rectangle(0.1, 0.4, 0.3, 0.6)
    res = free_disk_check(f, U, n=10)
    assert res.ok and res.precondition
    assert res.min_distance == pytest.approx(0.05, abs=1e-9)


def test_free_disk_rejects_overlapping_disk():
    D = domain(rectangle(0, 0, 6, 1))
    f = linear_map(D, np.eye(2), shift=(0.25, 0.0))
    res = free_disk_check(f, rectangle(0.1, 0.4, 0.6, 0.6), n=3)
    assert not res.ok and not res.precondition and res.witness == (0, 1)


# theorem_verdict -----------------------------------------------------------------

def test_verdict_rotation_consistent_with_fixed_point(rotation3):
    rec = theorem_verdict(rotation3, HEX, K_max=3)
    assert rec.verdict is Verdict.CONSISTENT
    assert rec.fixed_points and rec.periodic[3]


def test_verdict_semicircle_consistent_empty(semicircle):
    f, comps = semicircle
    for C in comps:
        rec = theorem_verdict(f, C, K_max=3, components=comps)
        assert rec.verdict is Verdict.CONSISTENT
        assert not rec.has_periodic and not rec.fixed_points


def test_verdict_budget_is_inconclusive():
    D = domain(rectangle(0, 0, 1, 1))
    f = linear_map(D, np.eye(2), shift=(1e-4, 0.0))
    rec = theorem_verdict(f, intersect_domains(f.domain, f.image)[0], K_max=2, max_boxes=50)
    assert rec.verdict is Verdict.INCONCLUSIVE and rec.budget_exceeded


# properties ------------------------------------------------------------------

@settings(max_examples=4, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([2, 3]))
def test_planted_orbit_forces_fixed_point(seed, k):
    g = planted_periodic(seed, k, h=0.12)
    f = g.map
    C = intersect_domains(f.domain, f.image)
    assert len(C) == 1
    orbits = find_periodic(f, C[0], k)
    assert orbits
    fps = find_fixed_points(f, C[0])
    # the PL interpolant moves the planted centre by an O(h^2) amount
    assert any(c.certified and np.linalg.norm(np.array(c.witness) - g.planted["fixed"]) < 1e-2 for c in fps)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10_000))
def test_fixed_point_dichotomy(seed):
    # either a certified fixed point or a positive grid margin with an empty search
    f, _ = degree_case(seed)
    fps = find_fixed_points(f, f.domain)
    if len(fps):
        assert all(c.residual <= 1e-10 for c in fps)
        x = np.array([c.witness for c in fps])
        assert np.all(np.linalg.norm(f.forward(x) - x, axis=1) <= 1e-9)
    else:
        assert fps.margin > 0
