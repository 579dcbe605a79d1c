from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from planehomeo.errors import (ContainmentViolation, DegenerateArea, InvalidGeometry, InvalidInput,
                               NonPositiveEpsilon, SelfIntersection)
from planehomeo.geom import (Location, PolyArc, domain, epsilon_components, intersect_domains, lobes, locate,
                             orient, rectangle, regular_polygon, separation_threshold, validate_jordan)
from planehomeo.geom.sampling import random_polygon_pair, random_star_polygon

from oracles import (boundary_parameter, brute_point_distance, brute_polyline_distance, ray_parity,
                     same_cyclic_order, scanline_intersection)

SQUARE = rectangle(0, 0, 1, 1)


# orient ------------------------------------------------------------------

def test_orient_examples():
    assert orient((0, 0), (1, 0), (0, 1)) == 1
    assert orient((0, 0), (1, 0), (2, 0)) == 0
    assert orient((0, 0), (1e-30, 1), (2e-30, 2)) == 0


def test_orient_rejects_nan():
    with pytest.raises(InvalidGeometry):
        orient((0, 0), (np.nan, 0), (0, 1))


def test_orient_near_degenerate_matches_fraction():
    from fractions import Fraction
    p, q = (0.5, 0.5), (12.0, 12.0)
    for k in range(1, 60):
        r = (24.0, 24.0 + k * 2.0 ** -50)
        det = (Fraction(q[0]) - Fraction(p[0])) * (Fraction(r[1]) - Fraction(p[1])) - \
              (Fraction(q[1]) - Fraction(p[1])) * (Fraction(r[0]) - Fraction(p[0]))
        assert orient(p, q, r) == (det > 0) - (det < 0)


coord = st.floats(-1e3, 1e3, allow_nan=False)
pt = st.tuples(coord, coord)


@given(pt, pt, pt)
def test_orient_antisymmetric_and_cyclic(p, q, r):
    s = orient(p, q, r)
    assert orient(q, p, r) == -s
    assert orient(q, r, p) == s


# validate_jordan / locate --------------------------------------------------

def test_validate_square_ccw_and_cw():
    D = validate_jordan(PolyArc(SQUARE, closed=True))
    assert D.area == pytest.approx(1.0)
    Dcw = validate_jordan(PolyArc(SQUARE[::-1], closed=True))
    assert Dcw.area == pytest.approx(1.0)


def test_bowtie_self_intersection_has_witness():
    with pytest.raises(SelfIntersection) as exc:
        domain([(0, 0), (1, 1), (1, 0), (0, 1)])
    assert exc.value.witness is not None


def test_degenerate_curves_rejected():
    with pytest.raises(DegenerateArea):
        domain([(0, 0), (1, 0)])
    with pytest.raises(InvalidGeometry):  # collinear triangle doubles back on itself
        domain([(0, 0), (1, 0), (2, 0)])


def test_locate_examples():
    D = domain(SQUARE)
    assert locate((0.5, 0.5), D) is Location.INSIDE
    assert locate((1.0, 0.5), D) is Location.BOUNDARY
    assert locate((2.0, 2.0), D) is Location.OUTSIDE


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_locate_agrees_with_parity_away_from_boundary(seed):
    rng = np.random.default_rng(seed)
    P = random_star_polygon(rng, int(rng.integers(3, 20)))
    D = domain(P)
    pts = rng.uniform(-1.2, 1.2, (200, 2))
    far = brute_point_distance(D.vertices, pts) > 1e-6
    loc = D.locate(pts[far])
    assert np.array_equal(loc == Location.INSIDE, ray_parity(D.vertices, pts[far]))
    assert not np.any(loc == Location.BOUNDARY)


# intersect_domains -------------------------------------------------------------

def test_shifted_squares_one_component_alpha_beta():
    D, E = domain(SQUARE), domain(SQUARE + [0.5, 0])
    comps = intersect_domains(D, E)
    assert len(comps) == 1
    C = comps[0]
    assert C.area == pytest.approx(0.5, abs=1e-12)
    assert len(C.pieces_with("alpha")) == 1 and len(C.pieces_with("beta")) == 1
    areas, cell = scanline_intersection(D.vertices, E.vertices)
    assert abs(areas[0] - C.area) <= 4 * cell
    # Hausdorff against the exact rectangle [0.5, 1] x [0, 1]
    V = C.vertices
    assert np.all((V[:, 0] >= 0.5 - 1e-12) & (V[:, 0] <= 1 + 1e-12))
    for corner in [(0.5, 0), (1, 0), (1, 1), (0.5, 1)]:
        assert np.min(np.linalg.norm(V - corner, axis=1)) <= 2 / 1024


def test_identical_squares_all_shared():
    D = domain(SQUARE)
    comps = intersect_domains(D, domain(SQUARE.copy()))
    assert len(comps) == 1
    assert {p.label for p in comps[0].pieces} == {"shared"}


V_PRONGS = np.array([(0.5, 2), (1, 2), (1.5, 3.5), (2, 2), (2.5, 2), (1.5, 4.5)], float)


def test_two_prongs_two_components_cyclic_order():
    D = domain(rectangle(0, 0, 3, 3))
    E = domain(V_PRONGS)
    comps = intersect_domains(D, E)
    assert len(comps) == 2
    areas, cell = scanline_intersection(D.vertices, E.vertices)
    assert np.allclose(sorted(c.area for c in comps), areas, atol=4 * cell)
    for C in comps:
        assert C.check_partition() and C.check_cyclic_order() and C.check_beta_containment()
        # explicit endpoint check: a_i, b_i along dD and along dC in the same cyclic order
        ends = C.overlay.xy[C.alpha_endpoints()]
        assert same_cyclic_order(boundary_parameter(D.vertices, ends), boundary_parameter(C.vertices, ends))


def test_disjoint_domains_give_no_components():
    assert intersect_domains(domain(SQUARE), domain(SQUARE + [3, 0])) == []


@settings(max_examples=60, deadline=None)
@given(st.integers(1000, 100_000))
def test_oracle_equivalence_random_pairs(seed):
    P, Q = random_polygon_pair(seed, max_vertices=12)
    comps = intersect_domains(domain(P), domain(Q))
    areas, cell = scanline_intersection(domain(P).vertices, domain(Q).vertices, n=256)
    assert len(comps) == len(areas)
    assert np.allclose(sorted(c.area for c in comps), areas, atol=4 * cell)
    for C in comps:
        assert C.boundary.is_simple()[0]
        assert C.domain.area > 0
        assert C.check_partition()
        assert C.check_cyclic_order()
        assert C.check_beta_containment(samples=50)


# lobes -------------------------------------------------------------------------

def test_lobes_shifted_squares_area_balance():
    D, E = domain(SQUARE), domain(SQUARE + [0.5, 0])
    C = intersect_domains(D, E)[0]
    L = lobes(D, E, C)
    A = [l for l in L if l.side == "A"]
    B = [l for l in L if l.side == "B"]
    assert len(A) == 1 and len(B) == 1
    assert sum(l.region.area for l in A) == pytest.approx(E.area - C.area)
    assert sum(l.region.area for l in B) == pytest.approx(D.area - C.area)


def test_lobes_containment_with_shared_boundary():
    D, E = domain(SQUARE), domain(rectangle(0, 0, 2, 1))
    C = intersect_domains(D, E)[0]
    L = lobes(D, E, C)
    assert [l.side for l in L] == ["A"]
    assert L[0].region.area == pytest.approx(1.0)


def test_lobes_strict_interior_containment_is_annulus():
    D, E = domain(SQUARE), domain(rectangle(-1, -1, 2, 2))
    C = intersect_domains(D, E)[0]
    with pytest.raises(ContainmentViolation):
        lobes(D, E, C)


def test_lens_lobes_one_inner_one_outer_arc():
    D = domain(regular_polygon(64))
    E = domain(regular_polygon(64, center=(1.0, 0.0), phase=0.01))
    C = intersect_domains(D, E)[0]
    L = lobes(D, E, C)
    assert sorted(l.side for l in L) == ["A", "B"]
    for l in L:
        inner, outer = l.innerArc, l.outerArc
        assert np.allclose(inner.vertices[0], outer.vertices[-1]) and np.allclose(inner.vertices[-1], outer.vertices[0])
        assert len(inner.vertices) + len(outer.vertices) - 2 == len(l.region.vertices)


# epsilon neighbourhoods ------------------------------------------------------

def test_epsilon_examples():
    a, b = rectangle(0, 0, 1, 1), rectangle(2, 0, 3, 1)
    assert epsilon_components([a, b], 0.4).n_components == 2
    assert epsilon_components([a, b], 0.6).n_components == 1
    segs = [[(0, 0), (1, 0)], [(1.2, 0), (2, 0)], [(2.8, 0), (4, 0)]]
    assert epsilon_components(segs, 0.3).n_components == 2
    with pytest.raises(NonPositiveEpsilon):
        epsilon_components([a, b], 0.0)


def test_separation_threshold_examples():
    a, b = rectangle(0, 0, 1, 1), rectangle(2, 0, 3, 1)
    assert separation_threshold(a, b) == pytest.approx(0.5)
    cshape = np.array([(0, 0), (3, 0), (3, 0.5), (0.5, 0.5), (0.5, 1.5), (3, 1.5), (3, 2), (0, 2)], float)
    bar = rectangle(0.6, 0.6, 2.5, 1.4)
    assert separation_threshold(cshape, bar) == pytest.approx(brute_polyline_distance(cshape, bar) / 2)
    assert separation_threshold(cshape, bar) == pytest.approx(0.05)
    with pytest.raises(InvalidInput):
        separation_threshold(a, rectangle(1, 0, 2, 1))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.lists(st.floats(0.01, 2.0), min_size=2, max_size=8))
def test_epsilon_monotone_coarsening(seed, epss):
    rng = np.random.default_rng(seed)
    base = [random_star_polygon(rng, 5, center=rng.uniform(-3, 3, 2), rmin=0.2, rmax=0.4) for _ in range(5)]
    parts = [epsilon_components(base, e) for e in sorted(epss)]
    for fine, coarse in zip(parts, parts[1:]):
        assert fine.refines(coarse)
