from __future__ import annotations

import numpy as np
import pytest

from planehomeo.dynamics import find_fixed_points
from planehomeo.geom import intersect_domains, rectangle, domain
from planehomeo.geom.neighborhood import set_distance
from planehomeo.pl import build_pl_homeo, mesh_domain
from planehomeo.reduction import TAU_FIX, fixed_point_transfer_check, reduce_to_connected
from planehomeo.scenarios.generators import segment_semicircle


def rotated_square(turn=2 * np.pi / 3):
    D = domain(rectangle(-1, -1, 1, 1))
    tri = mesh_domain(D)
    c, s = np.cos(turn), np.sin(turn)
    return build_pl_homeo(tri, tri.vertices @ np.array([[c, s], [-s, c]]))


@pytest.fixture(scope="module")
def rotation_case():
    f = rotated_square()
    comps = intersect_domains(f.domain, f.image)
    assert len(comps) == 1
    return f, comps[0], reduce_to_connected(f, comps[0])


@pytest.fixture(scope="module")
def semicircle_case():
    f = segment_semicircle().map
    comps = intersect_domains(f.domain, f.image)
    left = min(comps, key=lambda c: c.vertices[:, 0].mean())
    return f, comps, left, reduce_to_connected(f, left)


def hausdorff(A, B):
    dA = np.min(np.linalg.norm(A[:, None] - B[None], axis=2), axis=1)
    dB = np.min(np.linalg.norm(B[:, None] - A[None], axis=2), axis=1)
    return max(dA.max(), dB.max())


def test_single_component_fixed_points_unchanged(rotation_case):
    f, C, r = rotation_case
    assert len(r.gammaArcs) == 4
    fp_f = find_fixed_points(f, C)
    fp_t = find_fixed_points(r.reducedMap, C)
    assert len(fp_f) == len(fp_t) == 1
    assert np.allclose(fp_f[0].witness, fp_t[0].witness, atol=1e-9)
    # g moves only lobe points: wherever f lands in C the two maps agree bit for bit
    rng = np.random.default_rng(0)
    x = rng.uniform(-1, 1, (2000, 2))
    y = f.forward(x)
    inC = C.contains(y)
    assert np.array_equal(r.reducedMap.forward(x)[inC], y[inC])
    assert not np.allclose(r.reducedMap.forward(x)[~inC], y[~inC])


def test_semicircle_left_component_reduces_to_itself(semicircle_case):
    f, comps, left, r = semicircle_case
    rc = r.reduced_components()
    assert len(rc) == 1
    assert rc[0].area == pytest.approx(left.area, rel=1e-9)
    assert hausdorff(rc[0].vertices, left.vertices) <= 2e-12 * left.domain.diameter + 1e-15


def test_half_disks_disjoint_two_components(semicircle_case):
    f, comps, left, r = semicircle_case
    for C in comps:
        res = r if C is left else reduce_to_connected(f, C)
        assert len(res.halfDisks) == 2
        assert res.half_disk_separation() > 0
        for i in range(len(res.halfDisks)):
            for j in range(i + 1, len(res.halfDisks)):
                assert set_distance(res.halfDisks[i].vertices, res.halfDisks[j].vertices) > 0
            # each bump sits outside D and meets it only along its gamma
            mid = res.halfDisks[i].vertices.mean(axis=0)
            assert not f.domain.contains(mid[None], closed=True)[0]


def test_half_disks_disjoint_rotation(rotation_case):
    _, _, r = rotation_case
    assert r.half_disk_separation() > 0


def test_glue_identity_on_component_exactly(rotation_case):
    f, C, r = rotation_case
    rng = np.random.default_rng(1)
    y = rng.uniform(-1.2, 1.2, (4000, 2))
    y = y[C.contains(y)]
    assert np.array_equal(r.reducedMap.apply_glue(y), y)


def test_glue_fixes_gamma_and_preserves_orientation(rotation_case, semicircle_case):
    for r in (rotation_case[2], semicircle_case[3]):
        for g in r.glueMaps:
            assert g.orientation_certified()
            ends = g.gamma[[0, -1]]
            assert np.allclose(g.forward(ends), ends, atol=1e-12)
            assert np.max(np.linalg.norm(g.forward(g.gamma) - g.gamma, axis=1)) <= 1e-12


def test_reduced_image_intersects_D_in_C(rotation_case):
    f, C, r = rotation_case
    rc = r.reduced_components()
    assert len(rc) == 1
    assert hausdorff(rc[0].vertices, C.vertices) <= 2e-12 * C.domain.diameter + 1e-15


def test_planted_orbit_preserved(rotation_case):
    f, C, r = rotation_case
    p = np.array([[0.3, 0.2]])
    orbit = [p]
    for _ in range(3):
        orbit.append(f.forward(orbit[-1]))
    assert np.linalg.norm(orbit[3] - p) < 1e-12
    for x in orbit[:3]:
        assert np.array_equal(r.reducedMap.forward(x), f.forward(x))


def test_transfer_check_examples(rotation_case):
    f, C, r = rotation_case
    ok = fixed_point_transfer_check(f, C, r, [0.0, 0.0])
    assert ok and ok.residual <= TAU_FIX
    on_boundary = C.vertices[0]
    bad = fixed_point_transfer_check(f, C, r, on_boundary)
    assert not bad and "exceeds" in bad.diagnostic
    out = fixed_point_transfer_check(f, C, r, [5.0, 5.0])
    assert not out and "outside" in out.diagnostic


def test_round_trip_of_reduced_map(semicircle_case):
    f, comps, left, r = semicircle_case
    D = f.domain
    rng = np.random.default_rng(2)
    lo, hi = D.vertices.min(0), D.vertices.max(0)
    x = rng.uniform(lo, hi, (3000, 2))
    x = x[D.contains(x, closed=False)]
    y = r.reducedMap.forward(x)
    assert np.all(np.isfinite(y))
    assert np.all(r.reducedImage.contains(y, closed=True))
    assert np.max(np.linalg.norm(r.reducedMap.inverse(y) - x, axis=1)) <= 1e-9
