from __future__ import annotations

import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from planehomeo.errors import (ContainmentViolation, InsideIntersection, NotConnectedIntersection,
                               OutsideTruncation, PreconditionViolation)
from planehomeo.extension import (annulus_chart, build_partition, extend_homeo, project_and_measure,
                                  schoenflies_chart, verify_extension)
from planehomeo.extension.charts import embedding_certified
from planehomeo.geom import Location, domain, rectangle, regular_polygon
from planehomeo.geom.predicates import intersecting_segment_pairs
from planehomeo.pl import PLHomeo, build_pl_homeo, mesh_domain
from planehomeo.scenarios.generators import lens_domain, shifted_perturbation

SQUARE = domain(rectangle(0, 0, 1, 1))


@pytest.fixture(scope="module")
def translation_f():
    tri = mesh_domain(SQUARE)
    return build_pl_homeo(tri, tri.vertices + [0.5, 0.0])


@pytest.fixture(scope="module")
def translation_F(translation_f):
    return extend_homeo(translation_f)


@pytest.fixture(scope="module")
def lens_partition():
    D = lens_domain()
    return build_partition(D, domain(D.vertices + [0.9, 0.1]))


# charts --------------------------------------------------------------------------

def test_disk_chart_of_regular_polygon_near_identity():
    D = domain(regular_polygon(64))
    ch = schoenflies_chart(D, (-1.0, 0.0), (1.0, 0.0))
    assert embedding_certified(ch.model, ch.mesh.triangles)
    assert np.max(np.linalg.norm(ch.model - ch.mesh.vertices, axis=1)) < 0.05
    assert np.allclose(ch.model[ch.anchors[0]], (-1, 0)) and np.allclose(ch.model[ch.anchors[1]], (1, 0))


def test_disk_chart_thin_rectangle():
    R = domain(rectangle(0, 0, 10, 0.1))
    ch = schoenflies_chart(R, (0.0, 0.05), (10.0, 0.05))
    assert embedding_certified(ch.model, ch.mesh.triangles)
    x = np.array([[5.0, 0.05], [1.0, 0.02], [9.5, 0.09]])
    assert np.allclose(ch.to_world(ch.to_model(x)), x, atol=1e-10)


def test_disk_chart_l_shape_few_refinements():
    L = domain([(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)])
    ch = schoenflies_chart(L, (0.0, 0.0), (1.0, 2.0))
    assert embedding_certified(ch.model, ch.mesh.triangles)
    assert ch.refinements <= 2


def test_disk_chart_boundary_monotone():
    D = domain([(0, 0), (3, 0), (3, 1), (2, 0.5), (1, 1.5), (0, 1)])
    ch = schoenflies_chart(D, (0.0, 0.0), (3.0, 1.0))
    for chain in (ch.lower_chain, ch.upper_chain):
        x = ch.model[chain, 0]
        assert np.all(np.diff(x) > 0)


def test_annulus_chart_certified_and_invertible():
    inner = regular_polygon(24, 0.7)
    A = annulus_chart(inner, center=(0, 0), R=3.0)
    assert embedding_certified(A.model, A.mesh.triangles)
    rng = np.random.default_rng(0)
    r = rng.uniform(0.75, 2.9, 200)
    t = rng.uniform(0, 2 * np.pi, 200)
    x = np.c_[r * np.cos(t), r * np.sin(t)]
    XY = A.to_model(x)
    assert np.all((XY[:, 0] > 0) & (XY[:, 0] < 1))
    assert np.allclose(A.to_world(XY), x, atol=1e-9)


# partition ---------------------------------------------------------------------

def _meetings(dom, arc):
    """Number of times a sampled arc meets the boundary of ``dom``."""
    s = dom.locate(arc)
    runs = [int(v) for k, v in enumerate(s) if k == 0 or v != s[k - 1]]
    hits = sum(1 for v in runs if v == Location.BOUNDARY)
    hits += sum(1 for a, b in zip(runs, runs[1:]) if {a, b} == {Location.INSIDE, Location.OUTSIDE})
    return hits


def test_square_partition_arcs_meet_each_boundary_once(translation_F):
    P = translation_F.partition
    assert P.density == 256
    for k in range(P.n_arcs):
        arc = P.arcs[k]
        inside_R = np.linalg.norm(arc - P.center, axis=1) <= P.R
        arc = arc[inside_R]
        assert _meetings(P.D, arc) == 1, k
        assert _meetings(P.E, arc) == 1, k


def test_square_partition_lambda_monotone(translation_F):
    P = translation_F.partition
    for k in np.linspace(0, P.n_arcs - 1, 50).astype(int):
        lam = P.lambdaD[k]
        lam = lam[np.isfinite(lam)]
        assert lam[0] == pytest.approx(0.0, abs=1e-12)
        assert np.all(np.diff(lam) > 0)
        lamE = P.lambdaE[k][np.isfinite(P.lambdaE[k])]
        assert lamE[0] == pytest.approx(0.0, abs=1e-12) and np.all(np.diff(lamE) > 0)


def test_lens_arcs_pairwise_disjoint(lens_partition):
    P = lens_partition
    pick = np.arange(0, P.n_arcs, max(1, P.n_arcs // 160))
    segs0, segs1, owner = [], [], []
    for k in pick:
        a = P.arcs[k]
        a = a[np.all(np.isfinite(a), axis=1)]
        segs0.append(a[:-1])
        segs1.append(a[1:])
        owner.append(np.full(len(a) - 1, k))
    A0, A1, own = np.vstack(segs0), np.vstack(segs1), np.concatenate(owner)
    ii, jj = intersecting_segment_pairs(A0, A1, A0, A1)
    other = own[ii] != own[jj]
    starts = {k: P.arcs[k][0] for k in pick}
    for i, j in zip(ii[other], jj[other]):
        shared = np.linalg.norm(starts[own[i]] - starts[own[j]]) <= 1e-12 and \
            (np.linalg.norm(A0[i] - starts[own[i]]) <= 1e-12 or np.linalg.norm(A0[j] - starts[own[j]]) <= 1e-12)
        assert shared, (own[i], own[j])


def test_partition_coverage(lens_partition):
    P = lens_partition
    rng = np.random.default_rng(1)
    r = P.R * np.sqrt(rng.uniform(0, 1, 20_000)) * 0.999
    t = rng.uniform(0, 2 * np.pi, 20_000)
    x = P.center + np.c_[r * np.cos(t), r * np.sin(t)]
    inner = (P.D.locate(x) == Location.INSIDE) & (P.E.locate(x) == Location.INSIDE)
    th = P.measure(x[~inner])["theta"]
    assert np.mean(np.isfinite(th)) >= 1 - 1e-3


def test_partition_preconditions():
    with pytest.raises(NotConnectedIntersection):
        build_partition(domain(rectangle(0, 0, 3, 3)),
                        domain([(0.5, 2), (1, 2), (1.5, 3.5), (2, 2), (2.5, 2), (1.5, 4.5)]))
    with pytest.raises(ContainmentViolation):
        build_partition(SQUARE, domain(rectangle(-1, -1, 2, 2)))
    with pytest.raises(PreconditionViolation):
        build_partition(SQUARE, domain(rectangle(0.5, 0, 1.5, 1)), R=1.0)


def test_project_and_measure_examples(translation_F):
    P = translation_F.partition
    x = np.array([0.2, 0.0])  # on dD outside E
    m = project_and_measure(P, x)
    assert m.lamD == pytest.approx(0.0, abs=1e-12) and np.allclose(m.piD, x, atol=1e-12)
    y = np.array([1.3, 1.0])  # on dE outside D
    m = project_and_measure(P, y)
    assert m.lamE == pytest.approx(0.0, abs=1e-12) and np.allclose(m.piE, y, atol=1e-12)
    k = P.n_arcs // 3
    lam = P.lambdaD[k]
    j = int(np.nonzero(np.isfinite(lam))[0][len(np.nonzero(np.isfinite(lam))[0]) // 2])
    m = project_and_measure(P, P.arcs[k][j])
    assert m.arcId == k
    with pytest.raises(InsideIntersection):
        project_and_measure(P, [0.75, 0.5])
    with pytest.raises(OutsideTruncation):
        project_and_measure(P, P.center + [2 * P.R, 0])


# extension ----------------------------------------------------------------------

def test_extension_defining_equation(translation_f, translation_F):
    F = translation_F
    x = np.array([[1.2, 0.5]])
    lamD = F.partition.measure(x)["lamD"][0]
    y = F.forward(x)
    mE = F.partition.measure(y)
    assert abs(mE["lamE"][0] - lamD) < 1e-9
    foot = F.partition.measure(x)["piD"]
    assert np.allclose(mE["piE"], translation_f.forward(foot), atol=1e-12)


def test_extension_agrees_with_f_on_D(translation_f, translation_F):
    rng = np.random.default_rng(2)
    x = rng.uniform(0, 1, (500, 2))
    assert np.array_equal(translation_F.forward(x), translation_f.forward(x))


def test_extension_grid_margin_positive(translation_F):
    rep = verify_extension(translation_F, nSamples=2000, gridN=200)
    assert rep["fixed_point_margin"].value > 0


def test_verify_translation_all_pass(translation_F):
    rep = verify_extension(translation_F, nSamples=10_000)
    assert rep.passed, rep.to_json()
    assert [c.name for c in rep.checks] == ["arc_transport", "injectivity", "seam_continuity", "fixed_point_margin"]


def test_verify_identity_waived():
    tri = mesh_domain(SQUARE)
    f = build_pl_homeo(tri, tri.vertices)
    with pytest.raises(PreconditionViolation):
        extend_homeo(f)
    F = extend_homeo(f, waive_fixed_point_free=True)
    rep = verify_extension(F, nSamples=2000)
    assert rep["fixed_point_margin"].value == 0.0 and not rep["fixed_point_margin"].passed
    assert all(rep[n].passed for n in ("arc_transport", "injectivity", "seam_continuity"))


def test_verify_corrupted_lambda_fails_with_witness(translation_F):
    P = translation_F.partition
    bad = P.lambdaD.copy()
    k = P.n_arcs // 2
    fin = np.isfinite(bad[k])
    bad[k, fin] = bad[k, fin] * 1.5 + 0.01
    F2 = dataclasses.replace(translation_F, partition=dataclasses.replace(P, lambdaD=bad), _cache={})
    rep = verify_extension(F2, nSamples=P.lambdaD.size)
    chk = rep["arc_transport"]
    assert not chk.passed and chk.witness is not None and chk.witness[0] == k


def test_verify_seam_jump_detected(translation_F):
    class Jumpy(type(translation_F)):
        # shifts every point off D, a discontinuity along the seam dD
        def forward(self, pts, strict=False):
            x = np.asarray(pts, float).reshape(-1, 2)
            y = super().forward(x).copy()
            y[~self.partition.D.contains(x, closed=True)] += [0.0, 0.02]
            return y.reshape(np.shape(pts))

    F = Jumpy(translation_F.core, translation_F.partition)
    rep = verify_extension(F, nSamples=2000)
    assert not rep["seam_continuity"].passed
    assert rep["seam_continuity"].value > 0.5


def test_extend_rejects_orientation_reversing():
    D = domain(regular_polygon(24))
    tri = mesh_domain(D)
    with pytest.raises(PreconditionViolation):
        extend_homeo(PLHomeo(tri, tri.vertices * [-1, 1] + [1.0, 0]))


def test_inverse_consistency_and_contradiction(translation_f, translation_F):
    F = translation_F
    P = F.partition
    rng = np.random.default_rng(3)
    r = 0.99 * P.R * np.sqrt(rng.uniform(0, 1, 4000))
    t = rng.uniform(0, 2 * np.pi, 4000)
    x = P.center + np.c_[r * np.cos(t), r * np.sin(t)]
    assert np.nanmax(np.linalg.norm(F.inverse(F.forward(x)) - x, axis=1)) <= 1e-8
    # quantitative contradiction: just outside dD the displacement of F is that of f at the foot
    u = rng.uniform(0, len(P.D.vertices), 500)
    from planehomeo.geom.polygon import loop_point
    b = loop_point(P.D.vertices, u)
    out = b + 1e-5 * (b - [0.5, 0.5]) / np.linalg.norm(b - [0.5, 0.5], axis=1)[:, None]
    dF = np.linalg.norm(F.forward(out) - out, axis=1)
    foot = P.measure(out)["piD"]
    df = np.linalg.norm(translation_f.forward(foot) - foot, axis=1)
    assert np.max(np.abs(dF - df)) <= 1e-2


@settings(max_examples=6, deadline=None)
@given(st.integers(0, 1000), st.sampled_from(["square", "lens"]))
def test_defining_equation_property(seed, shape):
    g = shifted_perturbation(seed, shape)
    F = extend_homeo(g.map, density=128)
    P = F.partition
    rng = np.random.default_rng(seed)
    r = 0.98 * P.R * np.sqrt(rng.uniform(0, 1, 3000))
    t = rng.uniform(0, 2 * np.pi, 3000)
    x = P.center + np.c_[r * np.cos(t), r * np.sin(t)]
    x = x[P.D.locate(x) == Location.OUTSIDE]
    lam_err, foot_err = F.transport_residuals(x)
    ok = np.isfinite(lam_err)
    assert ok.mean() > 0.99
    assert np.max(lam_err[ok]) <= 1e-9
    assert np.max(foot_err[ok]) <= 1e-12 * max(1.0, P.D.diameter) * 10
