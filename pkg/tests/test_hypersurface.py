import numpy as np
import pytest

from arboreal.errors import ValidationError
from arboreal.hypersurface import (
    build_pl_strata,
    build_smoothed,
    conormal_direction,
    eval_g,
    lagrangian_model,
    membership,
    sample_stratum,
)
from arboreal.profile import make_default_profile
from arboreal.trees import (
    LeafyForest,
    SignedForest,
    SignedRootedTree,
    delete_root,
    enumerate_signed_rooted_trees,
)


@pytest.fixture(scope="module")
def prof():
    return make_default_profile()


def forest_singleton():
    return SignedForest([SignedRootedTree((1,), 1, (), {})])


def forest_chain2(sign):
    return SignedForest(
        [SignedRootedTree((1, 2), 1, ((1, 2),), {(1, 2): sign}, all_signed=True)]
    )


def forest_chain3(s1, s2):
    return SignedForest(
        [
            SignedRootedTree(
                (1, 2, 3),
                1,
                ((1, 2), (2, 3)),
                {(1, 2): s1, (2, 3): s2},
                all_signed=True,
            )
        ]
    )


def forest_two_singletons():
    return SignedForest(
        [SignedRootedTree((1,), 1, (), {}), SignedRootedTree((2,), 2, (), {})]
    )


# --- PL strata ---------------------------------------------------------------


def test_pl_single_vertex():
    h = build_pl_strata(forest_singleton())
    assert h.dim == 1
    (s,) = h.strata
    assert s.pl_constraints == []
    assert s.equality_coord == 0


def test_pl_two_chain_signs():
    hp = build_pl_strata(forest_chain2(1))
    child = [s for s in hp.strata if s.chain.depth() == 1][0]
    assert child.pl_constraints == [(0, 1)]
    hm = build_pl_strata(forest_chain2(-1))
    child = [s for s in hm.strata if s.chain.depth() == 1][0]
    assert child.pl_constraints == [(0, -1)]


def test_pl_empty_forest():
    h = build_pl_strata(SignedForest([]))
    assert h.dim == 0 and h.strata == []


# --- eval_g ------------------------------------------------------------------


def test_eval_g_depth0(prof):
    f = forest_singleton()
    vals, grads = eval_g(f, 1, prof, np.array([[0.3]]))
    assert vals[0] == 0.3
    np.testing.assert_allclose(grads[0], [1.0])


def test_eval_g_two_chain_flat(prof):
    f = forest_chain2(1)
    vals, _ = eval_g(f, 2, prof, np.array([[2.0, 0.0]]))
    assert abs(vals[0]) < 1e-14


def test_eval_g_sign_flip_lands_same_locus(prof):
    f = forest_chain2(-1)
    vals, _ = eval_g(f, 2, prof, np.array([[-2.0, 0.0]]))
    assert abs(vals[0]) < 1e-14


def test_eval_g_full_sign_flip_identity(prof):
    # flipping every chain sign equals negating G after reflecting the chain
    # coordinates (exact consequence of the composition rule)
    rng = np.random.default_rng(1)
    pts = rng.uniform(-2.5, 2.5, size=(80, 3))
    for s1, s2 in [(1, 1), (1, -1), (-1, 1), (-1, -1)]:
        fp = forest_chain3(s1, s2)
        fm = forest_chain3(-s1, -s2)
        vp, _ = eval_g(fp, 3, make_default_profile(), -pts)
        vm, _ = eval_g(fm, 3, make_default_profile(), pts)
        np.testing.assert_allclose(vm, -vp, atol=1e-12)


# --- build_smoothed ----------------------------------------------------------


def test_smoothed_single_vertex_is_hyperplane(prof):
    h = build_smoothed(forest_singleton(), prof)
    (s,) = h.strata
    pts = np.array([[0.0], [0.4], [-1.0]])
    vals, grads = s.evaluate(pts)
    np.testing.assert_allclose(vals, pts[:, 0])
    np.testing.assert_allclose(grads, np.ones((3, 1)))


def test_smoothed_stratum_count_matches_vertices(prof):
    for t in enumerate_signed_rooted_trees(4):
        f = delete_root(t)
        h = build_smoothed(f, prof)
        assert len(h.strata) == f.size()


def test_smoothed_leafy_singleton_boundary_sheet(prof):
    lf = LeafyForest(forest_singleton(), frozenset({1}))
    h = build_smoothed(lf, prof)
    assert h.dim == 2
    assert len(h.strata) == 1  # the marked leaf's sheet is suppressed
    (s,) = h.strata
    pts, _ = sample_stratum(s, 0.2)
    assert len(pts) > 0
    # free boundary: samples stop at the suppressed coordinate's zero level
    assert pts[:, 0].min() > -0.2
    assert pts[:, 0].max() > 2.0


# --- membership / conormal ----------------------------------------------------


def test_membership_origin_single_vertex(prof):
    h = build_smoothed(forest_singleton(), prof)
    hits = membership(h, np.array([0.0]))
    assert hits == [(1, 0.0)]


def test_membership_two_chain_flat_point(prof):
    h = build_smoothed(forest_chain2(1), prof)
    hits = membership(h, np.array([2.0, 0.0]))
    owners = sorted(o for o, _ in hits)
    assert owners == [2]


def test_membership_far_point_empty(prof):
    h = build_smoothed(forest_chain2(1), prof)
    assert membership(h, np.array([2.0, 1.5])) == []


def test_conormal_flat_region(prof):
    h = build_smoothed(forest_chain2(1), prof)
    s = h.stratum(2)
    nu = conormal_direction(s, np.array([2.0, 0.0]))
    np.testing.assert_allclose(nu, [0.0, 1.0], atol=1e-12)


def test_conormal_near_attachment_matches_lower_sheet(prof):
    h = build_smoothed(forest_chain2(1), prof)
    s = h.stratum(2)
    pts, _ = sample_stratum(s, 0.05)
    near = pts[np.abs(pts[:, 0]) < 1e-3]
    assert len(near) > 0
    for p in near[:5]:
        nu = conormal_direction(s, p, tol=1e-6)
        # lower sheet {x1=0} is co-oriented by +e1
        assert abs(nu @ np.array([1.0, 0.0])) > np.cos(1e-2)


def test_conormal_rejects_off_surface_point(prof):
    h = build_smoothed(forest_chain2(1), prof)
    with pytest.raises(ValidationError):
        conormal_direction(h.stratum(2), np.array([2.0, 1.0]))


# --- sampling ----------------------------------------------------------------


def test_sample_hyperplane_grid(prof):
    f = forest_two_singletons()
    h = build_smoothed(f, prof)
    s = h.strata[0]
    pts, frames = sample_stratum(s, 0.5)
    assert len(pts) > 0
    vals, _ = s.evaluate(pts)
    assert np.max(np.abs(vals)) <= 1e-8
    assert frames.shape[1:] == (1, 2)


def test_sample_two_chain_flat_region(prof):
    h = build_smoothed(forest_chain2(1), prof)
    pts, _ = sample_stratum(h.stratum(2), 0.2)
    flat = pts[pts[:, 0] >= 1.0]
    assert len(flat) > 0
    assert np.max(np.abs(flat[:, 1])) < 1e-8
    # clipped at the attachment: nothing on the wrong side of the lower sheet
    assert pts[:, 0].min() > -1e-6


def test_sample_newton_residual(prof):
    h = build_smoothed(forest_chain3(1, -1), prof)
    for s in h.strata:
        pts, _ = sample_stratum(s, 0.4)
        if len(pts):
            vals, _ = s.evaluate(pts)
            assert np.max(np.abs(vals)) <= 1e-8


# --- invariants ---------------------------------------------------------------


def test_pl_smoothed_agreement_outside_tube(prof):
    h = build_smoothed(forest_chain2(1), prof)
    pts, _ = sample_stratum(h.stratum(2), 0.1)
    outside = pts[pts[:, 0] >= 1.0 + 1e-9]
    # PL model there is {x2 = 0}
    assert np.max(np.abs(outside[:, 1])) < 1e-6


@pytest.mark.parametrize("sign", [1, -1])
def test_tangency_at_attachment(prof, sign):
    h = build_smoothed(forest_chain2(sign), prof)
    upper = h.stratum(2)
    pts, frames = sample_stratum(upper, 0.02)
    near = np.abs(pts[:, 0]) < 1e-3
    assert np.count_nonzero(near) > 0
    for fr in frames[near]:
        # lower sheet {x1=0} has tangent e2; angle between lines <= 1e-2
        cosang = abs(fr[0] @ np.array([0.0, 1.0]))
        assert np.arccos(min(cosang, 1.0)) <= 1e-2


def test_deep_attachment_tangency(prof):
    # chain of depth 2: the top sheet attaches tangentially to BOTH ancestors
    # along the respective intersections.  Points close to two lower sheets at
    # once (the corner zone) are excluded: tangency is promised along each
    # pairwise intersection, and near the corner the sheets pass close to one
    # another without attaching.
    h = build_smoothed(forest_chain3(1, 1), prof)
    top = h.stratum(3)
    pts, frames = sample_stratum(top, 0.1)
    v1, g1 = h.stratum(1).evaluate(pts)
    v2, g2 = h.stratum(2).evaluate(pts)
    checked = 0
    for anc_vals, anc_grads, other_vals in [(v1, g1, v2), (v2, g2, v1)]:
        near = (np.abs(anc_vals) < 1e-3) & (np.abs(other_vals) > 0.15)
        if not np.any(near):
            continue
        checked += 1
        _, top_grads = top.evaluate(pts[near])
        a = top_grads / np.linalg.norm(top_grads, axis=1, keepdims=True)
        b = anc_grads[near] / np.linalg.norm(anc_grads[near], axis=1, keepdims=True)
        cos = np.abs(np.einsum("ij,ij->i", a, b))
        assert np.min(cos) >= np.cos(1e-2)
    assert checked == 2


# --- lagrangian model ----------------------------------------------------------


def test_lagrangian_model_single_vertex(prof):
    h = build_smoothed(forest_singleton(), prof)
    lm = lagrangian_model(h, 0.25)
    zero = lm.split("zero-section")
    assert np.max(np.abs(zero[:, 1])) == 0.0
    ray = lm.split("conormal-of(1)")
    assert len(ray) > 0
    np.testing.assert_allclose(ray[:, 0], 0.0, atol=1e-8)
    assert np.all(ray[:, 1] > 0)
    assert abs(ray[:, 1].max() - 2.0) < 0.25


def test_lagrangian_model_empty_forest(prof):
    h = build_smoothed(SignedForest([]), prof)
    lm = lagrangian_model(h, 0.5)
    assert lm.labels == ["zero-section"]


def test_lagrangian_conormal_rays_positive(prof):
    h = build_smoothed(forest_chain2(1), prof)
    lm = lagrangian_model(h, 0.4)
    for lbl in ("conormal-of(1)", "conormal-of(2)"):
        idx = [i for i, l in enumerate(lm.labels) if l == lbl]
        fib = lm.points[idx][:, 2:]
        nu = lm.conormals[idx]
        dots = np.einsum("ij,ij->i", fib, nu)
        assert np.all(dots > 0)
        cross = np.abs(fib[:, 0] * nu[:, 1] - fib[:, 1] * nu[:, 0])
        assert np.max(cross) < 1e-9
