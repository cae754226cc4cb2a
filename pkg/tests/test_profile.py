import numpy as np
import pytest

from arboreal.errors import ValidationError
from arboreal.profile import make_default_profile


@pytest.fixture(scope="module")
def prof():
    return make_default_profile()


def test_sharpness_domain():
    with pytest.raises(ValidationError):
        make_default_profile(0.0)
    with pytest.raises(ValidationError):
        make_default_profile(11.0)


def test_flat_ray_exact(prof):
    vals, grads = prof.evaluate(np.array([[2.0, 0.0], [2.0, 0.5], [5.0, -0.3]]))
    assert vals[0] == 0.0
    assert vals[1] == 0.5
    assert vals[2] == -0.3
    np.testing.assert_allclose(grads[1], [0.0, 1.0], atol=1e-12)


def test_crossing_tangent_vertical(prof):
    t = prof.crossing_tangent
    assert abs(t[0]) < 1e-9
    assert abs(t[1] - 1.0) < 1e-9


def test_crossing_point_on_axis(prof):
    a, b = prof.crossing_point
    assert a == 0.0
    assert 0.5 < b < 3.0


def test_zero_curve_flat_exactly_from_one(prof):
    zc = prof.zero_curve()
    pts = zc["points"]
    on_flat = pts[pts[:, 0] >= 1.0 - 1e-12]
    assert np.max(np.abs(on_flat[:, 1])) < 1e-12


def test_submersion_band(prof):
    g = np.linspace(-3, 3, 61)
    pts = np.array([[a, b] for a in g for b in g])
    vals, grads = prof.evaluate(pts)
    band = np.abs(vals) < prof.tolerance
    norms = np.linalg.norm(grads[band], axis=1)
    np.testing.assert_allclose(norms, 1.0, atol=1e-9)


def test_meets_axis_once(prof):
    # the zero set touches {a = 0} in one contiguous (tangential) cluster
    b = np.linspace(-3.0, 4.0, 7001)
    pts = np.column_stack([np.zeros_like(b), b])
    vals, _ = prof.evaluate(pts)
    near = np.nonzero(np.abs(vals) < 1e-3)[0]
    assert near.size > 0
    assert np.all(np.diff(near) == 1), "zero set meets {a=0} in more than one cluster"
    # and it is a genuine crossing: signs differ well below and well above
    lo, _ = prof.evaluate(np.array([[0.0, b[near[0]] - 0.5]]))
    hi, _ = prof.evaluate(np.array([[0.0, b[near[-1]] + 0.5]]))
    assert lo[0] < 0 < hi[0] or hi[0] < 0 < lo[0]


def test_sign_convention_near_curve(prof):
    # offsetting along the stored right-hand normal increases f; against, decreases
    zc = prof.zero_curve()
    idx = np.linspace(0, len(zc["s"]) - 1, 25, dtype=int)
    pts, norms = zc["points"][idx], zc["normals"][idx]
    eps = 0.05
    vp, _ = prof.evaluate(pts + eps * norms)
    vm, _ = prof.evaluate(pts - eps * norms)
    np.testing.assert_allclose(vp, eps, atol=1e-3)
    np.testing.assert_allclose(vm, -eps, atol=1e-3)


def test_sign_convention_global(prof):
    plus = np.array([[2.0, 0.7], [1.5, 0.1], [1.2, 1.0]])
    minus = np.array([[2.0, -0.7], [0.0, 0.0], [-0.5, 0.0], [-0.4, 1.5]])
    vp, _ = prof.evaluate(plus)
    vm, _ = prof.evaluate(minus)
    assert np.all(vp > 0)
    assert np.all(vm < 0)


def test_gradient_consistency_fd(prof):
    rng = np.random.default_rng(0)
    pts = rng.uniform(-0.5, 2.5, size=(200, 2))
    vals, grads = prof.evaluate(pts)
    keep = np.abs(vals) < prof.tolerance
    pts, grads = pts[keep], grads[keep]
    h = 1e-6
    for axis in range(2):
        e = np.zeros(2)
        e[axis] = h
        vp, _ = prof.evaluate(pts + e)
        vm, _ = prof.evaluate(pts - e)
        fd = (vp - vm) / (2 * h)
        np.testing.assert_allclose(fd, grads[:, axis], atol=2e-3)


def test_tangential_approach_is_fast(prof):
    # curve points within 1e-3 of {a=0} already have near-vertical tangents;
    # this is what makes attaching sheets tangent at the spec's sample scale
    zc = prof.zero_curve()
    pts, tans = zc["points"], zc["tangents"]
    turn = zc["s"] <= prof.turn_length
    near = turn & (np.abs(pts[:, 0]) < 1e-3)
    angles = np.abs(np.arctan2(tans[near, 0], tans[near, 1]))
    angles = np.minimum(angles, np.pi - angles)
    assert np.max(angles) < 1e-2
