import numpy as np
import pytest

from awlift.mobius import (
    INFINITY,
    Dilation,
    Inversion,
    Mobius3,
    Rotation,
    Translation,
    inversion,
    is_infinite,
    random_mobius,
    random_rotation,
)


def _jacobian(T, x, h=1e-6):
    cols = [(T(x + h * e) - T(x - h * e)) / (2 * h) for e in np.eye(3)]
    return np.stack(cols, -1)


def test_unit_inversion():
    J = inversion()
    np.testing.assert_allclose(J([2.0, 0, 0]), [0.5, 0, 0])
    assert J.conformal_factor(np.array([2.0, 0, 0])) == pytest.approx(0.25)
    assert is_infinite(J(np.zeros(3)))
    np.testing.assert_array_equal(J(INFINITY), np.zeros(3))


def test_inversion_is_an_involution():
    I = inversion((1.0, -2.0, 0.5), 1.7)
    x = np.random.default_rng(0).normal(size=(50, 3))
    np.testing.assert_allclose(I(I(x)), x, atol=1e-12)
    # the sphere of inversion is fixed pointwise
    d = x / np.linalg.norm(x, axis=-1, keepdims=True)
    on = np.array([1.0, -2.0, 0.5]) + 1.7 * d
    np.testing.assert_allclose(I(on), on, atol=1e-12)


def test_infinity_through_a_chain():
    T = Mobius3((Translation((1.0, 0, 0)), Inversion((1.0, 0, 0)), Dilation(2.0)))
    # 0 -> (1,0,0) -> infinity -> infinity
    assert is_infinite(T(np.zeros(3)))
    # infinity -> infinity -> center -> 2 * center
    np.testing.assert_allclose(T(INFINITY), [2.0, 0, 0])


def test_then_appends():
    T = Mobius3().then(Translation((0, 0, 1.0))).then(Dilation(3.0))
    np.testing.assert_allclose(T([1.0, 1.0, 1.0]), [3.0, 3.0, 6.0])


def test_validation():
    with pytest.raises(ValueError):
        Rotation(np.ones((3, 3)))
    with pytest.raises(ValueError):
        Dilation(0.0)
    with pytest.raises(ValueError):
        inversion()(np.zeros(2))


def test_random_rotation_is_proper():
    R = random_rotation(np.random.default_rng(3))
    np.testing.assert_allclose(R @ R.T, np.eye(3), atol=1e-14)
    assert np.linalg.det(R) == pytest.approx(1)


@pytest.mark.parametrize("seed", range(5))
def test_random_mobius_is_conformal_with_stated_factor(seed):
    rng = np.random.default_rng(seed)
    T = random_mobius(rng)
    c = np.asarray(T.steps[0].center)
    assert abs(c[2]) >= 1 and np.linalg.norm(c) >= 3
    x = rng.uniform(-1, 1, (20, 3))
    Jm = _jacobian(T, x)
    sv = np.linalg.svd(Jm, compute_uv=False)
    f = T.conformal_factor(x)
    np.testing.assert_allclose(sv, np.repeat(f[:, None], 3, 1), rtol=1e-6)


def test_inversion_maps_spheres_to_spheres():
    I = inversion((0.0, 0.0, 3.0), 1.0)
    rng = np.random.default_rng(4)
    d = rng.normal(size=(200, 3))
    pts = d / np.linalg.norm(d, axis=-1, keepdims=True)
    img = I(pts)
    # fit a sphere |x|^2 = 2 c.x + k by least squares and check the residual
    A = np.column_stack([2 * img, np.ones(len(img))])
    sol, *_ = np.linalg.lstsq(A, np.sum(img ** 2, -1), rcond=None)
    r2 = sol[3] + sol[:3] @ sol[:3]
    np.testing.assert_allclose(np.linalg.norm(img - sol[:3], axis=-1), np.sqrt(r2), atol=1e-12)
