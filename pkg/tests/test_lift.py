import numpy as np
import pytest

from awlift.errors import DegeneratePointError
from awlift.harmonic import curvature_density, sigma_at
from awlift.lift import frame_at, fundamental_forms, lift_point
from awlift.mapspec import make_spec
from conftest import enneper, power, random_disk


def test_identity_lift(identity):
    z = random_disk(10, 0)
    p = lift_point(identity, z)
    np.testing.assert_allclose(p, np.stack([z.real, z.imag, 0 * z.real], -1), atol=1e-15)


def test_enneper_points(enneper1):
    np.testing.assert_allclose(lift_point(enneper1, 0.5), [0.5 + 0.125 / 3, 0, 0], atol=1e-14)
    np.testing.assert_allclose(lift_point(enneper1, 0.5j), [0, 0.5 + 0.125 / 3, 0], atol=1e-14)


def test_enneper_third_coordinate_closed_form(enneper1):
    z = random_disk(100, 1)
    np.testing.assert_allclose(lift_point(enneper1, z)[:, 2], (z ** 2).imag, atol=1e-13)


def test_q_only_spec_integrates_g(quad_q):
    # g' = q^2 h' = z^4 / 4, so g = z^5 / 20
    z = random_disk(40, 2)
    p = lift_point(quad_q, z)
    g = z ** 5 / 20
    np.testing.assert_allclose(p[:, 0], (z + g).real, atol=1e-13)
    np.testing.assert_allclose(p[:, 1], (z - g).imag, atol=1e-13)
    np.testing.assert_allclose(p[:, 2], (z ** 3 / 3).imag, atol=1e-13)


def test_identity_frame(identity):
    fr = frame_at(identity, 0.0)
    np.testing.assert_allclose(fr.X, [1, 0, 0])
    np.testing.assert_allclose(fr.Y, [0, 1, 0])
    np.testing.assert_allclose(fr.N, [0, 0, 1])
    assert fr.e_sigma == 1 and fr.lambda_sigma == 1


def test_enneper_frame_at_origin(enneper1):
    fr = frame_at(enneper1, 0.0)
    assert fr.e_sigma == pytest.approx(1)
    np.testing.assert_allclose(np.abs(fr.N), [0, 0, 1], atol=1e-15)


@pytest.mark.parametrize("spec", [enneper(1.0), enneper(0.5), power(0.8), make_spec("z", q="0.5*z^2")],
                         ids=lambda s: s.label)
def test_conformality_and_frame(spec):
    z = random_disk(500, 3)
    fr = frame_at(spec, z, with_point=False)
    e2 = fr.e_sigma ** 2
    assert np.all(np.abs(np.sum(fr.fx * fr.fy, -1)) < 1e-9 * e2)
    assert np.all(np.abs(np.linalg.norm(fr.fx, axis=-1) - np.linalg.norm(fr.fy, axis=-1)) < 1e-9 * e2)
    np.testing.assert_allclose(np.linalg.norm(fr.fx, axis=-1), fr.e_sigma, rtol=1e-12)
    np.testing.assert_allclose(np.sum(fr.X * fr.Y, -1), 0, atol=1e-9)
    np.testing.assert_allclose(np.linalg.norm(fr.N, axis=-1), 1, atol=1e-9)
    np.testing.assert_allclose(fr.lambda_sigma, 1 / ((1 - np.abs(z) ** 2) * fr.e_sigma))
    np.testing.assert_allclose(fr.e_sigma, np.exp(sigma_at(spec, z).sigma), rtol=1e-12)


@pytest.mark.parametrize("spec", [enneper(1.0), make_spec("z", q="0.5*z^2")], ids=lambda s: s.label)
def test_derivatives_match_finite_differences(spec):
    z = random_disk(40, 4, radius=0.8)
    fr = frame_at(spec, z, with_point=False)
    h = 1e-5
    fx = (lift_point(spec, z + h) - lift_point(spec, z - h)) / (2 * h)
    fy = (lift_point(spec, z + 1j * h) - lift_point(spec, z - 1j * h)) / (2 * h)
    scale = np.linalg.norm(fr.fx, axis=-1, keepdims=True)
    assert np.all(np.abs(fx - fr.fx) <= 1e-5 * scale)
    assert np.all(np.abs(fy - fr.fy) <= 1e-5 * scale)
    fr_p, fr_m = frame_at(spec, z + h, False), frame_at(spec, z - h, False)
    assert np.all(np.abs((fr_p.fx - fr_m.fx) / (2 * h) - fr.fxx) <= 1e-5 * (1 + np.abs(fr.fxx)))
    assert np.all(np.abs((fr_p.fy - fr_m.fy) / (2 * h) - fr.fxy) <= 1e-5 * (1 + np.abs(fr.fxy)))


def test_identity_second_fundamental_form(identity):
    ff = fundamental_forms(identity, random_disk(20, 5))
    assert np.all(ff.II_matrix == 0) and np.all(ff.gauss_curvature == 0)


def test_enneper_curvature_at_origin(enneper1):
    ff = fundamental_forms(enneper1, 0.0)
    assert abs(ff.gauss_curvature) == pytest.approx(4)
    assert curvature_density(enneper1, 0.0) == pytest.approx(4)


@pytest.mark.parametrize("spec", [enneper(1.0), enneper(0.5), make_spec("z", q="0.5*z^2")], ids=lambda s: s.label)
def test_minimal_surface_invariants(spec):
    z = random_disk(500, 6)
    ff = fundamental_forms(spec, z)
    sd = sigma_at(spec, z)
    lam = 1 / ((1 - np.abs(z) ** 2) * np.exp(sd.sigma))
    assert np.all(np.abs(ff.mean_curvature) < 1e-8 * np.maximum(1, lam))
    K = -np.exp(-2 * sd.sigma) * sd.laplacian
    np.testing.assert_allclose(ff.gauss_curvature, K, rtol=1e-6, atol=1e-14)
    assert np.all(ff.gauss_curvature <= 1e-12)
    # |II(V, W)| <= sqrt|K| |V||W|: largest eigenvalue of II in the orthonormal frame
    eig = np.abs(np.linalg.eigvalsh(ff.II_orthonormal)).max(-1)
    assert np.all(eig <= np.sqrt(np.abs(ff.gauss_curvature)) * (1 + 1e-9) + 1e-12)


def test_path_independence_of_third_coordinate(enneper05):
    from awlift.quadrature import integrate_path, integrate_segments

    def qh(t):
        mj = enneper05.jets(t, 0)
        return mj.q.value * mj.hp.value

    z = random_disk(30, 7)
    direct = integrate_segments(qh, 0.0, z)
    via = integrate_path(qh, [np.zeros_like(z), 0.4 + 0.4j + 0 * z, z])
    np.testing.assert_allclose(direct, via, atol=1e-9)


def test_vanishing_h_prime_is_degenerate():
    spec = make_spec("z^2/2 + 0.25*z")
    with pytest.raises(DegeneratePointError):
        frame_at(spec, -0.25)
