import csv
import io

import numpy as np
import pytest

from awlift.errors import DegeneratePointError, DomainError
from awlift.grid import GridParams
from awlift.harmonic import (
    CSV_COLUMNS,
    classical_schwarzian,
    condition_report,
    convexity_profile,
    curvature_density,
    gauss_curvature,
    geodesic_points,
    hyperbolic_distance,
    margin,
    mobius_precompose,
    s1_along_diameter,
    schwarzian,
    sigma_at,
    u_log_gradient,
    u_value,
)
from awlift.mapspec import make_spec
from conftest import enneper, power, random_disk

SMALL = GridParams(24, 48, 0.99, 1.5)


def test_enneper_closed_forms_at_half(enneper1):
    sd = sigma_at(enneper1, 0.5)
    assert sd.sigma == pytest.approx(np.log(1.25), abs=1e-15)
    assert sd.sigma_z == pytest.approx(0.4, abs=1e-15)
    assert sd.sigma_zzbar == pytest.approx(0.64, abs=1e-15)
    assert curvature_density(enneper1, 0.5) == pytest.approx(2.56, abs=1e-14)
    assert gauss_curvature(enneper1, 0.5) == pytest.approx(-2.56 / 1.25 ** 2, abs=1e-14)


def test_enneper_small_scale_values(enneper05):
    sd = sigma_at(enneper05, 0.5)
    assert sd.sigma == pytest.approx(np.log(0.53125), abs=1e-15)
    assert np.linalg.norm(sd.grad_sigma) == pytest.approx(0.125 / 1.0625 * 2, abs=1e-14)


@pytest.mark.parametrize("r", [0.3, 0.5, 0.6, 1.0])
def test_enneper_schwarzian_and_margin(r):
    m = enneper(r)
    z = random_disk(200, 0)
    s = 1 + r ** 2 * np.abs(z) ** 2
    np.testing.assert_allclose(schwarzian(m, z), -4 * r ** 4 * np.conj(z) ** 2 / s ** 2, atol=1e-14)
    np.testing.assert_allclose(curvature_density(m, z), 4 * r ** 2 / s ** 2, rtol=1e-13)
    expected = 2 * r ** 2 * (1 - np.abs(z) ** 2) ** 2 / s
    np.testing.assert_allclose(margin(m, z), expected, rtol=1e-12)


def test_identity_is_flat(identity):
    z = random_disk(50, 1)
    sd = sigma_at(identity, z)
    assert np.all(sd.sigma == 0) and np.all(sd.sigma_z == 0)
    assert np.all(margin(identity, z) == 0)
    np.testing.assert_allclose(u_value(identity, z), (1 - np.abs(z) ** 2) ** -0.5)


def test_atanh_schwarzian(atanh_map):
    z = random_disk(100, 2)
    np.testing.assert_allclose(schwarzian(atanh_map, z), 2 / (1 - z ** 2) ** 2, rtol=1e-12)
    np.testing.assert_allclose(margin(atanh_map, z),
                               (1 - np.abs(z) ** 2) ** 2 / np.abs(1 - z ** 2) ** 2, rtol=1e-12)
    np.testing.assert_allclose(margin(atanh_map, np.linspace(-0.9, 0.9, 7)), 1, rtol=1e-13)


def test_q_form_schwarzian_matches_classical_when_analytic(power08):
    z = random_disk(100, 3)
    np.testing.assert_allclose(schwarzian(power08, z), classical_schwarzian(power08, z), rtol=1e-12)
    assert np.all(curvature_density(power08, z) == 0)


def test_report_summary_and_csv(enneper05):
    rep = condition_report(enneper05, SMALL)
    assert rep.sup_t == pytest.approx(0.5, abs=1e-12)
    assert rep.worst_point == 0
    assert rep.aw_ok and rep.nehari_ok
    rows = list(csv.reader(io.StringIO(rep.to_csv())))
    assert rows[0] == CSV_COLUMNS
    assert len(rows) == 1 + SMALL.n_radial * SMALL.n_angular + 1
    assert float(rows[1][5]) == pytest.approx(0.5)
    s = rep.summary()
    assert set(s) >= {"sup_t", "C_estimate", "worst_point", "nehari_ok", "aw_ok"}


def test_report_verdicts(atanh_map, enneper1):
    a = condition_report(atanh_map, SMALL)
    assert a.nehari_ok and not a.aw_ok
    e = condition_report(enneper1, SMALL)
    assert e.sup_t == pytest.approx(2.0) and not e.nehari_ok


def test_report_rejects_bad_radius(identity):
    with pytest.raises(DomainError):
        condition_report(identity, GridParams(4, 8, 1.0, 1.5))


def test_degenerate_h_prime():
    with pytest.raises(DegeneratePointError):
        sigma_at(make_spec("z^2/2"), 0.0)


@pytest.mark.parametrize("spec", [enneper(0.5), power(0.8), make_spec("z", q="0.5*z^2")],
                         ids=lambda s: s.label)
def test_u_gradient_matches_finite_differences(spec):
    z = random_disk(60, 4, radius=0.85)
    h = 1e-6
    lu = lambda w: np.log(u_value(spec, w))
    fd = np.stack([(lu(z + h) - lu(z - h)) / (2 * h), (lu(z + 1j * h) - lu(z - 1j * h)) / (2 * h)], -1)
    an = u_log_gradient(spec, z)
    assert np.all(np.abs(fd - an) <= 1e-6 * np.maximum(1, np.abs(an)))


def test_second_partials_match_finite_differences(enneper05):
    z = random_disk(30, 5, radius=0.8)
    h = 1e-5
    g = lambda w: sigma_at(enneper05, w).grad_sigma
    sxx, sxy, syy = sigma_at(enneper05, z).second_partials()
    gx = (g(z + h) - g(z - h)) / (2 * h)
    gy = (g(z + 1j * h) - g(z - 1j * h)) / (2 * h)
    np.testing.assert_allclose(gx[:, 0], sxx, atol=1e-8)
    np.testing.assert_allclose(gx[:, 1], sxy, atol=1e-8)
    np.testing.assert_allclose(gy[:, 1], syy, atol=1e-8)


def test_geodesic_parametrization():
    s = np.linspace(-2, 2, 9)
    z = geodesic_points(0.3, 2.1, s)
    assert np.all(np.abs(z) < 1)
    np.testing.assert_allclose(hyperbolic_distance(z[0], z), s - s[0], atol=1e-12)
    # endpoints approach the prescribed boundary points
    far = geodesic_points(0.3, 2.1, np.array([-30.0, 30.0]))
    np.testing.assert_allclose(far, np.exp(1j * np.array([0.3, 2.1])), atol=1e-12)
    with pytest.raises(DomainError):
        geodesic_points(1.0, 1.0, s)


def test_identity_u_along_diameter_is_cosh(identity):
    ds, n = 0.05, 41
    prof = convexity_profile(identity, (0.7, 0.7 + np.pi), n=n, ds=ds)
    s = (np.arange(n) - (n - 1) / 2) * ds
    np.testing.assert_allclose(prof, np.cosh(s) * 2 * (np.cosh(ds) - 1) / ds ** 2, rtol=1e-10)


@pytest.mark.parametrize("spec", [enneper(0.5), power(0.8), power(0.6), make_spec("atanh(z)")],
                         ids=lambda s: s.label)
def test_convexity_along_geodesics(spec):
    rng = np.random.default_rng(7)
    for _ in range(8):
        prof = convexity_profile(spec, tuple(rng.uniform(0, 2 * np.pi, 2)))
        assert prof.min() >= -1e-8


def test_convexity_accepts_callable():
    prof = convexity_profile(lambda z: np.abs(z) ** 2, (0.0, np.pi), n=5)
    assert np.all(prof > 0)


def test_s1_atanh_closed_form(atanh_map):
    x = np.linspace(-0.9, 0.9, 19)
    s1, s1c = s1_along_diameter(atanh_map, x)
    np.testing.assert_allclose(s1, 2 / (1 - x ** 2) ** 2, rtol=1e-10)
    np.testing.assert_allclose(s1c, s1, rtol=1e-10)


@pytest.mark.parametrize("spec", [enneper(1.0), enneper(0.5), make_spec("z", q="0.5*z^2")], ids=lambda s: s.label)
def test_s1_two_routes_agree(spec):
    x = np.linspace(-0.9, 0.9, 37)
    s1, s1c = s1_along_diameter(spec, x)
    np.testing.assert_allclose(s1, s1c, rtol=1e-9, atol=1e-12)


@pytest.mark.parametrize("a,theta", [(0.3 + 0.2j, 0.0), (-0.5j, 1.2), (0.0, 2.0)])
def test_margin_invariant_under_disk_automorphisms(enneper05, a, theta):
    pre = mobius_precompose(enneper05, a, theta)
    z = random_disk(100, 8)
    w = pre.transform(z)
    np.testing.assert_allclose(margin(pre, z), margin(enneper05, w), rtol=1e-10, atol=1e-14)
    # Schwarzian chain rule with S(T) = 0
    tp = np.exp(1j * theta) * (1 - abs(a) ** 2) / (1 + np.conj(a) * z) ** 2
    np.testing.assert_allclose(schwarzian(pre, z), schwarzian(enneper05, w) * tp ** 2, atol=1e-13)


def test_rotation_invariance_of_report(enneper05):
    base = condition_report(enneper05, SMALL)
    rot = condition_report(mobius_precompose(enneper05, 0.0, 2 * np.pi / SMALL.n_angular), SMALL)
    assert rot.sup_t == pytest.approx(base.sup_t, rel=1e-12)
    assert rot.C_estimate == pytest.approx(base.C_estimate, rel=1e-12)


def test_sup_t_grows_with_scale():
    values = [condition_report(enneper(r), SMALL).sup_t for r in (0.3, 0.5, 0.6)]
    np.testing.assert_allclose(values, [0.18, 0.5, 0.72], atol=1e-12)
