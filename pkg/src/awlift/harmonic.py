"""Disk-chart analysis of a harmonic map through its Weierstrass data.

The conformal factor is taken in the q-form

    sigma = log|h'| + log(1 + |q|^2),

which stays smooth through zeros of g'.  All functions accept a scalar or
an array of points and anything with a ``jets(z, order)`` method (a
MapSpec or a Precomposed map).
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from . import jets as J
from .errors import DegeneratePointError, DomainError
from .grid import GridParams, sweep
from .lift import coordinate_jets
from .mapspec import Precomposed

NEHARI_TOL = 1e-9


@dataclass
class SigmaData:
    sigma: np.ndarray
    sigma_z: np.ndarray
    sigma_zz: np.ndarray
    sigma_zzbar: np.ndarray

    @property
    def grad_sigma(self) -> np.ndarray:
        return np.stack([2 * self.sigma_z.real, -2 * self.sigma_z.imag], axis=-1)

    @property
    def laplacian(self) -> np.ndarray:
        return 4 * self.sigma_zzbar

    @property
    def e_sigma(self) -> np.ndarray:
        return np.exp(self.sigma)

    def second_partials(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(sigma_xx, sigma_xy, sigma_yy) from the Wirtinger derivatives."""
        sxx = 2 * self.sigma_zz.real + 2 * self.sigma_zzbar
        syy = -2 * self.sigma_zz.real + 2 * self.sigma_zzbar
        sxy = -2 * self.sigma_zz.imag
        return sxx, sxy, syy


def _sigma_from_jets(mj, z) -> SigmaData:
    hp, q = mj.hp, mj.q
    bad = hp.value == 0
    if np.any(bad):
        k = int(np.flatnonzero(np.ravel(bad))[0])
        raise DegeneratePointError("h' vanishes", point=complex(np.ravel(z)[k]))
    # log-derivative of h' as an order-1 jet: (h''/h', (h''/h')')
    ratio = J.jet_div(J.derivative(hp), hp.truncate(1))
    q0, q1, q2 = q.value, q.deriv(1), q.deriv(2)
    qbar = np.conj(q0)
    s = 1 + np.abs(q0) ** 2
    sigma = np.log(np.abs(hp.value)) + np.log(s)
    sigma_z = ratio.value / 2 + q1 * qbar / s
    sigma_zz = ratio.deriv(1) / 2 + q2 * qbar / s - (q1 * qbar) ** 2 / s ** 2
    sigma_zzbar = np.abs(q1) ** 2 / s ** 2
    return SigmaData(sigma, sigma_z, sigma_zz, sigma_zzbar)


def sigma_at(m, z) -> SigmaData:
    z = np.asarray(z, dtype=complex)
    return _sigma_from_jets(m.jets(z, 2), z)


def schwarzian(m, z) -> np.ndarray:
    """Harmonic Schwarzian 2 (sigma_zz - sigma_z^2)."""
    sd = sigma_at(m, z)
    return 2 * (sd.sigma_zz - sd.sigma_z ** 2)


def classical_schwarzian(m, z) -> np.ndarray:
    """(h''/h')' - (h''/h')^2 / 2 straight from the jet of h'."""
    hp = m.jets(np.asarray(z, dtype=complex), 2).hp
    ratio = J.jet_div(J.derivative(hp), hp.truncate(1))
    return ratio.deriv(1) - 0.5 * ratio.value ** 2


def curvature_density(m, z) -> np.ndarray:
    """e^{2 sigma} |K| = Laplacian of sigma = 4 |q'|^2 / (1 + |q|^2)^2."""
    return sigma_at(m, z).laplacian


def gauss_curvature(m, z) -> np.ndarray:
    sd = sigma_at(m, z)
    return -np.exp(-2 * sd.sigma) * sd.laplacian


def margin(m, z) -> np.ndarray:
    """((1 - |z|^2)^2 / 2) (|Sf| + e^{2 sigma}|K|); the smallest admissible t at z."""
    z = np.asarray(z, dtype=complex)
    sd = sigma_at(m, z)
    s = np.abs(2 * (sd.sigma_zz - sd.sigma_z ** 2))
    return (1 - np.abs(z) ** 2) ** 2 / 2 * (s + sd.laplacian)


# --- condition report -----------------------------------------------------------

CSV_COLUMNS = ["re", "im", "sigma", "abs_schwarzian", "curv_density", "margin_t", "grad_sigma_norm"]


@dataclass
class ConditionReport:
    grid: GridParams
    points: np.ndarray
    sigma: np.ndarray
    abs_schwarzian: np.ndarray
    curv_density: np.ndarray
    margin_field: np.ndarray
    grad_sigma_norm: np.ndarray
    label: str = ""
    tolerance: float = NEHARI_TOL
    sup_t: float = field(init=False)
    C_estimate: float = field(init=False)
    worst_point: complex = field(init=False)

    def __post_init__(self):
        k = int(np.argmax(self.margin_field))
        self.sup_t = float(self.margin_field[k])
        self.worst_point = complex(self.points[k])
        self.C_estimate = float(np.max((1 - np.abs(self.points) ** 2) * self.grad_sigma_norm))

    @property
    def nehari_ok(self) -> bool:
        return self.sup_t <= 1 + self.tolerance

    @property
    def aw_ok(self) -> bool:
        # equality cases (sup_t == 1 up to roundoff) count as Nehari only
        return self.sup_t < 1 - self.tolerance

    def summary(self) -> dict:
        return {
            "label": self.label,
            "grid": self.grid.describe(),
            "sup_t": self.sup_t,
            "C_estimate": self.C_estimate,
            "worst_point": [self.worst_point.real, self.worst_point.imag],
            "nehari_ok": self.nehari_ok,
            "aw_ok": self.aw_ok,
            "tolerance": self.tolerance,
        }

    def rows(self):
        for k, z in enumerate(self.points):
            yield [z.real, z.imag, self.sigma[k], self.abs_schwarzian[k], self.curv_density[k],
                   self.margin_field[k], self.grad_sigma_norm[k]]

    def to_csv(self, fh=None) -> str | None:
        out = fh if fh is not None else io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for row in self.rows():
            w.writerow([_fmt(v) for v in row])
        return None if fh is not None else out.getvalue()

    def to_json(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def condition_report(m, grid: GridParams | None = None) -> ConditionReport:
    grid = grid or GridParams()
    if not 0 < grid.r_max < 1:
        raise DomainError("grid radius must lie inside the unit disk")
    pts = grid.points()

    def fn(z):
        sd = sigma_at(m, z)
        s = np.abs(2 * (sd.sigma_zz - sd.sigma_z ** 2))
        marg = (1 - np.abs(z) ** 2) ** 2 / 2 * (s + sd.laplacian)
        return sd.sigma, s, sd.laplacian, marg, np.linalg.norm(sd.grad_sigma, axis=-1)

    sigma, s, curv, marg, gnorm = sweep(fn, pts)
    return ConditionReport(grid, pts, sigma, s, curv, marg, gnorm, getattr(m, "label", ""))


# --- u-function and hyperbolic convexity ---------------------------------------------


def u_value(m, z) -> np.ndarray:
    """u = ((1 - |z|^2) e^sigma)^{-1/2}."""
    z = np.asarray(z, dtype=complex)
    return ((1 - np.abs(z) ** 2) * np.exp(sigma_at(m, z).sigma)) ** -0.5


def u_log_gradient(m, z) -> np.ndarray:
    """Gradient of log u, i.e. (alpha, beta); shape ``z.shape + (2,)``."""
    z = np.asarray(z, dtype=complex)
    grad = sigma_at(m, z).grad_sigma
    w = 1 - np.abs(z) ** 2
    return np.stack([z.real / w, z.imag / w], axis=-1) - grad / 2


def hyperbolic_distance(z, w) -> np.ndarray:
    """Distance for the metric |dz| / (1 - |z|^2) (curvature -4)."""
    z, w = np.asarray(z, dtype=complex), np.asarray(w, dtype=complex)
    return np.arctanh(np.abs((z - w) / (1 - np.conj(w) * z)))


def geodesic_points(theta1: float, theta2: float, s) -> np.ndarray:
    """Points at hyperbolic arclength ``s`` on the geodesic from e^{i theta1} to e^{i theta2}.

    s = 0 is the point of the geodesic closest to the origin.
    """
    delta = np.mod(theta2 - theta1, 2 * np.pi)
    if delta < 1e-12 or delta > 2 * np.pi - 1e-12:
        raise DomainError("geodesic endpoints coincide")
    d = delta / 2
    c = theta1 + d
    a = np.tan(np.pi / 4 - d / 2)
    v = 1j * np.tanh(np.asarray(s, dtype=float))
    return np.exp(1j * c) * (v + a) / (1 + a * v)


def convexity_profile(target, geodesic: tuple[float, float], n: int = 161, ds: float = 0.05) -> np.ndarray:
    """Second differences (u(s-ds) - 2u(s) + u(s+ds)) / ds^2 along a geodesic.

    ``target`` is a map (u from its conformal factor) or a callable z -> u.
    Samples are centered on the point nearest the origin.
    """
    theta1, theta2 = geodesic
    s = (np.arange(n + 2) - (n + 1) / 2) * ds
    z = geodesic_points(theta1, theta2, s)
    u = target(z) if callable(target) and not hasattr(target, "jets") else u_value(target, z)
    return (u[:-2] - 2 * u[1:-1] + u[2:]) / ds ** 2


# --- Ahlfors' S1 along the real diameter ------------------------------------------------


def s1_along_diameter(m, x) -> tuple[np.ndarray, np.ndarray]:
    """Ahlfors' S1 of the lift restricted to the real axis, computed two ways.

    Returns ``(s1, s1_curv)``: the first from the derivatives of the curve,
    the second from its speed v = e^sigma and its curvature.
    """
    x = np.asarray(x, dtype=float).astype(complex)
    Fp = coordinate_jets(m, x, 2)
    d1 = np.stack([j.value for j in Fp], -1).real
    d2 = np.stack([j.deriv(1) for j in Fp], -1).real
    d3 = np.stack([j.deriv(2) for j in Fp], -1).real
    v2 = np.sum(d1 * d1, -1)
    if np.any(v2 < 1e-24):
        raise DegeneratePointError("curve speed vanishes", point=complex(x.ravel()[np.argmin(v2)]))
    s1 = (np.sum(d3 * d1, -1) / v2 - 3 * np.sum(d2 * d1, -1) ** 2 / v2 ** 2
          + 1.5 * np.sum(d2 * d2, -1) / v2)

    sd = sigma_at(m, x)
    sx = 2 * sd.sigma_z.real
    sxx = sd.second_partials()[0]
    v = np.exp(sd.sigma)
    kappa = np.linalg.norm(np.cross(d1, d2), axis=-1) / v2 ** 1.5
    s1_curv = sxx - 0.5 * sx ** 2 + 0.5 * v ** 2 * kappa ** 2
    return s1, s1_curv


def mobius_precompose(m, a: complex, theta: float = 0.0) -> Precomposed:
    """Evaluator for f o T, T(z) = e^{i theta} (z + a) / (1 + conj(a) z)."""
    if abs(a) >= 1:
        raise DomainError("need |a| < 1")
    return Precomposed(m, a, theta)
