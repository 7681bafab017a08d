"""Extension of the lift to the whole sphere and its quasiconformality.

Inside the closed disk the extension is the lift itself; outside it is the
reflection of the lift at the inverted point 1/conj(z), and infinity goes
to the reflection of f~(0).  Dilatation is measured two ways: by finite
differences of the extension, and intrinsically on the surface from the
Schwarzian tensor of log lambda_Sigma, the curvature and II.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DegeneratePointError, DomainError
from .grid import GridParams, sweep
from .harmonic import ConditionReport, classical_schwarzian, condition_report, sigma_at
from .lift import fundamental_forms, lift_point
from .mobius import INFINITY, is_infinite
from .reflection import reflect

GAP_EPSILONS = (0.1, 0.03, 0.01, 0.003)
QC_SLACK = 1.02


class ExtensionMap:
    def __init__(self, spec, grid: GridParams | None = None):
        self.spec = spec
        self.grid = grid or GridParams()

    @cached_property
    def report(self) -> ConditionReport:
        return condition_report(self.spec, self.grid)

    @property
    def t(self) -> float:
        return self.report.sup_t

    @property
    def C(self) -> float:
        return self.report.C_estimate

    def __call__(self, z):
        return extend_eval(self, z)


def extend_eval(ext: ExtensionMap, z) -> np.ndarray:
    """F~(z) with shape ``z.shape + (3,)``; complex infinity is any non-finite z."""
    z = np.asarray(z, dtype=complex)
    out = np.empty(z.shape + (3,))
    at_inf = ~np.isfinite(z)
    inside = ~at_inf & (np.abs(z) <= 1)
    outside = ~at_inf & ~inside
    if inside.any():
        out[inside] = lift_point(ext.spec, z[inside])
    if outside.any():
        out[outside] = reflect(ext.spec, 1 / np.conj(z[outside]))
    if at_inf.any():
        out[at_inf] = reflect(ext.spec, np.zeros(1, dtype=complex))[0]
    return out


def chordal(x, y) -> np.ndarray:
    """2|x - y| / sqrt((1 + |x|^2)(1 + |y|^2)), continued to the point at infinity."""
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    xi, yi = is_infinite(x), is_infinite(y)
    xs = np.where(xi[..., None], 0.0, x)
    ys = np.where(yi[..., None], 0.0, y)
    nx = 1 + np.sum(xs * xs, axis=-1)
    ny = 1 + np.sum(ys * ys, axis=-1)
    finite = 2 * np.linalg.norm(xs - ys, axis=-1) / np.sqrt(nx * ny)
    d = np.where(xi & ~yi, 2 / np.sqrt(ny), finite)
    d = np.where(yi & ~xi, 2 / np.sqrt(nx), d)
    return np.where(xi & yi, 0.0, d)


def boundary_gap(ext: ExtensionMap, epsilon: float, n_angles: int = 256) -> float:
    """Largest chordal distance between f~(z) and R(f~(z)) on |z| = 1 - epsilon."""
    if not 0 < epsilon < 0.5:
        raise DomainError("epsilon must lie in (0, 0.5)")
    z = (1 - epsilon) * np.exp(2j * np.pi * np.arange(n_angles) / n_angles)
    return float(np.max(chordal(lift_point(ext.spec, z), reflect(ext.spec, z))))


# --- numeric dilatation ---------------------------------------------------------------


@dataclass
class DilatationSample:
    z: np.ndarray
    jacobian: np.ndarray  # (..., 3, 2), columns d/dx and d/dy
    singular_values: np.ndarray  # (..., 2), descending
    ratio: np.ndarray
    valid: np.ndarray  # False where the stencil touched a degenerate point

    @property
    def skipped(self) -> int:
        return int(np.count_nonzero(~self.valid))


def fd_step(z) -> np.ndarray:
    return np.minimum(1e-5, np.abs(np.abs(z) - 1) / 10)


def _jacobian(fn, z, h):
    z = np.asarray(z, dtype=complex)
    offsets = np.array([1, -1, 1j, -1j])
    pts = z[..., None] + h[..., None] * offsets
    vals = fn(pts.ravel()).reshape(pts.shape + (3,))
    dx = (vals[..., 0, :] - vals[..., 1, :]) / (2 * h[..., None])
    dy = (vals[..., 2, :] - vals[..., 3, :]) / (2 * h[..., None])
    return np.stack([dx, dy], axis=-1), np.all(np.isfinite(vals), axis=(-1, -2))


def dilatation_at(ext: ExtensionMap, z) -> DilatationSample:
    z = np.asarray(z, dtype=complex)
    h = fd_step(z)
    if np.any(h == 0):
        raise DomainError("dilatation is not sampled on the unit circle")
    jac, valid = _jacobian(lambda p: extend_eval(ext, p), z, h)
    sv = np.linalg.svd(np.where(valid[..., None, None], jac, 0.0), compute_uv=False)
    valid = valid & (sv[..., 1] > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(valid, sv[..., 0] / sv[..., 1], np.nan)
    return DilatationSample(z, jac, sv, ratio, valid)


def reflection_dvr_fd(spec, z, angles) -> np.ndarray:
    """|D_V R| from finite differences of z -> R(f~(z)), V = cos a X + sin a Y.

    A unit tangent vector V corresponds to the chart direction
    (cos a, sin a) / e^sigma.
    """
    z = np.asarray(z, dtype=complex)
    jac, _ = _jacobian(lambda p: reflect(spec, p), z, np.full(z.shape, 1e-5))
    es = np.exp(sigma_at(spec, z).sigma)
    a = np.asarray(angles, dtype=float)
    v = np.stack([np.cos(a), np.sin(a)], axis=-1)
    dv = np.einsum("...ij,...kj->...ki", jac, np.broadcast_to(v, z.shape + v.shape))
    return np.linalg.norm(dv, axis=-1) / es[..., None]


# --- intrinsic quantities on the surface ---------------------------------------------------


@dataclass
class SurfaceTerms:
    """Everything in the intrinsic dilatation formula, in the orthonormal frame (X, Y)."""

    b_tensor: np.ndarray  # traceless part of Hess psi - dpsi dpsi, (..., 2, 2)
    grad_psi: np.ndarray  # grad log lambda_Sigma, (..., 2)
    lam: np.ndarray  # lambda_Sigma
    abs_K: np.ndarray
    II: np.ndarray  # (..., 2, 2)
    e_sigma: np.ndarray

    @property
    def b_norm(self) -> np.ndarray:
        """Largest |eigenvalue| of the traceless symmetric tensor."""
        b = self.b_tensor
        return np.hypot(b[..., 0, 0], b[..., 0, 1])

    @property
    def Lambda(self) -> np.ndarray:
        return np.linalg.norm(self.grad_psi, axis=-1)


def surface_terms(spec, z) -> SurfaceTerms:
    z = np.asarray(z, dtype=complex)
    sd = sigma_at(spec, z)
    sx, sy = sd.grad_sigma[..., 0], sd.grad_sigma[..., 1]
    sxx, sxy, syy = sd.second_partials()
    x, y = z.real, z.imag
    w = 1 - np.abs(z) ** 2
    # psi = log lambda_Sigma o f~ = -log(1 - |z|^2) - sigma
    px = 2 * x / w - sx
    py = 2 * y / w - sy
    pxx = 2 / w + 4 * x * x / w ** 2 - sxx
    pyy = 2 / w + 4 * y * y / w ** 2 - syy
    pxy = 4 * x * y / w ** 2 - sxy
    # covariant Hessian for the metric e^{2 sigma}(dx^2 + dy^2)
    h11 = pxx - sx * px + sy * py
    h22 = pyy + sx * px - sy * py
    h12 = pxy - sy * px - sx * py
    e2 = np.exp(2 * sd.sigma)
    a11 = (h11 - px * px) / e2
    a22 = (h22 - py * py) / e2
    a12 = (h12 - px * py) / e2
    half_tr = (a11 + a22) / 2
    B = np.stack([np.stack([a11 - half_tr, a12], -1), np.stack([a12, a22 - half_tr], -1)], -2)
    es = np.exp(sd.sigma)
    ff = fundamental_forms(spec, z)
    return SurfaceTerms(
        b_tensor=B,
        grad_psi=np.stack([px, py], -1) / es[..., None],
        lam=1 / (w * es),
        abs_K=np.abs(ff.gauss_curvature),
        II=ff.II_orthonormal,
        e_sigma=es,
    )


def intrinsic_dvr(spec, z, angle) -> np.ndarray:
    """|D_V R| = (2 / Lambda^2) sqrt(|B V - |K| V / 2 + 2 lambda^2 V|^2 + II(V, grad psi)^2)."""
    z = np.asarray(z, dtype=complex)
    st = surface_terms(spec, z)
    Lam = st.Lambda
    if np.any(Lam < 1e-10):
        k = int(np.argmin(np.ravel(Lam)))
        raise DegeneratePointError("grad log lambda_Sigma vanishes", point=complex(np.ravel(z)[k]))
    a = np.asarray(angle, dtype=float)
    # broadcast angles over trailing axes
    V = np.stack([np.cos(a), np.sin(a)], -1)
    extra = (None,) * a.ndim
    B = st.b_tensor[(...,) + extra + (slice(None), slice(None))]
    II = st.II[(...,) + extra + (slice(None), slice(None))]
    g = st.grad_psi[(...,) + extra + (slice(None),)]
    shift = (2 * st.lam ** 2 - st.abs_K / 2)[(...,) + extra]
    tangent = np.einsum("...ij,...j->...i", B, V) + shift[..., None] * V
    normal = np.einsum("...i,...ij,...j->...", V, II, g)
    L4 = Lam[(...,) + extra] ** 4
    return np.sqrt(4 / L4 * (np.sum(tangent * tangent, -1) + normal ** 2))


@dataclass
class SurfaceConditionReport:
    t: float
    max_violation: float  # max of |B| + |K| - 2 t lambda^2 (<= 0 when the condition holds)
    max_ratio: float  # max of (|B| + |K|) / lambda^2
    margin_deviation: float  # max |surface margin - chart margin|
    points: np.ndarray
    surface_margin: np.ndarray

    @property
    def holds(self) -> bool:
        return self.max_violation <= 1e-9


def surface_condition_check(spec, grid: GridParams | None = None,
                            report: ConditionReport | None = None) -> SurfaceConditionReport:
    grid = grid or GridParams()
    report = report or condition_report(spec, grid)
    pts = report.points

    def fn(z):
        st = surface_terms(spec, z)
        return st.b_norm + st.abs_K, st.lam ** 2

    lhs, lam2 = sweep(fn, pts)
    t = report.sup_t
    smargin = lhs / (2 * lam2)
    return SurfaceConditionReport(
        t=t,
        max_violation=float(np.max(lhs - 2 * t * lam2)),
        max_ratio=float(np.max(lhs / lam2)),
        margin_deviation=float(np.max(np.abs(smargin - report.margin_field))),
        points=pts,
        surface_margin=smargin,
    )


# --- classical comparison ------------------------------------------------------------------


def _require_analytic(spec) -> None:
    if not spec.is_analytic:
        raise DomainError("the classical formula needs an analytic map (g absent)")


def classical_aw(spec, z) -> np.ndarray:
    """f(zeta) + (1 - |zeta|^2) f'(zeta) / (conj(zeta) - (1 - |zeta|^2) f''(zeta) / (2 f'(zeta))), zeta = 1/conj(z)."""
    _require_analytic(spec)
    z = np.asarray(z, dtype=complex)
    zeta = 1 / np.conj(z)
    hp = spec.jets(zeta, 1).hp
    d1, d2 = hp.value, hp.deriv(1)
    w = 1 - np.abs(zeta) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        den = np.conj(zeta) - w * d2 / (2 * d1)
        out = spec.h_value(zeta) + w * d1 / den
    return np.where(den == 0, complex(np.inf, np.inf), out)


def beltrami_classical(spec, z) -> np.ndarray:
    """mu(1/conj(z)) = -(1 - |z|^2)^2 Sf(z) / 2."""
    _require_analytic(spec)
    z = np.asarray(z, dtype=complex)
    return -0.5 * (1 - np.abs(z) ** 2) ** 2 * classical_schwarzian(spec, z)


# --- bounds and the QC report ------------------------------------------------------------------


def theoretical_bound(t: float, C: float, planar: bool = False) -> float:
    """Dilatation bound (2t + sqrt(2t)(2 + C) + 2) / (2(1 - t)).

    For a planar lift (q = 0, so II and K vanish) the bound reduces to
    (1 + t) / (1 - t).
    """
    if not 0 <= t < 1:
        raise DomainError(f"bound needs 0 <= t < 1, got t = {t}")
    if C < 0:
        raise DomainError("C must be nonnegative")
    if planar:
        return (1 + t) / (1 - t)
    return (2 * t + np.sqrt(2 * t) * (2 + C) + 2) / (2 * (1 - t))


def displayed_bound(t: float, C: float) -> float:
    """The same bound with (1 + C) in place of (2 + C); reported alongside, never used to decide."""
    if not 0 <= t < 1:
        raise DomainError(f"bound needs 0 <= t < 1, got t = {t}")
    return (2 * t + np.sqrt(2 * t) * (1 + C) + 2) / (2 * (1 - t))


def exterior_samples(n: int, seed: int, r_outer: float) -> np.ndarray:
    """Deterministic points with 1 < |z| <= r_outer."""
    rng = np.random.default_rng(seed)
    u = rng.uniform(0.01, 1.0, n)
    theta = rng.uniform(0, 2 * np.pi, n)
    return (1 + (r_outer - 1) * u) * np.exp(1j * theta)


def qc_report(ext: ExtensionMap, samples: int = 500, seed: int = 0) -> dict:
    t, C = ext.t, ext.C
    planar = not ext.spec.has_vertical
    z = exterior_samples(samples, seed, ext.grid.exterior_r_max)
    ds = dilatation_at(ext, z)
    ratios = np.where(ds.valid, ds.ratio, -np.inf)
    k = int(np.argmax(ratios))
    max_ratio = float(ratios[k]) if ds.valid.any() else None
    bound = theoretical_bound(t, C, planar) if 0 <= t < 1 else None
    shown = displayed_bound(t, C) if 0 <= t < 1 else None
    gaps = [[eps, boundary_gap(ext, eps)] for eps in GAP_EPSILONS]
    passed = bound is not None and max_ratio is not None and max_ratio <= bound * QC_SLACK
    return {
        "label": getattr(ext.spec, "label", ""),
        "t": t,
        "C": C,
        "planar": planar,
        "theoretical_bound": bound,
        "displayed_bound": shown,
        "samples": samples,
        "seed": seed,
        "skipped": ds.skipped,
        "max_ratio": max_ratio,
        "argmax_z": [float(z[k].real), float(z[k].imag)] if max_ratio is not None else None,
        "boundary_gaps": gaps,
        "passed": bool(passed),
    }


def qc_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True)


__all__ = [
    "ExtensionMap", "extend_eval", "chordal", "boundary_gap", "DilatationSample", "dilatation_at",
    "reflection_dvr_fd", "SurfaceTerms", "surface_terms", "intrinsic_dvr", "SurfaceConditionReport",
    "surface_condition_check", "classical_aw", "beltrami_classical", "theoretical_bound",
    "displayed_bound", "exterior_samples", "qc_report", "qc_json", "INFINITY",
]
