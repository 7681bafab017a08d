"""Weierstrass-Enneper lift of a harmonic map onto a minimal surface.

Coordinates of the lift are real parts of holomorphic functions::

    F1 = h + g,   F2 = -i (h - g),   F3 = -2i \\int_0^z q h'

so ``f~ = Re F`` and every partial derivative comes from the jets of
``F' = (h' + g', -i (h' - g'), -2i q h')``.  Only the third coordinate (and
g, when a spec gives q alone) needs quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import jets as J
from .errors import DegeneratePointError, SingularPointError
from .mapspec import Precomposed
from .quadrature import integrate_segments

QUAD_TOL = 1e-11


def coordinate_jets(m, z, order: int = 2) -> list[J.HoloJet]:
    """Jets of the three holomorphic coordinate derivatives F'."""
    mj = m.jets(z, order)
    hp, gp, q = mj.hp, mj.gp, mj.q
    return [
        J.jet_add(hp, gp),
        -1j * J.jet_sub(hp, gp),
        -2j * J.jet_mul(q, hp),
    ]


def _integrand(m, kind: str):
    def f(zeta):
        mj = m.jets(zeta, 0)
        if kind == "qh":
            return mj.q.value * mj.hp.value
        return mj.q.value ** 2 * mj.hp.value

    return f


def lift_point(m, z, tol: float = QUAD_TOL) -> np.ndarray:
    """Point f~(z) on the minimal surface; shape ``z.shape + (3,)``."""
    while isinstance(m, Precomposed):
        z = m.transform(z)
        m = m.base
    z = np.asarray(z, dtype=complex)
    h = m.h_value(z)
    g = m.g_value(z)
    try:
        if g is None:
            g = integrate_segments(_integrand(m, "q2h"), 0.0, z, tol)
        if m.has_vertical:
            third = 2 * integrate_segments(_integrand(m, "qh"), 0.0, z, tol).imag
        else:
            third = np.zeros(z.shape)
    except SingularPointError as exc:
        if exc.point is None:
            exc.point = complex(z.ravel()[0])
        raise
    return np.stack([(h + g).real, (h - g).imag, third], axis=-1)


def e_sigma(mj) -> np.ndarray:
    """Conformal factor |h'| + |g'| = |h'| (1 + |q|^2)."""
    return np.abs(mj.hp.value) * (1 + np.abs(mj.q.value) ** 2)


def _check_nondegenerate(mj, z) -> None:
    bad = mj.hp.value == 0
    if np.any(bad):
        k = int(np.flatnonzero(np.ravel(bad))[0])
        raise DegeneratePointError("h' vanishes", point=complex(np.ravel(z)[k]))


@dataclass
class SurfaceFrame:
    z: np.ndarray
    point: np.ndarray | None
    X: np.ndarray
    Y: np.ndarray
    N: np.ndarray
    e_sigma: np.ndarray
    lambda_sigma: np.ndarray
    dz_coords: np.ndarray  # (..., 3) complex
    dzz_coords: np.ndarray
    dzzbar_coords: np.ndarray
    fx: np.ndarray
    fy: np.ndarray
    fxx: np.ndarray
    fxy: np.ndarray
    fyy: np.ndarray


def frame_at(m, z, with_point: bool = True) -> SurfaceFrame:
    z = np.asarray(z, dtype=complex)
    mj = m.jets(z, 1)
    _check_nondegenerate(mj, z)
    Fp = coordinate_jets(m, z, 1)
    d1 = np.stack([j.value for j in Fp], axis=-1)  # F'
    d2 = np.stack([j.deriv(1) for j in Fp], axis=-1)  # F''
    fx, fy = d1.real, -d1.imag
    fxx, fxy, fyy = d2.real, -d2.imag, -d2.real
    es = e_sigma(mj)
    X = fx / es[..., None]
    Y = fy / es[..., None]
    N = np.cross(X, Y)
    lam = 1.0 / ((1 - np.abs(z) ** 2) * es)
    return SurfaceFrame(
        z=z,
        point=lift_point(m, z) if with_point else None,
        X=X, Y=Y, N=N,
        e_sigma=es,
        lambda_sigma=lam,
        dz_coords=d1 / 2,
        dzz_coords=d2 / 2,
        dzzbar_coords=np.zeros_like(d1),
        fx=fx, fy=fy, fxx=fxx, fxy=fxy, fyy=fyy,
    )


@dataclass
class FundamentalForms:
    II_matrix: np.ndarray  # (..., 2, 2) in the coordinate basis d/dx, d/dy
    II_orthonormal: np.ndarray  # same form in the (X, Y) frame
    mean_curvature: np.ndarray
    gauss_curvature: np.ndarray


def fundamental_forms(m, z, frame: SurfaceFrame | None = None) -> FundamentalForms:
    fr = frame if frame is not None else frame_at(m, z, with_point=False)
    L = np.sum(fr.fxx * fr.N, axis=-1)
    M = np.sum(fr.fxy * fr.N, axis=-1)
    Nn = np.sum(fr.fyy * fr.N, axis=-1)
    II = np.stack([np.stack([L, M], -1), np.stack([M, Nn], -1)], -2)
    e2 = fr.e_sigma ** 2
    return FundamentalForms(
        II_matrix=II,
        II_orthonormal=II / e2[..., None, None],
        mean_curvature=(L + Nn) / (2 * e2),
        gauss_curvature=(L * Nn - M * M) / e2 ** 2,
    )
