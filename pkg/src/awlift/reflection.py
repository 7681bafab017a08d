"""Reflection across a minimal surface through its family of orthogonal circles.

For w = f~(z) the reflected point is

    w* = w + e^sigma (alpha X + beta Y) / (alpha^2 + beta^2),

with (alpha, beta) the gradient of log u.  The same point is also computed
as w + 2 J(grad log lambda_Sigma), J(v) = v / |v|^2, from the ambient
coordinate derivatives; the two routes are kept separate so they can be
compared.  When alpha = beta = 0 the reflection sends w to infinity and
the circle through w degenerates to the normal line.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .errors import IllConditionedError, InvariantViolation
from .harmonic import hyperbolic_distance, sigma_at, u_log_gradient, u_value
from .lift import frame_at, lift_point
from .mobius import INFINITY, Mobius3

DEGENERATE_TOL = 1e-14
FD_STEP = 1e-5


@dataclass
class ReflectionData:
    z: np.ndarray
    w: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    w_star: np.ndarray
    w_star_intrinsic: np.ndarray
    diameter: np.ndarray
    degenerate: np.ndarray
    N: np.ndarray
    e_sigma: np.ndarray


def _intrinsic_reflection(fr, sd, z) -> np.ndarray:
    """w + 2 J(grad log lambda_Sigma), with the gradient pushed forward by f~."""
    x, y = z.real, z.imag
    w2 = 1 - np.abs(z) ** 2
    gs = sd.grad_sigma
    psi_x = 2 * x / w2 - gs[..., 0]
    psi_y = 2 * y / w2 - gs[..., 1]
    metric = np.sum(fr.fx * fr.fx, axis=-1)  # e^{2 sigma}
    grad = (psi_x[..., None] * fr.fx + psi_y[..., None] * fr.fy) / metric[..., None]
    n2 = np.sum(grad * grad, axis=-1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        return fr.point + 2 * grad / n2


def reflect_point(m, z) -> ReflectionData:
    z = np.asarray(z, dtype=complex)
    fr = frame_at(m, z)
    sd = sigma_at(m, z)
    ab = u_log_gradient(m, z)
    alpha, beta = ab[..., 0], ab[..., 1]
    n2 = alpha ** 2 + beta ** 2
    degenerate = np.sqrt(n2) <= DEGENERATE_TOL
    safe = np.where(degenerate, 1.0, n2)
    es = fr.e_sigma
    step = es[..., None] * (alpha[..., None] * fr.X + beta[..., None] * fr.Y) / safe[..., None]
    w_star = np.where(degenerate[..., None], INFINITY, fr.point + step)
    intrinsic = np.where(degenerate[..., None], INFINITY, _intrinsic_reflection(fr, sd, z))
    diameter = np.where(degenerate, np.inf, es / np.sqrt(safe))
    return ReflectionData(z, fr.point, alpha, beta, w_star, intrinsic, diameter, degenerate, fr.N, es)


def reflect(m, z) -> np.ndarray:
    """Just w* = R(f~(z)); infinity marker where degenerate."""
    return reflect_point(m, z).w_star


# --- circles -------------------------------------------------------------------------


@dataclass
class CircleData:
    w: np.ndarray
    w_star: np.ndarray
    center: np.ndarray
    radius: np.ndarray
    plane_normal: np.ndarray
    is_line: np.ndarray
    direction: np.ndarray  # unit chord direction (w* - w) / |w* - w|, or N for a line
    N: np.ndarray

    def sample(self, n: int = 64, line_extent: float = 10.0) -> np.ndarray:
        """n points on each circle, shape (..., n, 3); lines are sampled on a segment."""
        t = 2 * np.pi * np.arange(n) / n
        c, s = np.cos(t), np.sin(t)
        # w sits at angle pi: center - radius * direction
        r = np.where(self.is_line, 0.0, self.radius)[..., None, None]
        circ = (self.center[..., None, :]
                + r * (c[:, None] * self.direction[..., None, :] + s[:, None] * self.N[..., None, :]))
        seg = np.linspace(-line_extent, line_extent, n)
        line = self.w[..., None, :] + seg[:, None] * self.N[..., None, :]
        return np.where(self.is_line[..., None, None], line, circ)


def _unit(v):
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def circle_at(m, z) -> CircleData:
    rd = reflect_point(m, z)
    deg = rd.degenerate
    w, ws = rd.w, np.where(deg[..., None], rd.w, rd.w_star)
    chord = ws - w
    safe_chord = np.where(deg[..., None], rd.N, chord)
    direction = np.where(deg[..., None], rd.N, _unit(safe_chord))
    normal = _unit(np.cross(rd.N, np.where(deg[..., None], _any_perp(rd.N), direction)))
    center = np.where(deg[..., None], rd.w, (w + ws) / 2)
    radius = np.where(deg, np.inf, np.linalg.norm(chord, axis=-1) / 2)
    return CircleData(rd.w, rd.w_star, center, radius, normal, deg, direction, rd.N)


def _any_perp(n):
    e = np.where(np.abs(n[..., :1]) < 0.9, [1.0, 0.0, 0.0], [0.0, 1.0, 0.0])
    return _unit(np.cross(n, e))


# --- u under Möbius transformations and the inversion test -------------------------------


def u_mobius(m, T: Mobius3):
    """Callable z -> u of T o f~, using e^tau = ||T'(f~)|| e^sigma."""

    def u(z):
        z = np.asarray(z, dtype=complex)
        es = np.exp(sigma_at(m, z).sigma) * T.conformal_factor(lift_point(m, z))
        return ((1 - np.abs(z) ** 2) * es) ** -0.5

    return u


def _tau(m, z, w1, T: Mobius3 | None) -> np.ndarray:
    p = lift_point(m, z)
    tau = sigma_at(m, z).sigma
    if T is not None:
        tau = tau + np.log(T.conformal_factor(p))
        p = T.apply(p)
    return tau - np.log(np.sum((p - w1) ** 2, axis=-1))


def inversion_critical_test(m, z0: complex, w1, T: Mobius3 | None = None,
                            step: float = FD_STEP, min_distance: float = 1e-6) -> float:
    """||grad log u|| at z0 for I o (T o) f~, I the unit inversion about w1.

    The conformal factor of I o f~ is e^tau = e^sigma / |f~ - w1|^2; grad tau
    comes from central differences.  Zero means z0 is a critical point.
    """
    z0 = complex(z0)
    w1 = np.asarray(w1, dtype=float)
    stencil = z0 + np.array([step, -step, 1j * step, -1j * step, 0])
    p = lift_point(m, stencil)
    if T is not None:
        p = T.apply(p)
    dist = np.linalg.norm(p - w1, axis=-1)
    if np.min(dist) < min_distance:
        raise IllConditionedError(
            f"inversion center lies within {np.min(dist):.2e} of the surface near z = {z0!r}"
        )
    tau = _tau(m, stencil, w1, T)
    tx = (tau[0] - tau[1]) / (2 * step)
    ty = (tau[2] - tau[3]) / (2 * step)
    w = 1 - abs(z0) ** 2
    gx = z0.real / w - tx / 2
    gy = z0.imag / w - ty / 2
    return float(np.hypot(gx, gy))


# --- critical points of u ----------------------------------------------------------------


def _from_plane(p) -> complex:
    """Hyperbolic polar chart: |p| is the distance from 0 for |dz|/(1-|z|^2)."""
    r = np.hypot(p[0], p[1])
    if r == 0:
        return 0j
    return complex(p[0], p[1]) * np.tanh(r) / r


def _to_plane(z: complex) -> np.ndarray:
    r = abs(z)
    if r == 0:
        return np.zeros(2)
    return np.array([z.real, z.imag]) * np.arctanh(r) / r


def _local_minima(values: np.ndarray) -> np.ndarray:
    """Indices (i, j) of discrete local minima on a (radial, periodic angular) grid."""
    v = values
    padded = np.pad(v, ((1, 1), (0, 0)), mode="edge")
    nb = [padded[:-2], padded[2:], np.roll(v, 1, axis=1), np.roll(v, -1, axis=1)]
    mask = np.all([v <= n for n in nb], axis=0)
    return np.argwhere(mask)


def critical_point_find(target, n_grid: int = 64, r_max: float = 0.99, cap: float = 5.0,
                        tol: float = 1e-10, max_seeds: int = 8) -> complex | None:
    """The interior minimum of u, or None when u decreases toward the circle.

    ``target`` is a map (u from its conformal factor) or a callable z -> u.
    Descent runs in the hyperbolic polar chart from every discrete local
    minimum of a polar seed grid; distinct interior results raise
    InvariantViolation.
    """
    is_map = hasattr(target, "jets")
    ufun = (lambda z: u_value(target, z)) if is_map else target

    radii = r_max * np.arange(1, n_grid + 1) / n_grid
    angles = 2 * np.pi * np.arange(n_grid) / n_grid
    grid = radii[:, None] * np.exp(1j * angles)[None, :]
    vals = np.log(ufun(grid.ravel())).reshape(grid.shape)
    u0 = float(np.log(ufun(np.array([0j]))[0]))

    seeds = [grid[i, j] for i, j in _local_minima(vals)]
    seeds.sort(key=lambda z: float(np.log(ufun(np.array([z]))[0])))
    if u0 <= vals[0].min():
        seeds.insert(0, 0j)
    seeds = seeds[:max_seeds]

    def objective(p):
        z = _from_plane(p)
        if abs(z) >= 1:
            return np.inf
        return float(np.log(ufun(np.array([z]))[0]))

    found: list[complex] = []
    for seed in seeds:
        res = optimize.minimize(objective, _to_plane(seed), method="Nelder-Mead",
                                options={"xatol": tol, "fatol": 1e-15, "maxiter": 4000})
        if np.hypot(*res.x) > cap:
            continue
        z = _from_plane(res.x)
        if is_map:
            z = _polish(target, z)
        if found and all(hyperbolic_distance(z, f) <= 1e-4 for f in found):
            continue
        found.append(z)
    if len(found) > 1:
        raise InvariantViolation(f"u has more than one critical point: {found}")
    return found[0] if found else None


def _polish(m, z: complex) -> complex:
    def grad(p):
        return u_log_gradient(m, complex(p[0], p[1]))

    sol = optimize.root(grad, [z.real, z.imag], tol=1e-14)
    zz = complex(sol.x[0], sol.x[1])
    if not sol.success or abs(zz) >= 1 or hyperbolic_distance(zz, z) > 1e-3:
        return z
    return zz
