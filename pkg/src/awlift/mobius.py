"""Möbius transformations of R^3 plus a point at infinity.

Infinity is the vector ``(inf, inf, inf)``; :func:`is_infinite` recognises
it (any non-finite component counts).  A :class:`Mobius3` is a chain of
elementary steps applied first to last.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

INFINITY = np.full(3, np.inf)


def is_infinite(x) -> np.ndarray:
    """Mask over the leading axes of an (..., 3) array."""
    return ~np.all(np.isfinite(np.asarray(x, dtype=float)), axis=-1)


def _as_points(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1:] != (3,):
        raise ValueError(f"expected 3-vectors, got shape {x.shape}")
    return x


@dataclass(frozen=True)
class Translation:
    offset: tuple[float, float, float]

    def apply(self, x):
        return x + np.asarray(self.offset, dtype=float)

    def factor(self, x):
        return np.ones(x.shape[:-1])


@dataclass(frozen=True)
class Rotation:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.shape != (3, 3) or not np.allclose(m @ m.T, np.eye(3), atol=1e-12):
            raise ValueError("rotation must be an orthogonal 3x3 matrix")
        object.__setattr__(self, "matrix", m)

    def apply(self, x):
        return x @ self.matrix.T

    def factor(self, x):
        return np.ones(x.shape[:-1])


@dataclass(frozen=True)
class Dilation:
    scale: float

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError("dilation scale must be positive")

    def apply(self, x):
        return self.scale * x

    def factor(self, x):
        return np.full(x.shape[:-1], float(self.scale))


@dataclass(frozen=True)
class Inversion:
    """x -> c + r^2 (x - c) / |x - c|^2; the plain J when c = 0, r = 1."""

    center: tuple[float, float, float] = (0.0, 0.0, 0.0)
    radius: float = 1.0

    def apply(self, x):
        c = np.asarray(self.center, dtype=float)
        d = x - c
        n2 = np.sum(d * d, axis=-1, keepdims=True)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = c + self.radius ** 2 * d / n2
        inf_in = is_infinite(x)
        out = np.where((n2 == 0) & ~inf_in[..., None], np.inf, out)
        return np.where(inf_in[..., None], c, out)

    def factor(self, x):
        d = x - np.asarray(self.center, dtype=float)
        with np.errstate(divide="ignore"):
            return self.radius ** 2 / np.sum(d * d, axis=-1)


@dataclass(frozen=True)
class Mobius3:
    steps: tuple = field(default_factory=tuple)

    def then(self, step) -> Mobius3:
        return Mobius3(self.steps + (step,))

    def apply(self, x) -> np.ndarray:
        x = _as_points(x).copy()
        for step in self.steps:
            inf = is_infinite(x)
            y = step.apply(np.where(inf[..., None], 0.0, x))
            if not isinstance(step, Inversion):
                y = np.where(inf[..., None], np.inf, y)
            else:
                y = np.where(inf[..., None], np.asarray(step.center, dtype=float), y)
            x = y
        return x

    def conformal_factor(self, x) -> np.ndarray:
        """||T'(x)||, the product of the step factors along the chain."""
        x = _as_points(x)
        total = np.ones(x.shape[:-1])
        for step in self.steps:
            total = total * step.factor(x)
            x = step.apply(x)
        return total

    __call__ = apply


def inversion(center=(0.0, 0.0, 0.0), radius: float = 1.0) -> Mobius3:
    return Mobius3((Inversion(tuple(map(float, center)), float(radius)),))


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def random_mobius(rng: np.random.Generator, min_height: float = 1.0, min_norm: float = 3.0) -> Mobius3:
    """Inversion about a random center, sandwiched between rigid motions and a dilation.

    The center has |x3| >= min_height and norm >= min_norm, so it stays off
    planar surfaces and off bounded surfaces of small extent.
    """
    while True:
        c = rng.uniform(-4, 4, 3)
        c[2] = np.sign(c[2] or 1.0) * rng.uniform(min_height, min_height + 3)
        if np.linalg.norm(c) >= min_norm:
            break
    return Mobius3((
        Inversion(tuple(c), float(rng.uniform(0.5, 2.0))),
        Rotation(random_rotation(rng)),
        Dilation(float(rng.uniform(0.5, 2.0))),
        Translation(tuple(rng.uniform(-1, 1, 3))),
    ))
