"""Polar sampling grids and chunked (optionally threaded) sweeps."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class GridParams:
    n_radial: int = 64
    n_angular: int = 128
    r_max: float = 0.995
    exterior_r_max: float = 1.5

    def __post_init__(self):
        if self.n_radial < 2:
            raise DomainError("n_radial must be >= 2")
        if self.n_angular < 3:
            raise DomainError("n_angular must be >= 3")
        if not 0 < self.r_max < 1 < self.exterior_r_max:
            raise DomainError("need 0 < r_max < 1 < exterior_r_max")

    def radii(self) -> np.ndarray:
        # Chebyshev-like spacing, denser toward r_max
        k = np.arange(1, self.n_radial + 1)
        return self.r_max * np.sin(np.pi * k / (2 * self.n_radial))

    def angles(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.n_angular) / self.n_angular

    def points(self) -> np.ndarray:
        """Center first, then rings from the inside out (ring-major)."""
        rings = self.radii()[:, None] * np.exp(1j * self.angles())[None, :]
        return np.concatenate([[0j], rings.ravel()])

    def describe(self) -> dict:
        return {
            "kind": "polar",
            "n_radial": self.n_radial,
            "n_angular": self.n_angular,
            "r_max": self.r_max,
            "exterior_r_max": self.exterior_r_max,
            "n_points": 1 + self.n_radial * self.n_angular,
        }


def thread_count() -> int:
    try:
        n = int(os.environ.get("AWLIFT_THREADS", "1"))
    except ValueError:
        n = 1
    return max(1, n)


def sweep(fn, z, chunk: int = 2048):
    """Apply a vectorized ``fn`` to ``z`` in chunks; results keep input order.

    ``fn`` returns an array or a tuple of arrays whose leading axis matches
    its input.  Up to ``AWLIFT_THREADS`` chunks run concurrently.
    """
    z = np.asarray(z)
    pieces = [z[i:i + chunk] for i in range(0, max(len(z), 1), chunk)]
    workers = min(thread_count(), len(pieces))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(fn, pieces))
    else:
        results = [fn(p) for p in pieces]
    if isinstance(results[0], tuple):
        return tuple(np.concatenate(parts) for parts in zip(*results))
    return np.concatenate(results)
