"""Adaptive Gauss-Legendre quadrature along straight segments in C.

Vectorized over a batch of segments: every batch member gets its own
bisection tree, but members that need the same subinterval share one
integrand call.
"""

from __future__ import annotations

import numpy as np

from .errors import QuadratureError

NODES, WEIGHTS = np.polynomial.legendre.leggauss(15)
_EPS = np.finfo(float).eps


def _gl(func, start, delta, a, b):
    t = a + (b - a) * (NODES + 1) / 2
    vals = func(start[:, None] + t[None, :] * delta[:, None])
    return delta * (b - a) / 2 * (vals @ WEIGHTS)


def integrate_segments(func, start, end, tol: float = 1e-11, max_depth: int = 30) -> np.ndarray:
    """Integral of ``func(zeta) dzeta`` along each segment ``start -> end``.

    ``func`` maps a complex array to a complex array of the same shape.
    Local error is the difference between 15-point rules on an interval and
    on its two halves; an interval is accepted once that drops below its
    share ``tol * (b - a)`` of the absolute tolerance.
    """
    start, end = np.broadcast_arrays(np.asarray(start, dtype=complex), np.asarray(end, dtype=complex))
    shape = start.shape
    start, end = start.ravel(), end.ravel()
    delta = end - start
    total = np.zeros(start.shape, dtype=complex)
    idx = np.flatnonzero(delta != 0)
    if idx.size == 0:
        return total.reshape(shape)
    stack = [(0.0, 1.0, idx, _gl(func, start[idx], delta[idx], 0.0, 1.0), 0)]
    while stack:
        a, b, idx, whole, depth = stack.pop()
        m = (a + b) / 2
        left = _gl(func, start[idx], delta[idx], a, m)
        right = _gl(func, start[idx], delta[idx], m, b)
        fine = left + right
        err = np.abs(fine - whole)
        ok = err <= np.maximum(tol * (b - a), 50 * _EPS * np.abs(fine))
        total[idx[ok]] += fine[ok]
        if ok.all():
            continue
        bad = ~ok
        if depth + 1 >= max_depth:
            k = idx[bad][0]
            raise QuadratureError(
                f"no convergence after {max_depth} bisections on segment "
                f"{complex(start[k])!r} -> {complex(end[k])!r} (error {err[bad][0]:.2e})"
            )
        stack.append((m, b, idx[bad], right[bad], depth + 1))
        stack.append((a, m, idx[bad], left[bad], depth + 1))
    return total.reshape(shape)


def integrate_path(func, vertices, tol: float = 1e-11) -> np.ndarray:
    """Integral along the polyline through ``vertices`` (first axis)."""
    vertices = [np.asarray(v, dtype=complex) for v in vertices]
    out = 0
    for p, q in zip(vertices[:-1], vertices[1:]):
        out = out + integrate_segments(func, p, q, tol)
    return out
