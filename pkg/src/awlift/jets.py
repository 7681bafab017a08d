"""Truncated Taylor jets of analytic functions.

A jet of order ``n`` stores ``coeffs[k] = f^(k)(z0) / k!`` for ``k = 0..n``.
Coefficient arrays have shape ``(n + 1, *batch)`` so one jet can carry a
whole grid of expansion points; all operations broadcast over the batch.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from numbers import Number

import numpy as np

from .errors import JetOrderError, SingularPointError

MAX_ORDER = 3

__all__ = [
    "HoloJet",
    "constant",
    "variable",
    "jet_add",
    "jet_sub",
    "jet_neg",
    "jet_mul",
    "jet_div",
    "jet_exp",
    "jet_log",
    "jet_sqrt",
    "jet_pow",
    "jet_ipow",
    "jet_sin",
    "jet_cos",
    "jet_atanh",
    "jet_compose",
    "derivative",
]


@dataclass(frozen=True, eq=False)
class HoloJet:
    coeffs: np.ndarray
    point: object = None

    # let numpy scalars defer to the reflected operators below
    __array_ufunc__ = None

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim == 0 or not 1 <= c.shape[0] <= MAX_ORDER + 1:
            raise JetOrderError(f"jet needs 1..{MAX_ORDER + 1} coefficients, got shape {c.shape}")
        object.__setattr__(self, "coeffs", c)

    @property
    def order(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def shape(self) -> tuple:
        return self.coeffs.shape[1:]

    @property
    def value(self) -> np.ndarray:
        return self.coeffs[0]

    def deriv(self, k: int) -> np.ndarray:
        """The k-th complex derivative at the expansion point."""
        return factorial(k) * self.coeffs[k]

    def derivatives(self) -> np.ndarray:
        return np.stack([self.deriv(k) for k in range(self.order + 1)])

    def truncate(self, order: int) -> HoloJet:
        if order > self.order:
            raise JetOrderError(f"cannot raise jet order {self.order} to {order}")
        return HoloJet(self.coeffs[: order + 1], self.point)

    def __getitem__(self, idx) -> HoloJet:
        """Index into the batch dimensions."""
        if not isinstance(idx, tuple):
            idx = (idx,)
        pt = None if self.point is None else np.asarray(self.point)[idx]
        return HoloJet(self.coeffs[(slice(None),) + idx], pt)

    def __repr__(self) -> str:
        return f"HoloJet(order={self.order}, coeffs={self.coeffs.tolist()!r})"

    # operator sugar; the named functions below are the real API
    def __add__(self, other):
        return jet_add(self, _lift(other, self))

    __radd__ = __add__

    def __sub__(self, other):
        return jet_sub(self, _lift(other, self))

    def __rsub__(self, other):
        return jet_sub(_lift(other, self), self)

    def __mul__(self, other):
        return jet_mul(self, _lift(other, self))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return jet_div(self, _lift(other, self))

    def __rtruediv__(self, other):
        return jet_div(_lift(other, self), self)

    def __neg__(self):
        return jet_neg(self)

    def __pow__(self, p):
        if isinstance(p, HoloJet):
            return jet_pow(self, p)
        if isinstance(p, (int, np.integer)):
            return jet_ipow(self, int(p))
        return jet_pow(self, p)


def constant(c, order: int = MAX_ORDER, shape: tuple = (), point=None) -> HoloJet:
    c = np.broadcast_to(np.asarray(c, dtype=complex), shape)
    coeffs = np.zeros((order + 1,) + tuple(shape), dtype=complex)
    coeffs[0] = c
    return HoloJet(coeffs, point)


def variable(z0, order: int = MAX_ORDER) -> HoloJet:
    """Jet of the identity function expanded at ``z0``."""
    z0 = np.asarray(z0, dtype=complex)
    coeffs = np.zeros((order + 1,) + z0.shape, dtype=complex)
    coeffs[0] = z0
    if order >= 1:
        coeffs[1] = 1.0
    return HoloJet(coeffs, z0)


def _lift(x, like: HoloJet) -> HoloJet:
    if isinstance(x, HoloJet):
        return x
    if isinstance(x, (Number, np.ndarray, np.number)):
        return constant(x, like.order, np.broadcast_shapes(np.shape(x), like.shape), like.point)
    return NotImplemented


def _check_pair(a: HoloJet, b: HoloJet) -> None:
    if a.order != b.order:
        raise JetOrderError(f"order mismatch: {a.order} vs {b.order}")
    if a.point is not None and b.point is not None:
        pa, pb = np.asarray(a.point), np.asarray(b.point)
        if pa.shape == pb.shape and not np.array_equal(pa, pb):
            raise JetOrderError("jets are expanded at different points")


def _point(a: HoloJet, b: HoloJet):
    return a.point if a.point is not None else b.point


def _require(ok: np.ndarray, message: str) -> None:
    ok = np.asarray(ok)
    if not ok.all():
        bad = int(np.flatnonzero(~ok.ravel())[0])
        raise SingularPointError(message, index=bad)


def _nonzero(v: np.ndarray, message: str) -> None:
    _require((v != 0) & np.isfinite(v), message)


def jet_add(a: HoloJet, b: HoloJet) -> HoloJet:
    _check_pair(a, b)
    return HoloJet(a.coeffs + b.coeffs, _point(a, b))


def jet_sub(a: HoloJet, b: HoloJet) -> HoloJet:
    _check_pair(a, b)
    return HoloJet(a.coeffs - b.coeffs, _point(a, b))


def jet_neg(a: HoloJet) -> HoloJet:
    return HoloJet(-a.coeffs, a.point)


def _cauchy(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    out = np.zeros(np.broadcast_shapes(a.shape, b.shape), dtype=complex)
    for k in range(n):
        for j in range(k + 1):
            out[k] = out[k] + a[j] * b[k - j]
    return out


def jet_mul(a: HoloJet, b: HoloJet) -> HoloJet:
    _check_pair(a, b)
    return HoloJet(_cauchy(a.coeffs, b.coeffs), _point(a, b))


def jet_div(a: HoloJet, b: HoloJet) -> HoloJet:
    _check_pair(a, b)
    b0 = b.coeffs[0]
    _nonzero(b0, "division by zero")
    n = a.order
    out = np.zeros(np.broadcast_shapes(a.coeffs.shape, b.coeffs.shape), dtype=complex)
    for k in range(n + 1):
        acc = a.coeffs[k]
        for j in range(1, k + 1):
            acc = acc - b.coeffs[j] * out[k - j]
        out[k] = acc / b0
    return HoloJet(out, _point(a, b))


def jet_exp(a: HoloJet) -> HoloJet:
    c = a.coeffs
    out = np.zeros_like(c)
    out[0] = np.exp(c[0])
    for k in range(1, a.order + 1):
        out[k] = sum(j * c[j] * out[k - j] for j in range(1, k + 1)) / k
    return HoloJet(out, a.point)


def jet_log(a: HoloJet) -> HoloJet:
    """Principal logarithm at the expansion value."""
    c = a.coeffs
    _nonzero(c[0], "logarithm of zero")
    out = np.zeros_like(c)
    out[0] = np.log(c[0])
    for k in range(1, a.order + 1):
        acc = c[k] - sum(j * out[j] * c[k - j] for j in range(1, k)) / k
        out[k] = acc / c[0]
    return HoloJet(out, a.point)


def jet_pow(a: HoloJet, p) -> HoloJet:
    """a**p with the principal branch at the expansion value.

    A jet-valued exponent goes through exp(p log a). A constant exponent
    uses the J.C.P. Miller recurrence, which needs a nonzero base.
    """
    if isinstance(p, HoloJet):
        return jet_exp(jet_mul(p, jet_log(a)))
    c = a.coeffs
    _nonzero(c[0], "non-integer power of zero")
    p = np.asarray(p, dtype=complex)
    out = np.zeros(np.broadcast_shapes(c.shape, (1,) + p.shape), dtype=complex)
    out[0] = np.power(c[0], p)
    for k in range(1, a.order + 1):
        acc = sum((p * j - (k - j)) * c[j] * out[k - j] for j in range(1, k + 1))
        out[k] = acc / (k * c[0])
    return HoloJet(out, a.point)


def jet_ipow(a: HoloJet, n: int) -> HoloJet:
    """Integer power by repeated squaring; zero base is fine for n >= 0."""
    if n < 0:
        return jet_div(constant(1.0, a.order, a.shape, a.point), jet_ipow(a, -n))
    result = constant(1.0, a.order, a.shape, a.point)
    base = a
    while n:
        if n & 1:
            result = jet_mul(result, base)
        n >>= 1
        if n:
            base = jet_mul(base, base)
    return result


def jet_sqrt(a: HoloJet) -> HoloJet:
    _nonzero(a.coeffs[0], "square root of zero")
    return jet_pow(a, 0.5)


def _sincos(a: HoloJet) -> tuple[np.ndarray, np.ndarray]:
    c = a.coeffs
    s = np.zeros_like(c)
    co = np.zeros_like(c)
    s[0], co[0] = np.sin(c[0]), np.cos(c[0])
    for k in range(1, a.order + 1):
        s[k] = sum(j * c[j] * co[k - j] for j in range(1, k + 1)) / k
        co[k] = -sum(j * c[j] * s[k - j] for j in range(1, k + 1)) / k
    return s, co


def jet_sin(a: HoloJet) -> HoloJet:
    return HoloJet(_sincos(a)[0], a.point)


def jet_cos(a: HoloJet) -> HoloJet:
    return HoloJet(_sincos(a)[1], a.point)


def jet_atanh(a: HoloJet) -> HoloJet:
    # principal atanh = (log(1+a) - log(1-a)) / 2
    one = constant(1.0, a.order, a.shape, a.point)
    out = 0.5 * (jet_log(one + a).coeffs - jet_log(one - a).coeffs)
    out[0] = np.arctanh(a.coeffs[0])
    return HoloJet(out, a.point)


def jet_compose(outer: HoloJet, inner: HoloJet) -> HoloJet:
    """Jet of ``outer o inner``; ``outer`` must be expanded at ``inner.value``."""
    if outer.order != inner.order:
        raise JetOrderError(f"order mismatch: {outer.order} vs {inner.order}")
    if outer.point is not None:
        pt = np.asarray(outer.point)
        if pt.shape == inner.value.shape and not np.allclose(pt, inner.value, rtol=1e-12, atol=1e-14):
            raise JetOrderError("outer jet is not expanded at the inner value")
    delta = inner.coeffs.copy()
    delta[0] = 0.0
    n = inner.order
    out = np.zeros(np.broadcast_shapes(outer.coeffs.shape, inner.coeffs.shape), dtype=complex)
    out[0] = outer.coeffs[0]
    power = None
    for k in range(1, n + 1):
        power = delta if power is None else _cauchy(power, delta)
        out = out + outer.coeffs[k] * power
    return HoloJet(out, inner.point)


def derivative(a: HoloJet) -> HoloJet:
    """Jet of f' (one order lower)."""
    if a.order == 0:
        raise JetOrderError("cannot differentiate an order-0 jet")
    k = np.arange(1, a.order + 1).reshape((-1,) + (1,) * len(a.shape))
    return HoloJet(k * a.coeffs[1:], a.point)
