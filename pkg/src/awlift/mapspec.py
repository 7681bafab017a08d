"""Weierstrass data (h, g, q) for a harmonic map f = h + conj(g).

The dilatation g'/h' must be the square of q.  A spec may give g, q, both,
or neither (the analytic case).  Everything downstream only needs the
order-2 jets of h', g' and q, returned by :meth:`MapSpec.jets`.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

from . import jets as J
from .errors import ConsistencyError, ParseError, SingularPointError, SpecError
from .expr import BinOp, Expr, depends_on_z, eval_jet, parse, pretty, walk

ALLOWED_KEYS = {"h", "g", "q", "label"}


class MapJets(NamedTuple):
    """Order-k jets of h', g' and q at a batch of points."""

    hp: J.HoloJet
    gp: J.HoloJet
    q: J.HoloJet


@dataclass(frozen=True)
class MapSpec:
    h: Expr
    g: Expr | None = None
    q: Expr | None = None
    label: str = ""

    @property
    def is_analytic(self) -> bool:
        return self.g is None and self.q is None

    @property
    def has_vertical(self) -> bool:
        """False when q vanishes identically (the lift is planar)."""
        return not self.is_analytic

    def jets(self, z, order: int = 2) -> MapJets:
        z = np.asarray(z, dtype=complex)
        hp = J.derivative(eval_jet(self.h, z, order + 1))
        if self.is_analytic:
            zero = J.constant(0.0, order, z.shape, z)
            return MapJets(hp, zero, zero)
        if self.q is not None:
            q = eval_jet(self.q, z, order)
        if self.g is not None:
            gp = J.derivative(eval_jet(self.g, z, order + 1))
        if self.q is None:
            try:
                q = J.jet_sqrt(J.jet_div(gp, hp))
            except SingularPointError as exc:
                exc.point = complex(z.ravel()[exc.index or 0]) if z.ndim else complex(z)
                raise
        if self.g is None:
            gp = J.jet_mul(J.jet_mul(q, q), hp)
        return MapJets(hp, gp, q)

    def h_value(self, z) -> np.ndarray:
        return eval_jet(self.h, z, 0).value

    def g_value(self, z) -> np.ndarray | None:
        """g(z), or None when g must come from integrating q^2 h'."""
        if self.g is None:
            return None if self.q is not None else np.zeros(np.shape(z), dtype=complex)
        return eval_jet(self.g, z, 0).value

    def to_dict(self) -> dict:
        d = {"h": pretty(self.h)}
        if self.g is not None:
            d["g"] = pretty(self.g)
        if self.q is not None:
            d["q"] = pretty(self.q)
        if self.label:
            d["label"] = self.label
        return d


class Precomposed:
    """The map f o T for a disk automorphism T(z) = e^{i theta} (z + a) / (1 + conj(a) z).

    Quacks like MapSpec: jets come from composing the base jets with the
    jet of T, so the Schwarzian transformation rule can be checked against
    an independent evaluation.
    """

    def __init__(self, base, a: complex, theta: float = 0.0):
        if abs(a) >= 1:
            raise SpecError("automorphism parameter needs |a| < 1")
        self.base = base
        self.a = complex(a)
        self.theta = float(theta)
        self.label = f"{getattr(base, 'label', '')} o T(a={self.a}, theta={self.theta})"

    @property
    def is_analytic(self) -> bool:
        return self.base.is_analytic

    @property
    def has_vertical(self) -> bool:
        return self.base.has_vertical

    def transform_jet(self, z, order: int = 3) -> J.HoloJet:
        zj = J.variable(np.asarray(z, dtype=complex), order)
        rot = np.exp(1j * self.theta)
        return rot * (zj + self.a) / (1 + np.conj(self.a) * zj)

    def transform(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        return np.exp(1j * self.theta) * (z + self.a) / (1 + np.conj(self.a) * z)

    def jets(self, z, order: int = 2) -> MapJets:
        tj = self.transform_jet(z, order + 1)
        inner = tj.truncate(order)
        tp = J.derivative(tj)
        b = self.base.jets(tj.value, order)
        hp = J.jet_mul(J.jet_compose(b.hp, inner), tp)
        gp = J.jet_mul(J.jet_compose(b.gp, inner), tp)
        return MapJets(hp, gp, J.jet_compose(b.q, inner))

    def h_value(self, z):
        return self.base.h_value(self.transform(z))

    def g_value(self, z):
        return self.base.g_value(self.transform(z))


def sample_grid(radius: float = 0.9, n: int = 32) -> np.ndarray:
    r = radius * np.arange(n) / (n - 1)
    theta = 2 * np.pi * np.arange(n) / n
    return (r[:, None] * np.exp(1j * theta)[None, :]).ravel()


def consistency_residual(spec: MapSpec, z) -> np.ndarray:
    """|q^2 h' - g'| / (|h'| + |g'| + 1), only meaningful when g and q are both given."""
    z = np.asarray(z, dtype=complex)
    hp = J.derivative(eval_jet(spec.h, z, 1)).value
    gp = J.derivative(eval_jet(spec.g, z, 1)).value
    q = eval_jet(spec.q, z, 0).value
    return np.abs(q * q * hp - gp) / (np.abs(hp) + np.abs(gp) + 1.0)


def _check_powers(ast: Expr, field: str) -> None:
    """Reject non-integer powers whose base winds around zero in the disk."""
    circle = 0.9 * np.exp(2j * np.pi * np.arange(1024) / 1024)
    for node in walk(ast):
        if not (isinstance(node, BinOp) and node.op == "^" and depends_on_z(node.left)):
            continue
        if not depends_on_z(node.right):
            p = complex(eval_jet(node.right, 0.0, 0).value)
            if p.imag == 0 and float(p.real).is_integer():
                continue
        base = eval_jet(node.left, circle, 0).value
        winding = np.sum(np.angle(np.roll(base, -1) / base)) / (2 * np.pi)
        if abs(winding) > 0.5:
            raise SpecError(f"base of non-integer power {pretty(node.left)!r} vanishes in the disk", field)
        crossing = (base.real < 0) & (np.abs(np.diff(np.sign(base.imag), append=np.sign(base.imag[0]))) == 2)
        if crossing.any():
            warnings.warn(
                f"{field}: base {pretty(node.left)!r} crosses the principal branch cut on |z|=0.9",
                stacklevel=3,
            )


CAUCHY_RADIUS = 0.9
CAUCHY_PROBES = np.array([0.0, 0.3, -0.45j, 0.6 * np.exp(2j)])


def _check_analytic(ast: Expr, field: str, n: int = 1024) -> None:
    """Reproduce interior values from the Cauchy integral over |z| = 0.9.

    Poles and branch cuts inside the circle make the two disagree; the
    trapezoid rule is spectrally accurate for functions analytic on a
    neighbourhood of the closed disk of that radius.
    """
    zeta = CAUCHY_RADIUS * np.exp(2j * np.pi * np.arange(n) / n)
    f = eval_jet(ast, zeta, 0).value
    # dzeta = i zeta dtheta, so the integral is the mean of f zeta / (zeta - w)
    recon = np.mean(f[None, :] * zeta[None, :] / (zeta[None, :] - CAUCHY_PROBES[:, None]), axis=1)
    direct = eval_jet(ast, CAUCHY_PROBES, 0).value
    err = np.abs(recon - direct) / (1 + np.abs(f).max())
    if err.max() > 1e-6:
        k = int(np.argmax(err))
        raise SpecError(
            f"{pretty(ast)!r} is not analytic on |z| < {CAUCHY_RADIUS} "
            f"(Cauchy integral misses the value at z = {complex(CAUCHY_PROBES[k])!r} by {err[k]:.2e}; "
            "poles and branch cuts are unsupported)",
            field,
        )


def make_spec(h: str, g: str | None = None, q: str | None = None, label: str = "",
              check: bool = True) -> MapSpec:
    fields = {}
    for name, src in (("h", h), ("g", g), ("q", q)):
        if src is None:
            fields[name] = None
            continue
        if not isinstance(src, str):
            raise SpecError("expression must be a string", name)
        try:
            fields[name] = parse(src)
        except ParseError as exc:
            raise SpecError(str(exc), name) from exc
    spec = MapSpec(fields["h"], fields["g"], fields["q"], label)
    if check:
        validate(spec)
    return spec


def validate(spec: MapSpec) -> None:
    pts = sample_grid()
    for name in ("h", "g", "q"):
        ast = getattr(spec, name)
        if ast is None:
            continue
        _check_powers(ast, name)
        try:
            eval_jet(ast, pts, 3 if name != "q" else 2)
            _check_analytic(ast, name)
        except SingularPointError as exc:
            raise SpecError(str(exc), name) from exc
    if spec.q is None and spec.g is not None:
        warnings.warn(
            "q built as the principal square root of g'/h'; it must be single-valued on the disk",
            stacklevel=3,
        )
    if spec.g is not None and spec.q is not None:
        res = consistency_residual(spec, pts)
        k = int(np.argmax(res))
        if res[k] > 1e-8:
            raise ConsistencyError(
                f"q^2 h' != g' (worst residual {res[k]:.3e} at z = {complex(pts[k])!r})",
                complex(pts[k]), float(res[k]),
            )


def load_spec(source: str | Path | dict) -> MapSpec:
    """Load a MapSpec from a JSON file path, an inline JSON string, or a dict."""
    if isinstance(source, dict):
        data = source
    else:
        text = str(source).strip()
        if not text.startswith("{"):
            path = Path(text)
            try:
                text = path.read_text(encoding="utf-8")
            except OSError as exc:
                raise SpecError(f"cannot read map file {str(path)!r}: {exc.strerror}") from exc
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SpecError(f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise SpecError("map spec must be a JSON object")
    extra = set(data) - ALLOWED_KEYS
    if extra:
        raise SpecError(f"unknown keys {sorted(extra)}")
    if "h" not in data:
        raise SpecError("missing required field", "h")
    label = data.get("label", "")
    if not isinstance(label, str):
        raise SpecError("label must be a string", "label")
    return make_spec(data["h"], data.get("g"), data.get("q"), label)
