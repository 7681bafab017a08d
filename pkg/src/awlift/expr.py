"""Recursive-descent parser for analytic expressions in one complex variable.

Grammar (whitespace-insensitive)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('+' | '-') unary | power
    power  := atom ('^' unary)?            # right-associative
    atom   := NUMBER | 'z' | 'i' | 'pi' | 'e'
            | FUNC '(' expr ')' | '(' expr ')'
    FUNC   := exp | log | sqrt | sin | cos | atanh

Anything that smells like complex conjugation is rejected outright, since
it would break analyticity.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import jets as J
from .errors import (
    ConjugationError,
    ExprSyntaxError,
    SingularPointError,
    UnknownIdentifierError,
)

FUNCTIONS = ("exp", "log", "sqrt", "sin", "cos", "atanh")
CONSTANTS = {"i": 1j, "pi": math.pi, "e": math.e}
CONJUGATION_WORDS = {"conj", "conjugate", "zbar", "bar", "zb", "zc", "cc"}
CONJUGATION_CHARS = {"~", "'", "̄", "¯", "†", "̅"}


# --- AST -------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str = "z"


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"


Expr = Union[Num, Var, Const, Neg, BinOp, Call]

_OP_NAMES = {"+": "Add", "-": "Sub", "*": "Mul", "/": "Div", "^": "Pow"}


def _fmt_num(x: float) -> str:
    if float(x).is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(float(x))


def shape(node: Expr) -> str:
    """Compact structural form, e.g. ``Div(Pow(z,3),3)``."""
    if isinstance(node, Num):
        return _fmt_num(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Const):
        return node.name
    if isinstance(node, Neg):
        return f"Neg({shape(node.arg)})"
    if isinstance(node, BinOp):
        return f"{_OP_NAMES[node.op]}({shape(node.left)},{shape(node.right)})"
    return f"{node.func}({shape(node.arg)})"


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4, "atom": 5}


def _prec(node: Expr) -> int:
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return _PREC["neg"]
    return _PREC["atom"]


def pretty(node: Expr) -> str:
    """Minimal-parenthesis rendering; ``parse(pretty(a)) == a``."""
    if isinstance(node, Num):
        return _fmt_num(node.value)
    if isinstance(node, (Var, Const)):
        return node.name
    if isinstance(node, Call):
        return f"{node.func}({pretty(node.arg)})"
    if isinstance(node, Neg):
        inner = pretty(node.arg)
        return "-" + (f"({inner})" if _prec(node.arg) < _PREC["neg"] else inner)
    p = _PREC[node.op]
    left, right = pretty(node.left), pretty(node.right)
    if node.op == "^":
        if _prec(node.left) <= p:
            left = f"({left})"
        if _prec(node.right) < _PREC["neg"]:
            right = f"({right})"
    else:
        if _prec(node.left) < p:
            left = f"({left})"
        if _prec(node.right) <= p:
            right = f"({right})"
    return f"{left}{node.op}{right}"


def depends_on_z(node: Expr) -> bool:
    if isinstance(node, Var):
        return True
    if isinstance(node, (Num, Const)):
        return False
    if isinstance(node, (Neg, Call)):
        return depends_on_z(node.arg)
    return depends_on_z(node.left) or depends_on_z(node.right)


def walk(node: Expr):
    yield node
    if isinstance(node, (Neg, Call)):
        yield from walk(node.arg)
    elif isinstance(node, BinOp):
        yield from walk(node.left)
        yield from walk(node.right)


# --- lexer -------------------------------------------------------------------

_NUMBER = re.compile(r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


@dataclass(frozen=True)
class Token:
    kind: str  # "num", "ident", "op", "(", ")", "end"
    text: str
    offset: int  # byte offset into the UTF-8 source


def tokenize(src: str) -> list[Token]:
    toks: list[Token] = []
    pos = 0

    def boff(p: int) -> int:
        return len(src[:p].encode("utf-8"))

    while pos < len(src):
        ch = src[pos]
        if ch.isspace():
            pos += 1
            continue
        if ch in CONJUGATION_CHARS:
            raise ConjugationError(f"conjugation token {ch!r} is not allowed", boff(pos))
        m = _NUMBER.match(src, pos)
        if m:
            toks.append(Token("num", m.group(), boff(pos)))
            pos = m.end()
            continue
        m = _IDENT.match(src, pos)
        if m:
            word = m.group()
            if word.lower() in CONJUGATION_WORDS:
                raise ConjugationError(f"conjugation token {word!r} is not allowed", boff(pos))
            toks.append(Token("ident", word, boff(pos)))
            pos = m.end()
            continue
        if ch in "+-*/^":
            if src.startswith("**", pos):
                raise ExprSyntaxError("use '^' for powers", boff(pos), frozenset({"^"}))
            toks.append(Token("op", ch, boff(pos)))
        elif ch in "()":
            toks.append(Token(ch, ch, boff(pos)))
        else:
            raise ExprSyntaxError(f"unexpected character {ch!r}", boff(pos))
        pos += 1
    toks.append(Token("end", "", boff(len(src))))
    return toks


# --- parser ------------------------------------------------------------------

_OPERAND_START = frozenset({"number", "identifier", "(", "-", "+"})


class _Parser:
    def __init__(self, src: str):
        self.toks = tokenize(src)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def fail(self, expected, what=None):
        t = self.tok
        found = "end of input" if t.kind == "end" else repr(t.text)
        raise ExprSyntaxError(what or f"unexpected {found}", t.offset, frozenset(expected))

    def is_op(self, chars: str) -> bool:
        return self.tok.kind == "op" and self.tok.text in chars

    def parse(self) -> Expr:
        node = self.expr()
        if self.tok.kind != "end":
            self.fail({"+", "-", "*", "/", "^", "end of input"})
        return node

    def expr(self) -> Expr:
        node = self.term()
        while self.is_op("+-"):
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.is_op("*/"):
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Expr:
        if self.is_op("+-"):
            op = self.tok.text
            self.i += 1
            arg = self.unary()
            return Neg(arg) if op == "-" else arg
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.is_op("^"):
            self.i += 1
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Expr:
        t = self.tok
        if t.kind == "num":
            self.i += 1
            return Num(float(t.text))
        if t.kind == "(":
            self.i += 1
            node = self.expr()
            if self.tok.kind != ")":
                self.fail({")", "+", "-", "*", "/", "^"})
            self.i += 1
            return node
        if t.kind == "ident":
            name = t.text
            if name in FUNCTIONS:
                self.i += 1
                if self.tok.kind != "(":
                    self.fail({"("}, f"function {name!r} needs a parenthesized argument")
                self.i += 1
                arg = self.expr()
                if self.tok.kind != ")":
                    self.fail({")", "+", "-", "*", "/", "^"})
                self.i += 1
                return Call(name, arg)
            if name == "z":
                self.i += 1
                return Var()
            if name in CONSTANTS:
                self.i += 1
                return Const(name)
            raise UnknownIdentifierError(
                f"unknown identifier {name!r}", t.offset,
                frozenset({"z", *CONSTANTS, *FUNCTIONS}),
            )
        self.fail(_OPERAND_START)


def parse(src: str) -> Expr:
    if not src or not src.strip():
        raise ExprSyntaxError("empty expression", 0, _OPERAND_START)
    return _Parser(src).parse()


# --- evaluation ----------------------------------------------------------------

_UNARY_JET = {
    "exp": J.jet_exp,
    "log": J.jet_log,
    "sqrt": J.jet_sqrt,
    "sin": J.jet_sin,
    "cos": J.jet_cos,
    "atanh": J.jet_atanh,
}


def _const_value(node: Expr) -> complex:
    return complex(_eval(node, J.constant(0.0, 0)).value)


def _eval(node: Expr, zjet: J.HoloJet) -> J.HoloJet:
    if isinstance(node, Var):
        return zjet
    if isinstance(node, Num):
        return J.constant(node.value, zjet.order, zjet.shape, zjet.point)
    if isinstance(node, Const):
        return J.constant(CONSTANTS[node.name], zjet.order, zjet.shape, zjet.point)
    if isinstance(node, Neg):
        return J.jet_neg(_eval(node.arg, zjet))
    if isinstance(node, Call):
        return _UNARY_JET[node.func](_eval(node.arg, zjet))
    a = _eval(node.left, zjet)
    if node.op == "^":
        if depends_on_z(node.right):
            return J.jet_pow(a, _eval(node.right, zjet))
        p = _const_value(node.right)
        if p.imag == 0 and float(p.real).is_integer() and abs(p.real) <= 64:
            return J.jet_ipow(a, int(p.real))
        return J.jet_pow(a, p.real if p.imag == 0 else p)
    b = _eval(node.right, zjet)
    if node.op == "+":
        return J.jet_add(a, b)
    if node.op == "-":
        return J.jet_sub(a, b)
    if node.op == "*":
        return J.jet_mul(a, b)
    return J.jet_div(a, b)


def eval_jet(ast: Expr, z0, order: int = J.MAX_ORDER) -> J.HoloJet:
    """Jet of ``ast`` at ``z0`` (scalar or array of points).

    Raises SingularPointError carrying the first offending point.
    """
    z0 = np.asarray(z0, dtype=complex)
    try:
        with np.errstate(all="ignore"):
            jet = _eval(ast, J.variable(z0, order))
        bad = ~np.isfinite(jet.coeffs).all(axis=0)
        if np.any(bad):
            raise SingularPointError("non-finite value", index=int(np.flatnonzero(bad.ravel())[0]))
    except SingularPointError as exc:
        if exc.point is None and exc.index is not None:
            exc.point = complex(z0.ravel()[exc.index]) if z0.ndim else complex(z0)
        raise
    if jet.shape != z0.shape:
        jet = J.HoloJet(np.broadcast_to(jet.coeffs, (order + 1,) + z0.shape).copy(), z0)
    return jet


def eval_value(ast: Expr, z0) -> np.ndarray:
    return eval_jet(ast, z0, order=0).value
