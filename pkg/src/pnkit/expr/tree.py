"""Expression trees as produced by the parser.

Trees are only the front end: every tensor coefficient lives as a
:class:`~pnkit.expr.canonical.CanonicalForm`.  The tree operations here
(differentiate, eval_at, printing) exist for inputs and as an independent
cross-check of the canonical path.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Union

from pnkit.expr.canonical import (
    BUILTINS, ONE, ZERO, CanonicalForm, Coordinate, Opaque,
)


class ScalarExpr:
    """Base class of expression tree nodes."""

    def __add__(self, other):
        return Add((self, as_expr(other)))

    def __radd__(self, other):
        return Add((as_expr(other), self))

    def __sub__(self, other):
        return Add((self, Neg(as_expr(other))))

    def __rsub__(self, other):
        return Add((as_expr(other), Neg(self)))

    def __mul__(self, other):
        return Mul((self, as_expr(other)))

    def __rmul__(self, other):
        return Mul((as_expr(other), self))

    def __truediv__(self, other):
        return Div(self, as_expr(other))

    def __neg__(self):
        return Neg(self)

    def __pow__(self, k: int):
        return Pow(self, k)

    def __str__(self):
        return to_string(self)


@dataclass(frozen=True, eq=True)
class Num(ScalarExpr):
    value: Fraction


@dataclass(frozen=True, eq=True)
class Sym(ScalarExpr):
    name: str
    index: int


@dataclass(frozen=True, eq=True)
class App(ScalarExpr):
    name: str
    order: int
    arg: ScalarExpr

    def __post_init__(self):
        if self.order < 0:
            raise ValueError("derivative order must be non-negative")


@dataclass(frozen=True, eq=True)
class Add(ScalarExpr):
    terms: tuple


@dataclass(frozen=True, eq=True)
class Mul(ScalarExpr):
    factors: tuple


@dataclass(frozen=True, eq=True)
class Pow(ScalarExpr):
    base: ScalarExpr
    exp: int


@dataclass(frozen=True, eq=True)
class Div(ScalarExpr):
    num: ScalarExpr
    den: ScalarExpr

    def __post_init__(self):
        if isinstance(self.den, Num) and self.den.value == 0:
            raise ZeroDivisionError("zero denominator literal")


@dataclass(frozen=True, eq=True)
class Neg(ScalarExpr):
    arg: ScalarExpr


def as_expr(v) -> ScalarExpr:
    if isinstance(v, ScalarExpr):
        return v
    if isinstance(v, (int, Fraction)):
        return Num(Fraction(v))
    raise TypeError(f"cannot use {type(v).__name__} in an expression")


# -- differentiation ---------------------------------------------------------

def _outer(name: str, order: int, arg: ScalarExpr) -> ScalarExpr:
    if name == "sin":
        return App("cos", 0, arg)
    if name == "cos":
        return Neg(App("sin", 0, arg))
    if name == "exp":
        return App("exp", 0, arg)
    return App(name, order + 1, arg)


def differentiate(e: ScalarExpr, coord: str) -> ScalarExpr:
    """Partial derivative of a tree by the chain, product and quotient rules."""
    if isinstance(e, Num):
        return Num(Fraction(0))
    if isinstance(e, Sym):
        return Num(Fraction(1 if e.name == coord else 0))
    if isinstance(e, App):
        return Mul((_outer(e.name, e.order, e.arg), differentiate(e.arg, coord)))
    if isinstance(e, Add):
        return Add(tuple(differentiate(t, coord) for t in e.terms))
    if isinstance(e, Neg):
        return Neg(differentiate(e.arg, coord))
    if isinstance(e, Mul):
        terms = []
        for k, f in enumerate(e.factors):
            rest = e.factors[:k] + e.factors[k + 1:]
            terms.append(Mul(rest + (differentiate(f, coord),)))
        return Add(tuple(terms))
    if isinstance(e, Pow):
        if e.exp == 0:
            return Num(Fraction(0))
        return Mul((Num(Fraction(e.exp)), Pow(e.base, e.exp - 1), differentiate(e.base, coord)))
    if isinstance(e, Div):
        dn, dd = differentiate(e.num, coord), differentiate(e.den, coord)
        return Div(Add((Mul((dn, e.den)), Neg(Mul((e.num, dd))))), Pow(e.den, 2))
    raise TypeError(f"unknown node {e!r}")


# -- canonical forms ----------------------------------------------------------

def canonicalize(e: ScalarExpr) -> CanonicalForm:
    """Reduced rational-function normal form of a tree."""
    if isinstance(e, Num):
        return CanonicalForm.const(e.value)
    if isinstance(e, Sym):
        return CanonicalForm.atom(Coordinate(e.name, e.index))
    if isinstance(e, App):
        return CanonicalForm.atom(_opaque_atom(e.name, e.order, canonicalize(e.arg)))
    if isinstance(e, Add):
        out = ZERO
        for t in e.terms:
            out = out + canonicalize(t)
        return out
    if isinstance(e, Neg):
        return -canonicalize(e.arg)
    if isinstance(e, Mul):
        out = ONE
        for f in e.factors:
            out = out * canonicalize(f)
        return out
    if isinstance(e, Pow):
        return canonicalize(e.base) ** e.exp
    if isinstance(e, Div):
        return canonicalize(e.num) / canonicalize(e.den)
    raise TypeError(f"unknown node {e!r}")


def _opaque_atom(name: str, order: int, arg: CanonicalForm) -> Opaque:
    if name in BUILTINS and order:
        # sin'' etc. are rewritten through the builtin derivative rules
        raise ValueError(f"derivative marks on builtin {name} are not supported")
    return Opaque(name, order, arg)


def is_zero(e: ScalarExpr) -> bool:
    return canonicalize(e).is_zero()


# -- evaluation -------------------------------------------------------------

OpaqueBinding = Union[Mapping, Callable[[str, int, Fraction], object]]


def opaque_callback(bindings: OpaqueBinding,
                    point: Mapping[str, object] = None) -> Callable[[str, int, Fraction], Fraction]:
    """Normalize opaque bindings into a ``(name, order, argvalue) -> value`` callable.

    A mapping may be keyed by ``(name, order, argvalue)`` triples or by
    :class:`Opaque` atoms; atom keys match when their argument evaluates to
    the same value at ``point``.
    """
    if callable(bindings):
        return bindings
    by_value = {}
    by_atom = {}
    for k, v in bindings.items():
        if isinstance(k, Opaque):
            by_atom[k] = Fraction(v)
        else:
            name, order, at = k
            by_value[(name, order, Fraction(at))] = Fraction(v)

    def lookup(name, order, at):
        key = (name, order, Fraction(at))
        if key in by_value:
            return by_value[key]
        for atom, v in by_atom.items():
            if (atom.name == name and atom.order == order and point is not None
                    and atom.arg.evaluate(point, lookup) == at):
                return v
        raise KeyError(f"opaque atom {name}{chr(39) * order}({at}) is not bound")

    return lookup


def eval_at(e: ScalarExpr, point: Mapping[str, object],
            opaque: OpaqueBinding = None) -> Fraction:
    """Exact value of a tree at a rational point."""
    pt = {k: Fraction(v) for k, v in point.items()}
    lookup = opaque_callback(opaque if opaque is not None else {}, pt)

    def ev(n):
        if isinstance(n, Num):
            return n.value
        if isinstance(n, Sym):
            if n.name not in pt:
                raise KeyError(f"coordinate {n.name} is not bound")
            return pt[n.name]
        if isinstance(n, App):
            return Fraction(lookup(n.name, n.order, ev(n.arg)))
        if isinstance(n, Add):
            return sum((ev(t) for t in n.terms), Fraction(0))
        if isinstance(n, Neg):
            return -ev(n.arg)
        if isinstance(n, Mul):
            out = Fraction(1)
            for f in n.factors:
                out *= ev(f)
            return out
        if isinstance(n, Pow):
            b = ev(n.base)
            if b == 0 and n.exp < 0:
                raise ZeroDivisionError("zero to a negative power")
            return b ** n.exp
        if isinstance(n, Div):
            d = ev(n.den)
            if d == 0:
                raise ZeroDivisionError(f"denominator {to_string(n.den)} vanishes")
            return ev(n.num) / d
        raise TypeError(f"unknown node {n!r}")

    return ev(e)


# -- printing ---------------------------------------------------------------

_PREC = {Add: 1, Neg: 2, Mul: 3, Div: 3, Pow: 4}


def _prec(n) -> int:
    if isinstance(n, Num):
        return 5 if n.value >= 0 and n.value.denominator == 1 else 2
    return _PREC.get(type(n), 5)


def _wrap(n, limit: int) -> str:
    s = to_string(n)
    return f"({s})" if _prec(n) < limit else s


def to_string(n: ScalarExpr) -> str:
    """Print a tree in the input grammar; re-parsing gives an equal canonical form."""
    if isinstance(n, Num):
        v = n.value
        s = str(v.numerator) if v.denominator == 1 else f"{abs(v.numerator)}/{v.denominator}"
        if v.denominator != 1:
            s = f"({s})"
            return f"-{s}" if v < 0 else s
        return s
    if isinstance(n, Sym):
        return n.name
    if isinstance(n, App):
        return f"{n.name}{chr(39) * n.order}({to_string(n.arg)})"
    if isinstance(n, Add):
        if not n.terms:
            return "0"
        parts = [_wrap(n.terms[0], 1)]
        for t in n.terms[1:]:
            if isinstance(t, Neg):
                parts.append(f" - {_wrap(t.arg, 3)}")
            else:
                parts.append(f" + {_wrap(t, 2)}")
        return "".join(parts)
    if isinstance(n, Neg):
        return f"-{_wrap(n.arg, 4)}"
    if isinstance(n, Mul):
        if not n.factors:
            return "1"
        return "*".join(_wrap(f, 4) for f in n.factors)
    if isinstance(n, Pow):
        return f"{_wrap(n.base, 5)}^{n.exp}"
    if isinstance(n, Div):
        return f"{_wrap(n.num, 3)}/{_wrap(n.den, 4)}"
    raise TypeError(f"unknown node {n!r}")
