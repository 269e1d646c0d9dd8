"""Exact symbolic scalars: parsing, differentiation, canonical forms, zero tests."""
from pnkit.expr.canonical import (
    BUILTINS, ONE, ZERO, Atom, CanonicalForm, Coordinate, Opaque,
)
from pnkit.expr.parser import ParseError, UnknownIdentifier, parse
from pnkit.expr.tree import (
    Add, App, Div, Mul, Neg, Num, Pow, ScalarExpr, Sym,
    canonicalize, differentiate, eval_at, is_zero, to_string,
)

__all__ = [
    "BUILTINS", "ONE", "ZERO", "Atom", "CanonicalForm", "Coordinate", "Opaque",
    "ParseError", "UnknownIdentifier", "parse",
    "Add", "App", "Div", "Mul", "Neg", "Num", "Pow", "ScalarExpr", "Sym",
    "canonicalize", "differentiate", "eval_at", "is_zero", "to_string",
]
