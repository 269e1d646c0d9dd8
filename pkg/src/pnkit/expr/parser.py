"""Recursive-descent parser for coefficient expressions.

Grammar (whitespace-insensitive)::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | base ('^' ['-'] integer)?
    base   := integer | ident | ident '(' expr ')' | '(' expr ')'
    ident  := letter (letter | digit | '_')* "'"*

Trailing apostrophes on an opaque function name give the derivative order.
Unary minus binds looser than ``^`` so that ``-x^2`` is ``-(x^2)``.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from pnkit.expr.canonical import BUILTINS
from pnkit.expr.tree import Add, App, Div, Mul, Neg, Num, Pow, ScalarExpr, Sym


class ParseError(ValueError):
    def __init__(self, message: str, pos: int, text: str = ""):
        self.pos = pos
        self.text = text
        super().__init__(f"{message} at position {pos}" + (f" in {text!r}" if text else ""))


class UnknownIdentifier(ParseError):
    pass


def _tokenize(text: str):
    toks = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(("int", text[i:j], i))
            i = j
        elif ch.isalpha():
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            k = j
            while k < n and text[k] == "'":
                k += 1
            toks.append(("ident", text[i:k], i))
            i = k
        elif ch in "+-*/^()":
            toks.append((ch, ch, i))
            i += 1
        else:
            raise ParseError(f"unexpected character {ch!r}", i, text)
    toks.append(("end", "", n))
    return toks


class _Parser:
    def __init__(self, text: str, coords: Sequence[str], opaque: Iterable[str]):
        self.text = text
        self.toks = _tokenize(text)
        self.k = 0
        self.coords = {c: i for i, c in enumerate(coords)}
        self.opaque = set(opaque)

    def peek(self):
        return self.toks[self.k]

    def take(self, kind=None):
        tok = self.toks[self.k]
        if kind is not None and tok[0] != kind:
            what = tok[1] or "end of input"
            raise ParseError(f"expected {kind!r}, found {what!r}", tok[2], self.text)
        self.k += 1
        return tok

    def parse(self) -> ScalarExpr:
        e = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected {tok[1]!r}", tok[2], self.text)
        return e

    def expr(self):
        terms = [self.term()]
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            t = self.term()
            terms.append(t if op == "+" else Neg(t))
        return terms[0] if len(terms) == 1 else Add(tuple(terms))

    def term(self):
        factors = [self.factor()]
        while self.peek()[0] in ("*", "/"):
            op, _, pos = self.take()
            f = self.factor()
            if op == "*":
                factors.append(f)
            else:
                num = factors[0] if len(factors) == 1 else Mul(tuple(factors))
                if isinstance(f, Num) and f.value == 0:
                    raise ParseError("zero denominator literal", pos, self.text)
                factors = [Div(num, f)]
        return factors[0] if len(factors) == 1 else Mul(tuple(factors))

    def factor(self):
        if self.peek()[0] == "-":
            self.take()
            return Neg(self.factor())
        b = self.base()
        if self.peek()[0] == "^":
            self.take()
            neg = False
            if self.peek()[0] == "-":
                self.take()
                neg = True
            tok = self.take("int")
            k = int(tok[1])
            if neg and isinstance(b, Num) and b.value == 0:
                raise ParseError("zero raised to a negative power", tok[2], self.text)
            b = Pow(b, -k if neg else k)
        return b

    def base(self):
        kind, val, pos = self.peek()
        if kind == "int":
            self.take()
            return Num(Fraction(int(val)))
        if kind == "(":
            self.take()
            e = self.expr()
            self.take(")")
            return e
        if kind == "ident":
            self.take()
            name = val.rstrip("'")
            order = len(val) - len(name)
            if self.peek()[0] == "(":
                if name not in self.opaque and name not in BUILTINS:
                    if name in self.coords:
                        raise ParseError(f"coordinate {name!r} used as a function", pos, self.text)
                    raise UnknownIdentifier(f"unknown function {name!r}", pos, self.text)
                if name in BUILTINS and order:
                    raise ParseError(f"derivative marker on builtin {name!r}", pos, self.text)
                self.take()
                arg = self.expr()
                self.take(")")
                return App(name, order, arg)
            if order:
                raise ParseError(f"derivative marker on non-opaque symbol {name!r}", pos, self.text)
            if name in self.coords:
                return Sym(name, self.coords[name])
            if name in self.opaque or name in BUILTINS:
                raise ParseError(f"function {name!r} needs an argument", pos, self.text)
            raise UnknownIdentifier(f"unknown identifier {name!r}", pos, self.text)
        what = val or "end of input"
        raise ParseError(f"unexpected {what!r}", pos, self.text)


def parse(text: str, chart, opaque_names: Iterable[str] = ()) -> ScalarExpr:
    """Parse ``text`` against a chart (or a plain sequence of coordinate names)."""
    coords = getattr(chart, "coords", chart)
    names = set(opaque_names) | set(getattr(chart, "opaque", ()))
    return _Parser(text, list(coords), names).parse()
