"""Reduced rational functions over a set of algebraically independent atoms.

A :class:`CanonicalForm` is ``num / den`` where both are sparse polynomials
with exact rational coefficients.  Polynomials are plain dicts mapping a
monomial to a :class:`~fractions.Fraction`; a monomial is a tuple of
``(atom, exponent)`` pairs sorted by atom order.  Forms are kept reduced
(no common factor, denominator monic in graded-lex order), so two forms are
equal exactly when their dicts are equal.
"""
from __future__ import annotations

from fractions import Fraction
from functools import cmp_to_key
from typing import Callable, Mapping, Union

BUILTINS = {"sin", "cos", "exp"}

Number = Union[int, Fraction]


class Atom:
    """Base class for the indeterminates of a canonical form."""

    __slots__ = ("key", "_hash")

    def __lt__(self, other: "Atom") -> bool:
        return self.key < other.key


class Coordinate(Atom):
    __slots__ = ("name", "index")

    def __init__(self, name: str, index: int):
        self.name = name
        self.index = index
        self.key = (0, index, name)
        self._hash = hash(self.key)

    def __eq__(self, other):
        return isinstance(other, Coordinate) and self.key == other.key

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Coordinate({self.name!r}, {self.index})"

    def __str__(self):
        return self.name


class Opaque(Atom):
    """``name^(order)(arg)``, a formal derivative of an unknown function."""

    __slots__ = ("name", "order", "arg", "_dcache")

    def __init__(self, name: str, order: int, arg: "CanonicalForm"):
        if order < 0:
            raise ValueError("derivative order must be non-negative")
        if name in BUILTINS and order:
            raise ValueError(f"builtin {name} takes no derivative marks")
        self.name = name
        self.order = order
        self.arg = arg
        self.key = (1, name, order, arg.sort_key)
        self._hash = hash((name, order, arg))
        self._dcache = {}

    def __eq__(self, other):
        return (isinstance(other, Opaque) and self.name == other.name
                and self.order == other.order and self.arg == other.arg)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Opaque({self.name!r}, {self.order}, {self.arg})"

    def __str__(self):
        return f"{self.name}{chr(39) * self.order}({self.arg})"

    def outer_derivative(self) -> "CanonicalForm":
        """Derivative of the function itself, evaluated at the argument."""
        if self.name == "sin":
            return CanonicalForm.atom(Opaque("cos", 0, self.arg))
        if self.name == "cos":
            return -CanonicalForm.atom(Opaque("sin", 0, self.arg))
        if self.name == "exp":
            return CanonicalForm.atom(self)
        return CanonicalForm.atom(Opaque(self.name, self.order + 1, self.arg))

    def diff(self, coord: Coordinate) -> "CanonicalForm":
        hit = self._dcache.get(coord)
        if hit is None:
            inner = self.arg.diff(coord)
            hit = inner if inner.is_zero() else self.outer_derivative() * inner
            self._dcache[coord] = hit
        return hit


# -- monomials ---------------------------------------------------------------

ONE_MONO: tuple = ()


def mono_mul(a: tuple, b: tuple) -> tuple:
    if not a:
        return b
    if not b:
        return a
    out = []
    i = j = 0
    la, lb = len(a), len(b)
    while i < la and j < lb:
        xa, ea = a[i]
        xb, eb = b[j]
        if xa is xb or xa == xb:
            out.append((xa, ea + eb))
            i += 1
            j += 1
        elif xa.key < xb.key:
            out.append(a[i])
            i += 1
        else:
            out.append(b[j])
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return tuple(out)


def mono_div(a: tuple, b: tuple) -> tuple:
    """``a / b``; b must divide a."""
    exps = dict(a)
    for x, e in b:
        exps[x] -= e
    return tuple(sorted(((x, e) for x, e in exps.items() if e), key=lambda t: t[0].key))


def mono_degree(m: tuple) -> int:
    return sum(e for _, e in m)


def _grlex_cmp(a: tuple, b: tuple) -> int:
    da, db = mono_degree(a), mono_degree(b)
    if da != db:
        return -1 if da < db else 1
    # lex: first atom in atom order is the most significant variable
    ea, eb = dict(a), dict(b)
    for x in sorted(set(ea) | set(eb), key=lambda t: t.key):
        u, v = ea.get(x, 0), eb.get(x, 0)
        if u != v:
            return -1 if u < v else 1
    return 0


grlex_key = cmp_to_key(_grlex_cmp)


# -- polynomials (dict monomial -> Fraction) ---------------------------------

def p_add(a: dict, b: dict, sign: int = 1) -> dict:
    out = dict(a)
    for m, c in b.items():
        v = out.get(m, 0) + (c if sign > 0 else -c)
        if v:
            out[m] = v
        else:
            out.pop(m, None)
    return out


def p_mul(a: dict, b: dict) -> dict:
    if len(a) < len(b):
        a, b = b, a
    out: dict = {}
    for mb, cb in b.items():
        for ma, ca in a.items():
            m = mono_mul(ma, mb)
            out[m] = out.get(m, 0) + ca * cb
    return {m: c for m, c in out.items() if c}


def p_scale(a: dict, c) -> dict:
    if not c:
        return {}
    return {m: v * c for m, v in a.items()}


def p_mono_scale(a: dict, mono: tuple, c=1) -> dict:
    return {mono_mul(m, mono): v * c for m, v in a.items()}


def p_is_const(a: dict) -> bool:
    return not a or (len(a) == 1 and ONE_MONO in a)


def p_leading(a: dict) -> tuple:
    return max(a, key=grlex_key)


def p_atoms(a: dict) -> set:
    return {x for m in a for x, _ in m}


def p_partial(a: dict, atom: Atom) -> dict:
    out: dict = {}
    for m, c in a.items():
        for k, (x, e) in enumerate(m):
            if x == atom:
                nm = m[:k] + ((x, e - 1),) + m[k + 1:] if e > 1 else m[:k] + m[k + 1:]
                out[nm] = out.get(nm, 0) + c * e
                break
    return {m: c for m, c in out.items() if c}


def _mono_gcd_of_poly(a: dict) -> tuple:
    """Largest monomial dividing every term of ``a``."""
    it = iter(a)
    common = dict(next(it))
    for m in it:
        if not common:
            break
        em = dict(m)
        common = {x: min(e, em[x]) for x, e in common.items() if x in em}
    return tuple(sorted(common.items(), key=lambda t: t[0].key))


def _mono_gcd(a: tuple, b: tuple) -> tuple:
    eb = dict(b)
    return tuple((x, min(e, eb[x])) for x, e in a if x in eb)


def _sympy_cofactors(num: dict, den: dict):
    """Cancel the polynomial gcd of num and den using sympy's sparse rings."""
    from sympy.polys.domains import QQ
    from sympy.polys.rings import ring

    atoms = sorted(p_atoms(num) | p_atoms(den), key=lambda t: t.key)
    pos = {x: i for i, x in enumerate(atoms)}
    R, *_ = ring(",".join(f"_t{i}" for i in range(len(atoms))) + ",", QQ)

    def to_ring(p):
        d = {}
        for m, c in p.items():
            vec = [0] * len(atoms)
            for x, e in m:
                vec[pos[x]] = e
            d[tuple(vec)] = QQ(c.numerator, c.denominator) if isinstance(c, Fraction) else QQ(c)
        return R.from_dict(d)

    def from_ring(p):
        out = {}
        for vec, c in p.items():
            m = tuple((atoms[i], e) for i, e in enumerate(vec) if e)
            out[m] = Fraction(int(c.numerator), int(c.denominator))
        return out

    _, cn, cd = to_ring(num).cofactors(to_ring(den))
    return from_ring(cn), from_ring(cd)


def _reduce(num: dict, den: dict):
    if not num:
        return {}, {ONE_MONO: Fraction(1)}
    if not den:
        raise ZeroDivisionError("denominator is zero")
    if len(den) == 1:
        (md, cd), = den.items()
        if md:
            g = _mono_gcd(md, _mono_gcd_of_poly(num))
            if g:
                md = mono_div(md, g)
                num = {mono_div(m, g): c for m, c in num.items()}
        inv = 1 / Fraction(cd)
        return p_scale(num, inv), {md: Fraction(1)}
    num, den = _sympy_cofactors(num, den)
    lc = den[p_leading(den)]
    if lc != 1:
        inv = 1 / Fraction(lc)
        num, den = p_scale(num, inv), p_scale(den, inv)
    return num, den


_ONE_DEN = {ONE_MONO: Fraction(1)}


class CanonicalForm:
    """An exact rational function in reduced, normalized form.

    Instances are immutable and hashable.  Arithmetic operators accept ints
    and Fractions on either side.
    """

    __slots__ = ("num", "den", "_hash", "_sort_key")

    def __init__(self, num: dict, den: dict | None = None, *, _reduced: bool = False):
        if den is None:
            den = _ONE_DEN
        if not _reduced and not (den is _ONE_DEN or den == _ONE_DEN):
            num, den = _reduce(num, den)
        self.num = num
        self.den = den
        self._hash = None
        self._sort_key = None

    # -- constructors
    @classmethod
    def const(cls, c: Number) -> "CanonicalForm":
        c = Fraction(c)
        return cls({ONE_MONO: c} if c else {}, _ONE_DEN, _reduced=True)

    @classmethod
    def atom(cls, a: Atom) -> "CanonicalForm":
        return cls({((a, 1),): Fraction(1)}, _ONE_DEN, _reduced=True)

    @classmethod
    def coerce(cls, value) -> "CanonicalForm":
        if isinstance(value, CanonicalForm):
            return value
        if isinstance(value, (int, Fraction)):
            return cls.const(value)
        raise TypeError(f"cannot use {type(value).__name__} as a scalar")

    # -- predicates
    def is_zero(self) -> bool:
        return not self.num

    def is_constant(self) -> bool:
        return p_is_const(self.num) and self.den == _ONE_DEN

    def is_polynomial(self) -> bool:
        return self.den == _ONE_DEN

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.num.get(ONE_MONO, Fraction(0))

    def atoms(self) -> set:
        return p_atoms(self.num) | p_atoms(self.den)

    # -- arithmetic
    def __add__(self, other):
        if not isinstance(other, CanonicalForm):
            if isinstance(other, (int, Fraction)):
                other = CanonicalForm.const(other)
            else:
                return NotImplemented
        if not other.num:
            return self
        if not self.num:
            return other
        if self.den == other.den:
            num = p_add(self.num, other.num)
            if self.den == _ONE_DEN:
                return CanonicalForm(num, _ONE_DEN, _reduced=True)
            return CanonicalForm(num, self.den)
        return CanonicalForm(
            p_add(p_mul(self.num, other.den), p_mul(other.num, self.den)),
            p_mul(self.den, other.den))

    __radd__ = __add__

    def __neg__(self):
        return CanonicalForm({m: -c for m, c in self.num.items()}, self.den, _reduced=True)

    def __sub__(self, other):
        if not isinstance(other, CanonicalForm):
            if isinstance(other, (int, Fraction)):
                other = CanonicalForm.const(other)
            else:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return CanonicalForm.coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, CanonicalForm):
            if isinstance(other, (int, Fraction)):
                if not other:
                    return ZERO
                return CanonicalForm(p_scale(self.num, other), self.den, _reduced=True)
            return NotImplemented
        if not self.num or not other.num:
            return ZERO
        num = p_mul(self.num, other.num)
        if self.den == _ONE_DEN and other.den == _ONE_DEN:
            return CanonicalForm(num, _ONE_DEN, _reduced=True)
        return CanonicalForm(num, p_mul(self.den, other.den))

    __rmul__ = __mul__

    def reciprocal(self) -> "CanonicalForm":
        if not self.num:
            raise ZeroDivisionError("division by a form that is identically zero")
        return CanonicalForm(dict(self.den), dict(self.num))

    def __truediv__(self, other):
        other = CanonicalForm.coerce(other)
        if not other.num:
            raise ZeroDivisionError("division by a form that is identically zero")
        if other.is_constant():
            return self * (1 / other.constant_value())
        return CanonicalForm(p_mul(self.num, other.den), p_mul(self.den, other.num))

    def __rtruediv__(self, other):
        return CanonicalForm.coerce(other) / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.reciprocal() ** (-k)
        out = ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- equality / ordering
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CanonicalForm.const(other)
        if not isinstance(other, CanonicalForm):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((frozenset(self.num.items()), frozenset(self.den.items())))
        return self._hash

    @property
    def sort_key(self) -> tuple:
        if self._sort_key is None:
            def pk(p):
                return tuple((tuple((x.key, e) for x, e in m), c)
                             for m, c in sorted(p.items(), key=lambda t: grlex_key(t[0]),
                                                reverse=True))
            self._sort_key = (pk(self.num), pk(self.den))
        return self._sort_key

    # -- calculus
    def diff(self, coord: Coordinate) -> "CanonicalForm":
        """Partial derivative with respect to a coordinate atom."""
        dn = _poly_diff(self.num, coord)
        if self.den == _ONE_DEN:
            return dn
        dd = _poly_diff(self.den, coord)
        n = CanonicalForm(self.num, _ONE_DEN, _reduced=True)
        d = CanonicalForm(self.den, _ONE_DEN, _reduced=True)
        return (dn * d - n * dd) / (d * d)

    def subs_atoms(self, fn: Callable[[Atom], "CanonicalForm"]) -> "CanonicalForm":
        """Substitute every atom by ``fn(atom)``."""
        def poly(p):
            total = ZERO
            for m, c in p.items():
                term = CanonicalForm.const(c)
                for x, e in m:
                    term = term * fn(x) ** e
                total = total + term
            return total
        n = poly(self.num)
        return n if self.den == _ONE_DEN else n / poly(self.den)

    def evaluate(self, point: Mapping[str, Number],
                 opaque: Callable[[str, int, Fraction], Number]) -> Fraction:
        """Exact value with coordinates bound by name and opaque atoms by callback."""
        cache: dict = {}

        def atom_value(x):
            v = cache.get(x)
            if v is None:
                if isinstance(x, Coordinate):
                    if x.name not in point:
                        raise KeyError(f"coordinate {x.name} is not bound")
                    v = Fraction(point[x.name])
                else:
                    a = x.arg.evaluate(point, opaque)
                    v = Fraction(opaque(x.name, x.order, a))
                cache[x] = v
            return v

        def poly(p):
            total = Fraction(0)
            for m, c in p.items():
                t = Fraction(c)
                for x, e in m:
                    t *= atom_value(x) ** e
                total += t
            return total

        d = poly(self.den)
        if d == 0:
            raise ZeroDivisionError(f"denominator of {self} vanishes at {dict(point)}")
        return poly(self.num) / d

    # -- printing
    def __str__(self):
        n = format_poly(self.num)
        if self.den == _ONE_DEN:
            return n
        d = format_poly(self.den)
        if len(self.num) > 1:
            n = f"({n})"
        if len(self.den) > 1 or (len(self.den) == 1 and not _is_bare_monomial(self.den)):
            d = f"({d})"
        return f"{n}/{d}"

    def __repr__(self):
        return f"CanonicalForm({self})"


def _is_bare_monomial(p: dict) -> bool:
    (m, c), = p.items()
    return c == 1 and len(m) == 1 and m[0][1] == 1


def _poly_diff(p: dict, coord: Coordinate) -> CanonicalForm:
    total_poly: dict = {}
    extra = None
    for x in p_atoms(p):
        if isinstance(x, Coordinate):
            if x == coord:
                total_poly = p_add(total_poly, p_partial(p, x))
            continue
        dx = x.diff(coord)
        if dx.is_zero():
            continue
        part = CanonicalForm(p_partial(p, x), _ONE_DEN, _reduced=True) * dx
        extra = part if extra is None else extra + part
    out = CanonicalForm(total_poly, _ONE_DEN, _reduced=True)
    return out if extra is None else out + extra


def _format_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _format_mono(m: tuple) -> str:
    parts = []
    for x, e in m:
        s = str(x)
        parts.append(s if e == 1 else f"{s}^{e}")
    return "*".join(parts)


def format_poly(p: dict) -> str:
    if not p:
        return "0"
    out = []
    for i, m in enumerate(sorted(p, key=grlex_key, reverse=True)):
        c = Fraction(p[m])
        neg = c < 0
        a = -c if neg else c
        if not m:
            body = _format_coeff(a)
        elif a == 1:
            body = _format_mono(m)
        else:
            body = f"{_format_coeff(a)}*{_format_mono(m)}"
        if i == 0:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)


ZERO = CanonicalForm({}, _ONE_DEN, _reduced=True)
ONE = CanonicalForm.const(1)
