"""Courant algebroids on TM + T*M: the standard one and doubles of pPN triples.

A section is a pair ``X + xi`` of a vector field and a 1-form.  The double of
``((TM)_N, d_pi, Phi)`` has anchor ``N X + pi# xi`` and bracket

    [[X, Y]]   = [X, Y]_N
    [[xi, eta]] = [xi, eta]_pi + Phi(xi, eta, .)    (the second term is a vector)
    [[X, xi]]  = (i_X d_N xi + 1/2 d_N <xi, X>) - (i_xi d_pi X + 1/2 d_pi <xi, X>)

extended by bilinearity and skew-symmetry.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, combinations_with_replacement, product
from typing import Optional, Sequence

from pnkit.calculus import (
    bracket_N, bracket_pi, d, d_N, d_N_f, d_pi, d_pi_f, lie, lie_bracket,
)
from pnkit.expr import ZERO, CanonicalForm
from pnkit.report import CheckReport, residuals_of
from pnkit.tensor import (
    Chart, ChartMismatch, Endo, Form, KindMismatch, MultiVector, iota, iota_pair,
    pairing as natural_pairing, sharp,
)

HALF = Fraction(1, 2)


class TooFewSections(ValueError):
    pass


@dataclass(frozen=True)
class Section:
    """``X + xi`` with ``X`` a vector field and ``xi`` a 1-form on one chart."""

    X: MultiVector
    xi: Form

    def __post_init__(self):
        if not isinstance(self.X, MultiVector) or self.X.grade != 1:
            raise KindMismatch("vector part must be a grade-1 multivector")
        if not isinstance(self.xi, Form) or self.xi.grade != 1:
            raise KindMismatch("form part must be a 1-form")
        if self.X.chart != self.xi.chart:
            raise ChartMismatch("section parts on different charts")

    @classmethod
    def zero(cls, chart: Chart) -> "Section":
        return cls(MultiVector.zero(chart, 1), Form.zero(chart, 1))

    @classmethod
    def vector(cls, X: MultiVector) -> "Section":
        return cls(X, Form.zero(X.chart, 1))

    @classmethod
    def form(cls, xi: Form) -> "Section":
        return cls(MultiVector.zero(xi.chart, 1), xi)

    @classmethod
    def parse(cls, chart: Chart, vector: Sequence = (), form: Sequence = ()) -> "Section":
        """Build from component lists (empty means zero)."""
        X = MultiVector.from_components(chart, vector) if vector else MultiVector.zero(chart, 1)
        xi = Form.from_components(chart, form) if form else Form.zero(chart, 1)
        return cls(X, xi)

    @property
    def chart(self) -> Chart:
        return self.X.chart

    def __add__(self, other: "Section") -> "Section":
        return Section(self.X + other.X, self.xi + other.xi)

    def __sub__(self, other: "Section") -> "Section":
        return Section(self.X - other.X, self.xi - other.xi)

    def __neg__(self) -> "Section":
        return Section(-self.X, -self.xi)

    def __mul__(self, f) -> "Section":
        return Section(self.X * f, self.xi * f)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return self.X.is_zero() and self.xi.is_zero()

    def __str__(self):
        parts = [str(p) for p in (self.X, self.xi) if not p.is_zero()]
        return " + ".join(parts) if parts else "0"


def pairing(e1: Section, e2: Section) -> CanonicalForm:
    """``<X + xi, Y + eta> = 1/2 (xi(Y) + eta(X))``."""
    if e1.chart != e2.chart:
        raise ChartMismatch("pairing across charts")
    return (natural_pairing(e1.xi, e2.X) + natural_pairing(e2.xi, e1.X)) * HALF


class CourantStructure:
    """Anchor, bracket and D operator of a Courant algebroid on TM + T*M.

    ``exploratory`` marks a double whose triple did not pass ``ppn_check``; the
    axioms are then not expected to hold and reports say so.
    """

    def __init__(self, chart: Chart, mode: str, pi: Optional[MultiVector] = None,
                 N: Optional[Endo] = None, Phi: Optional[MultiVector] = None,
                 exploratory: bool = False):
        if mode not in ("standard", "double"):
            raise ValueError(f"unknown mode {mode!r}")
        self.chart = chart
        self.mode = mode
        self.pi = pi
        self.N = N
        self.Phi = Phi
        self.exploratory = exploratory

    @classmethod
    def standard(cls, chart: Chart) -> "CourantStructure":
        return cls(chart, "standard")

    @classmethod
    def double(cls, pi: MultiVector, N: Endo, Phi: Optional[MultiVector] = None,
               verify: bool = True) -> "CourantStructure":
        chart = pi.chart
        if N.chart != chart or (Phi is not None and Phi.chart != chart):
            raise ChartMismatch("double data on different charts")
        if Phi is None:
            Phi = MultiVector.zero(chart, 3)
        if Phi.grade != 3 or pi.grade != 2:
            raise KindMismatch("double needs a bivector and a trivector")
        exploratory = False
        if verify:
            from pnkit.structures import ppn_check
            exploratory = not ppn_check(pi, N, Phi, cross_check=False).passed
        return cls(chart, "double", pi, N, Phi, exploratory)

    def _check(self, *sections):
        for e in sections:
            if e.chart != self.chart:
                raise ChartMismatch("section on a different chart")

    def anchor(self, e: Section) -> MultiVector:
        self._check(e)
        if self.mode == "standard":
            return e.X
        return self.N.apply(e.X) + sharp(self.pi, e.xi)

    def d_operator(self, f) -> Section:
        """``D f`` defined by ``<D f, e> = 1/2 anchor(e) f``."""
        f = self.chart.scalar(f)
        if self.mode == "standard":
            return Section.form(d(Form.scalar(self.chart, f)))
        return Section(d_pi_f(self.pi, f), d_N_f(self.N, f))

    def _mixed(self, X: MultiVector, xi: Form) -> Section:
        """``[[X, xi]]`` for a vector field and a 1-form."""
        c = natural_pairing(xi, X)
        if self.mode == "standard":
            form = iota(X, d(xi)) + d(Form.scalar(self.chart, c)) * HALF
            return Section.form(form)
        form = iota(X, d_N(self.N, xi)) + d_N_f(self.N, c) * HALF
        vec = iota(xi, d_pi(self.pi, X)) + d_pi_f(self.pi, c) * HALF
        return Section(-vec, form)

    def bracket(self, e1: Section, e2: Section) -> Section:
        self._check(e1, e2)
        if self.mode == "standard":
            # [X,Y] + L_X eta - L_Y xi + 1/2 d(xi(Y) - eta(X))
            c = natural_pairing(e1.xi, e2.X) - natural_pairing(e2.xi, e1.X)
            form = lie(e1.X, e2.xi) - lie(e2.X, e1.xi) + d(Form.scalar(self.chart, c)) * HALF
            return Section(lie_bracket(e1.X, e2.X), form)
        # Phi is a 3-vector, so Phi(xi, eta, .) lands in the vector part
        vec = bracket_N(self.N, e1.X, e2.X) + iota_pair(e1.xi, e2.xi, self.Phi)
        form = bracket_pi(self.pi, e1.xi, e2.xi)
        out = Section(vec, form)
        return out + self._mixed(e1.X, e2.xi) - self._mixed(e2.X, e1.xi)

    def describe(self) -> str:
        if self.mode == "standard":
            return "standard Courant algebroid"
        tag = " (exploratory)" if self.exploratory else ""
        return "double of ((TM)_N, d_pi, Phi)" + tag


def _section_residuals(e: Section, slot: str) -> list:
    return residuals_of(e.X, slot + ".vec") + residuals_of(e.xi, slot + ".form")


def default_functions(chart: Chart) -> list:
    """Coordinates and their pairwise products."""
    xs = [chart.coordinate(i) for i in range(chart.n)]
    return xs + [a * b for a, b in combinations_with_replacement(xs, 2)]


def verify_axioms(S: CourantStructure, sections: Sequence[Section],
                  functions: Optional[Sequence] = None) -> CheckReport:
    """Evaluate both sides of the five Courant axioms on all tuples.

    Sections are labelled ``e0, e1, ...`` and functions ``f0, f1, ...`` in
    residual slots.
    """
    sections = list(sections)
    if len(sections) < 3:
        raise TooFewSections(f"need at least 3 sections, got {len(sections)}")
    S._check(*sections)
    chart = S.chart
    fs = [chart.scalar(f) for f in (functions if functions is not None else default_functions(chart))]
    report = CheckReport(S.describe())
    if S.exploratory:
        report.skip("exploratory", "the triple fails ppn_check, so the axioms are not guaranteed")
    br = {}

    def bracket(i, j):
        if (i, j) not in br:
            br[(i, j)] = S.bracket(sections[i], sections[j])
        return br[(i, j)]

    # (i) Jacobi up to D
    res = []
    for i, j, k in combinations(range(len(sections)), 3):
        lhs = Section.zero(chart)
        rhs = ZERO
        for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
            ab = bracket(a, b)
            lhs = lhs + S.bracket(ab, sections[c])
            rhs = rhs + pairing(ab, sections[c])
        jac = lhs - S.d_operator(rhs * Fraction(1, 3))
        res += _section_residuals(jac, f"Jac(e{i},e{j},e{k})")
    report.add("(i) Jacobiator = 1/3 D sum <[[e1,e2]],e3>", res)

    # (ii) anchor is a morphism
    res = []
    for i, j in combinations(range(len(sections)), 2):
        r = S.anchor(bracket(i, j)) - lie_bracket(S.anchor(sections[i]), S.anchor(sections[j]))
        res += residuals_of(r, f"rho(e{i},e{j})")
    report.add("(ii) rho[[e1,e2]] = [rho e1, rho e2]", res)

    # (iii) Leibniz
    res = []
    for (i, e1), (j, e2) in product(enumerate(sections), repeat=2):
        rho1 = S.anchor(e1)
        p = pairing(e1, e2)
        for m, f in enumerate(fs):
            lhs = S.bracket(e1, e2 * f)
            rf = natural_pairing(rho1, d(Form.scalar(chart, f)))
            rhs = bracket(i, j) * f + e2 * rf - S.d_operator(f) * p
            res += _section_residuals(lhs - rhs, f"Leib(e{i},e{j},f{m})")
    report.add("(iii) [[e1,f e2]] = f[[e1,e2]] + (rho(e1)f)e2 - <e1,e2>Df", res)

    # (iv) rho o D = 0
    res = []
    for m, f in enumerate(fs):
        res += residuals_of(S.anchor(S.d_operator(f)), f"rhoD(f{m})")
    report.add("(iv) rho D = 0", res)

    # (v) invariance of the pairing
    res = []
    for e_i, e in enumerate(sections):
        rho = S.anchor(e)
        for i, j in combinations_with_replacement(range(len(sections)), 2):
            e1, e2 = sections[i], sections[j]
            lhs = natural_pairing(rho, d(Form.scalar(chart, pairing(e1, e2))))
            t1 = bracket(e_i, i) + S.d_operator(pairing(e, e1))
            t2 = bracket(e_i, j) + S.d_operator(pairing(e, e2))
            r = lhs - pairing(t1, e2) - pairing(e1, t2)
            res += residuals_of(r, f"inv(e{e_i};e{i},e{j})")
    report.add("(v) rho(e)<e1,e2> = <[[e,e1]] + D<e,e1>,e2> + <e1,[[e,e2]] + D<e,e2>>", res)
    return report
