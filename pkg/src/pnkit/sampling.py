"""Seeded random polynomials, fields and sections for randomized checks."""
from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations, combinations_with_replacement

from pnkit.expr import ZERO, CanonicalForm
from pnkit.tensor import Alternating, Chart, Endo, Form, MultiVector


def rng_for(seed) -> random.Random:
    return seed if isinstance(seed, random.Random) else random.Random(seed)


def random_rational(rng: random.Random, span: int = 3) -> Fraction:
    num = rng.randint(-span, span)
    den = rng.choice((1, 1, 1, 2, 3))
    return Fraction(num, den)


def monomials(chart: Chart, degree: int) -> list:
    xs = [chart.coordinate(i) for i in range(chart.n)]
    out = [chart.scalar(1)]
    for k in range(1, degree + 1):
        for combo in combinations_with_replacement(xs, k):
            m = combo[0]
            for x in combo[1:]:
                m = m * x
            out.append(m)
    return out


def random_polynomial(chart: Chart, rng, degree: int = 2, terms: int = 3,
                      span: int = 3) -> CanonicalForm:
    """A sum of up to ``terms`` monomials of degree <= ``degree``."""
    rng = rng_for(rng)
    mons = monomials(chart, degree)
    out = ZERO
    for _ in range(terms):
        out = out + rng.choice(mons) * random_rational(rng, span)
    return out


def random_alternating(kind: type, chart: Chart, grade: int, rng, degree: int = 2,
                       density: float = 0.6, terms: int = 2) -> Alternating:
    rng = rng_for(rng)
    comps = {}
    for idx in combinations(range(chart.n), grade):
        if grade == 0 or rng.random() < density:
            comps[idx] = random_polynomial(chart, rng, degree, terms)
    return kind(chart, grade, comps)


def random_multivector(chart: Chart, grade: int, rng, **kw) -> MultiVector:
    return random_alternating(MultiVector, chart, grade, rng, **kw)


def random_form(chart: Chart, grade: int, rng, **kw) -> Form:
    return random_alternating(Form, chart, grade, rng, **kw)


def random_constant_endo(chart: Chart, rng, span: int = 2) -> Endo:
    rng = rng_for(rng)
    return Endo(chart, [[Fraction(rng.randint(-span, span)) for _ in range(chart.n)]
                        for _ in range(chart.n)])


def random_sections(chart: Chart, count: int, seed, degree: int = 2) -> list:
    """``count`` sections with polynomial coefficients of degree <= ``degree``."""
    from pnkit.courant import Section
    rng = rng_for(seed)
    return [Section(random_multivector(chart, 1, rng, degree=degree),
                    random_form(chart, 1, rng, degree=degree)) for _ in range(count)]
