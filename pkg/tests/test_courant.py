import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pnkit.calculus import d, d_pi, lie_bracket
from pnkit.courant import CourantStructure, Section, TooFewSections, pairing, verify_axioms
from pnkit.expr import ZERO
from pnkit.report import SKIPPED
from pnkit.sampling import random_polynomial, random_sections
from pnkit.structures import scalar_n_structure
from pnkit.tensor import Endo, Form, MultiVector, iota, pairing as natural_pairing, sharp

from conftest import R2, R3

SEEDS = st.integers(0, 10 ** 9)
HALF = Fraction(1, 2)


def vec(chart, *comps):
    return Section.parse(chart, vector=comps)


def form(chart, *comps):
    return Section.parse(chart, form=comps)


def essential_double(a=1, coeff="x", chart=R2):
    pi = MultiVector(chart, 2, {(0, 1): coeff})
    s = scalar_n_structure(pi, a)
    return CourantStructure.double(s.pi, s.N, s.Phi)


# -- pairing and anchor ------------------------------------------------------------------

def test_pairing_examples():
    e = Section.parse(R2, vector=("1", "0"), form=("1", "0"))
    assert pairing(e, e) == R2.scalar(1)
    assert pairing(vec(R2, "1", "0"), form(R2, "0", "1")).is_zero()
    assert pairing(vec(R2, "y", "0"), form(R2, "x", "0")) == R2.scalar("x*y/2")


@given(SEEDS)
def test_pairing_symmetric_and_bilinear(seed):
    e1, e2, e3 = random_sections(R3, 3, seed)
    f = random_polynomial(R3, random.Random(seed))
    assert pairing(e1, e2) == pairing(e2, e1)
    assert pairing(e1 * f + e3, e2) == pairing(e1, e2) * f + pairing(e3, e2)


def test_anchor_examples():
    S = CourantStructure.standard(R2)
    assert S.anchor(Section.parse(R2, vector=("1", "0"), form=("0", "y"))) == MultiVector.basis(R2, 0)
    pi = MultiVector(R2, 2, {(0, 1): "x"})
    e = Section.parse(R2, vector=("1", "0"), form=("1", "0"))
    D = CourantStructure.double(pi, Endo.scalar(R2, 3), verify=False)
    assert D.anchor(e) == MultiVector.basis(R2, 0) * 3 + sharp(pi, Form.basis(R2, 0))
    D0 = CourantStructure.double(pi, Endo.zero(R2), verify=False)
    e = Section.parse(R2, vector=("x", "y"), form=("y", "1"))
    assert D0.anchor(e) == sharp(pi, e.xi)


# -- bracket ------------------------------------------------------------------------------

def test_standard_bracket_example():
    S = CourantStructure.standard(R2)
    got = S.bracket(vec(R2, "1", "0"), form(R2, "y", "0"))
    assert got == form(R2, "0", "-1/2")


def test_double_mixed_bracket_with_n_zero():
    pi = MultiVector(R2, 2, {(0, 1): "x*y"})
    D = CourantStructure.double(pi, Endo.zero(R2), verify=False)
    X = MultiVector.from_components(R2, ["y", "x^2"])
    xi = Form.from_components(R2, ["1", "x"])
    c = MultiVector.scalar(R2, natural_pairing(xi, X))
    want = Section.vector(-iota(xi, d_pi(pi, X)) - d_pi(pi, c) * HALF)
    assert D.bracket(Section.vector(X), Section.form(xi)) == want


def test_double_mixed_bracket_with_scalar_n():
    a = 2
    pi = MultiVector(R2, 2, {(0, 1): "x"})
    D = CourantStructure.double(pi, Endo.scalar(R2, a), verify=False)
    X = MultiVector.from_components(R2, ["y", "1"])
    xi = Form.from_components(R2, ["x*y", "0"])
    c = natural_pairing(xi, X)
    form_part = (iota(X, d(xi)) + d(Form.scalar(R2, c)) * HALF) * a
    vec_part = iota(xi, d_pi(pi, X)) + d_pi(pi, MultiVector.scalar(R2, c)) * HALF
    assert D.bracket(Section.vector(X), Section.form(xi)) == Section(-vec_part, form_part)


def test_standard_equals_trivial_double():
    S = CourantStructure.standard(R3)
    D = CourantStructure.double(MultiVector.zero(R3, 2), Endo.identity(R3), MultiVector.zero(R3, 3))
    for e1, e2 in zip(random_sections(R3, 4, 1), random_sections(R3, 4, 2)):
        assert S.bracket(e1, e2) == D.bracket(e1, e2)


@given(SEEDS)
def test_bracket_is_skew(seed):
    D = essential_double(a=2)
    e1, e2 = random_sections(R2, 2, seed)
    assert D.bracket(e1, e2) == -D.bracket(e2, e1)


# -- D operator --------------------------------------------------------------------------

def test_d_operator_examples():
    assert CourantStructure.standard(R2).d_operator("x") == form(R2, "1", "0")
    D = CourantStructure.double(MultiVector.basis(R2, 0, 1), Endo.scalar(R2, 3), verify=False)
    assert D.d_operator("x") == Section.parse(R2, vector=("0", "-1"), form=("3", "0"))
    assert D.d_operator(ZERO).is_zero()
    assert D.d_operator("7/2").is_zero()


@given(SEEDS)
def test_anchor_kills_d_operator(seed):
    D = essential_double(a=random.Random(seed).choice((1, 2)))
    f = random_polynomial(R2, random.Random(seed), degree=3)
    assert D.anchor(D.d_operator(f)).is_zero()


# -- axioms -------------------------------------------------------------------------------

def test_standard_axioms_on_fixed_sections():
    S = CourantStructure.standard(R2)
    secs = [vec(R2, "1", "0"), form(R2, "0", "1"), Section.parse(R2, vector=("0", "1"), form=("x", "0"))]
    assert verify_axioms(S, secs).passed


def test_essential_double_axioms():
    D = essential_double(a=1)
    assert not D.exploratory
    secs = [vec(R2, "1", "0"), form(R2, "0", "1"), Section.parse(R2, vector=("y", "0"), form=("x", "0"))]
    rep = verify_axioms(D, secs)
    assert rep.passed, rep.summary()


def test_perturbed_double_fails_jacobi():
    s = scalar_n_structure(MultiVector(R3, 2, {(0, 1): "x"}), 1)
    D = CourantStructure.double(s.pi, s.N, s.Phi + MultiVector.basis(R3, 0, 1, 2))
    assert D.exploratory
    rep = verify_axioms(D, random_sections(R3, 3, 0, degree=1))
    assert rep.get("exploratory").status == SKIPPED
    assert rep.get("(i) Jacobiator = 1/3 D sum <[[e1,e2]],e3>").residuals


def test_too_few_sections():
    with pytest.raises(TooFewSections):
        verify_axioms(CourantStructure.standard(R2), random_sections(R2, 2, 0))


@given(SEEDS)
def test_leibniz_rule(seed):
    rng = random.Random(seed)
    D = essential_double(a=rng.choice((1, 2)), coeff=rng.choice(("x", "1", "y", "x + y")))
    e1, e2 = random_sections(R2, 2, rng, degree=1)
    f = random_polynomial(R2, rng, degree=2)
    rf = natural_pairing(D.anchor(e1), d(Form.scalar(R2, f)))
    rhs = D.bracket(e1, e2) * f + e2 * rf - D.d_operator(f) * pairing(e1, e2)
    assert D.bracket(e1, e2 * f) == rhs


@given(SEEDS)
def test_pairing_invariance(seed):
    rng = random.Random(seed)
    D = essential_double(a=rng.choice((1, 2)), coeff=rng.choice(("x", "1", "y")))
    e, e1, e2 = random_sections(R2, 3, rng, degree=1)
    lhs = natural_pairing(D.anchor(e), d(Form.scalar(R2, pairing(e1, e2))))
    rhs = (pairing(D.bracket(e, e1) + D.d_operator(pairing(e, e1)), e2)
           + pairing(e1, D.bracket(e, e2) + D.d_operator(pairing(e, e2))))
    assert lhs == rhs


@given(SEEDS)
def test_anchor_is_a_morphism(seed):
    rng = random.Random(seed)
    D = essential_double(a=rng.choice((1, 2)), coeff=rng.choice(("x", "1", "y")))
    e1, e2 = random_sections(R2, 2, rng, degree=1)
    assert D.anchor(D.bracket(e1, e2)) == lie_bracket(D.anchor(e1), D.anchor(e2))
