import random
from fractions import Fraction
from itertools import combinations

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from pnkit.sampling import random_constant_endo, random_form, random_multivector
from pnkit.tensor import (
    Chart, ChartMismatch, DegenerateError, Endo, Form, KindMismatch, MultiVector,
    determinant, evaluate, flat, flat_matrix, invert_flat, invert_sharp, iota, iota_pair,
    lambda_endo, lower_3, mat_inverse, mat_mul, pairing, raise_3, sharp, sharp_matrix, wedge,
)

from conftest import R2, R3, R4

T6 = Chart(tuple(f"t{i}" for i in range(1, 7)))
SEEDS = st.integers(0, 10 ** 9)


def dx(chart, *i):
    return Form.basis(chart, *i)


def dd(chart, *i):
    return MultiVector.basis(chart, *i)


def t6_omega():
    return wedge(dx(T6, 0), dx(T6, 1)) + wedge(dx(T6, 2), dx(T6, 3)) + wedge(dx(T6, 4), dx(T6, 5))


# -- construction ---------------------------------------------------------------------

def test_chart_validation():
    with pytest.raises(ValueError):
        Chart(("x", "x"))
    with pytest.raises(ValueError):
        Chart(())


def test_basis_component_and_permutation_sign():
    p = MultiVector(R2, 2, {("y", "x"): "3"})
    assert p["x", "y"] == R2.scalar(-3)
    assert p["y", "x"] == R2.scalar(3)
    assert dd(R2, 0, 1)["x", "y"] == R2.scalar(1)


def test_repeated_index_rejected():
    with pytest.raises(ValueError):
        Form(R2, 2, {("x", "x"): 1})


def test_t6_omega_by_wedges():
    w = t6_omega()
    assert w == Form(T6, 2, {("t1", "t2"): 1, ("t3", "t4"): 1, ("t5", "t6"): 1})


def test_one_forms_anticommute():
    a = Form.from_components(R3, ["x", "1", "y"])
    b = Form.from_components(R3, ["z", "x*y", "2"])
    assert wedge(a, b) == -wedge(b, a)
    assert wedge(a, a).is_zero()


def test_kind_and_chart_mismatch():
    with pytest.raises(KindMismatch):
        wedge(dx(R2, 0), dd(R2, 0))
    with pytest.raises(KindMismatch):
        iota(dx(R2, 0), dx(R2, 0, 1))
    with pytest.raises(ChartMismatch):
        dx(R2, 0) + dx(R3, 0)


# -- interior products --------------------------------------------------------------------

def test_iota_examples():
    assert iota(dx(R2, 0), dd(R2, 0, 1)) == dd(R2, 1)
    assert iota(dd(T6, 0), dx(T6, 0, 1)) == dx(T6, 1)
    assert iota_pair(dx(R2, 0), dx(R2, 1), dd(R2, 0, 1)).value == R2.scalar(1)
    assert iota_pair(dx(R3, 0), dx(R3, 1), dd(R3, 0, 1, 2)) == dd(R3, 2)


def test_evaluation_is_determinant_convention():
    assert evaluate(dx(R2, 0, 1), dd(R2, 0), dd(R2, 1)) == R2.scalar(1)
    assert evaluate(dx(R2, 0, 1), dd(R2, 1), dd(R2, 0)) == R2.scalar(-1)


@given(SEEDS)
def test_iota_twice_vanishes(seed):
    rng = random.Random(seed)
    X = random_multivector(R3, 1, rng)
    z = random_form(R3, rng.randint(2, 3), rng)
    assert iota(X, iota(X, z)).is_zero()


@given(SEEDS)
def test_iota_pair_order_and_antisymmetry(seed):
    rng = random.Random(seed)
    a, b = random_form(R3, 1, rng), random_form(R3, 1, rng)
    D = random_multivector(R3, rng.randint(2, 3), rng)
    assert iota_pair(a, b, D) == iota(b, iota(a, D))
    assert iota_pair(a, b, D) == -iota_pair(b, a, D)


@given(SEEDS)
def test_wedge_associative_and_graded_commutative(seed):
    rng = random.Random(seed)
    p, q, r = (rng.randint(0, 2) for _ in range(3))
    kind = rng.choice((random_form, random_multivector))
    a, b, c = kind(R3, p, rng), kind(R3, q, rng), kind(R3, r, rng)
    assert wedge(wedge(a, b), c) == wedge(a, wedge(b, c))
    sign = -1 if (p * q) % 2 else 1
    assert wedge(a, b) == wedge(b, a) * sign


@given(SEEDS)
def test_iota_is_antiderivation(seed):
    rng = random.Random(seed)
    p = rng.randint(1, 2)
    q = rng.randint(0, 3 - p)
    X = random_multivector(R3, 1, rng)
    z, w = random_form(R3, p, rng), random_form(R3, q, rng)
    rhs = wedge(iota(X, z), w)
    if q:
        rhs = rhs + wedge(z, iota(X, w)) * (-1 if p % 2 else 1)
    assert iota(X, wedge(z, w)) == rhs


@given(SEEDS)
def test_evaluation_of_one_form_wedges_is_a_determinant(seed):
    # oracle: sympy determinant of the matrix of pairings
    rng = random.Random(seed)
    forms = [random_form(R3, 1, rng, degree=1) for _ in range(3)]
    vecs = [random_multivector(R3, 1, rng, degree=1) for _ in range(3)]
    top = wedge(wedge(forms[0], forms[1]), forms[2])
    got = evaluate(top, *vecs)
    x, y, z = sympy.symbols("x y z")
    M = sympy.Matrix(3, 3, lambda i, j: sympy.sympify(str(pairing(forms[i], vecs[j])).replace("^", "**")))
    assert sympy.expand(M.det() - sympy.sympify(str(got).replace("^", "**"))) == 0


# -- sharp and flat ---------------------------------------------------------------------

def test_sharp_examples():
    pi = dd(R2, 0, 1)
    assert sharp(pi, dx(R2, 0)) == dd(R2, 1)
    assert sharp(pi, dx(R2, 1)) == -dd(R2, 0)
    assert sharp(MultiVector.zero(R2, 2), dx(R2, 0)).is_zero()
    lam = 3
    pl = wedge(dd(T6, 0), dd(T6, 1) + dd(T6, 2) * lam)
    assert sharp(pl, dx(T6, 1)) == -dd(T6, 0)


def test_flat_examples():
    w = dx(R2, 0, 1)
    assert flat(w, dd(R2, 0)) == dx(R2, 1)
    assert flat(w, dd(R2, 1)) == -dx(R2, 0)
    assert flat(t6_omega(), dd(T6, 2)) == dx(T6, 3)
    assert flat(Form.zero(R2, 2), dd(R2, 0)).is_zero()


def test_invert_flat_examples():
    assert invert_flat(dx(R2, 0, 1)) == dd(R2, 0, 1)
    assert invert_flat(t6_omega()) == dd(T6, 0, 1) + dd(T6, 2, 3) + dd(T6, 4, 5)
    got = invert_flat(Form(R2, 2, {("x", "y"): "x"}))
    assert got == MultiVector(R2, 2, {("x", "y"): "1/x"})
    with pytest.raises(DegenerateError):
        invert_flat(Form.zero(R2, 2))
    with pytest.raises(DegenerateError):
        invert_sharp(MultiVector(R3, 2, {("x", "y"): 1}))


@given(SEEDS)
def test_sharp_pairing_duality(seed):
    rng = random.Random(seed)
    pi = random_multivector(R3, 2, rng)
    a, b = random_form(R3, 1, rng), random_form(R3, 1, rng)
    assert pairing(sharp(pi, a), b) == evaluate(pi, a, b)
    assert pairing(sharp(pi, a), b) == -pairing(sharp(pi, b), a)
    w = random_form(R3, 2, rng)
    X, Y = random_multivector(R3, 1, rng), random_multivector(R3, 1, rng)
    assert pairing(flat(w, X), Y) == evaluate(w, X, Y)


@given(SEEDS)
def test_invert_flat_is_minus_inverse(seed):
    rng = random.Random(seed)
    w = random_form(R4, 2, rng, degree=1, density=0.8)
    try:
        pi = invert_flat(w)
    except DegenerateError:
        return
    X = random_multivector(R4, 1, rng, degree=1)
    assert sharp(pi, flat(w, X)) == -X
    a = random_form(R4, 1, rng, degree=1)
    assert flat(w, sharp(pi, a)) == -a
    assert invert_sharp(pi) == w


def test_mat_inverse_against_sympy():
    A = [[R3.scalar(s) for s in row] for row in (["x", "1", "0"], ["y", "2", "z"], ["1", "0", "x*y"])]
    inv, det = mat_inverse(A)
    M = sympy.Matrix(3, 3, lambda i, j: sympy.sympify(str(A[i][j]).replace("^", "**")))
    assert sympy.simplify(M.det() - sympy.sympify(str(det).replace("^", "**"))) == 0
    ident = mat_mul(A, inv)
    for i in range(3):
        for j in range(3):
            assert ident[i][j] == R3.scalar(1 if i == j else 0)


# -- endomorphisms -------------------------------------------------------------------------

def test_scalar_endo():
    N = Endo.scalar(R3, 5)
    X = MultiVector.from_components(R3, ["x", "1", "y"])
    a = Form.from_components(R3, ["z", "0", "1"])
    assert N.apply(X) == X * 5
    assert N.star(a) == a * 5


def test_endo_column_orientation():
    c = Chart(("x1", "x2", "x3", "x4"))
    N = Endo(c, [[2, 7, 0, 0], [3, 2, 0, 0], [0, 0, 1, 1], [0, 0, 1, 1]])
    assert N.apply(dd(c, 0)) == dd(c, 0) * 2 + dd(c, 1) * 3


@given(SEEDS)
def test_endo_star_is_dual(seed):
    rng = random.Random(seed)
    N = random_constant_endo(R3, rng)
    N = Endo(R3, [[N.matrix[i][j] * rng.choice([1, R3.scalar("x"), R3.scalar("y")])
                   for j in range(3)] for i in range(3)])
    a = random_form(R3, 1, rng)
    X = random_multivector(R3, 1, rng)
    assert pairing(N.star(a), X) == pairing(a, N.apply(X))


def test_endo_algebra():
    N = Endo(R2, [["x", "1"], ["0", "y"]])
    assert N ** 0 == Endo.identity(R2)
    assert N ** 2 == N @ N
    assert (N - N) == Endo.zero(R2)
    X = dd(R2, 0) + dd(R2, 1)
    assert (N @ N).apply(X) == N.apply(N.apply(X))


def test_lambda_endo_on_bivector():
    N = Endo.scalar(R3, 2)
    pi = dd(R3, 0, 1)
    assert lambda_endo(N, pi) == pi * 4


# -- three-vectors and three-forms ------------------------------------------------------------

def test_lower_zero():
    w = dx(R2, 0, 1)
    assert lower_3(dx(R3, 0, 1) + dx(R3, 1, 2) + dx(R3, 0, 2),
                   MultiVector.zero(R3, 3)).is_zero()
    assert lower_3(w, MultiVector.zero(R2, 3)).is_zero()


@given(SEEDS)
def test_lower_raise_round_trip(seed):
    rng = random.Random(seed)
    c = Chart(("x", "y", "z", "w"))
    w = dx(c, 0, 1) + dx(c, 2, 3) + Form(c, 2, {("x", "z"): "y"})
    pi = invert_flat(w)
    Phi = random_multivector(c, 3, rng)
    phi = lower_3(w, Phi)
    assert raise_3(pi, phi) == Phi
    psi = random_form(c, 3, rng)
    assert lower_3(w, raise_3(pi, psi)) == psi
