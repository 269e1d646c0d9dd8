"""Sparse antisymmetric fields on a single coordinate chart.

Multivectors and forms store coefficients keyed by strictly increasing index
tuples; ``(0, 1)`` on a form means ``dx_0 ^ dx_1``.  Evaluation follows the
determinant convention, ``(dx ^ dy)(d_x, d_y) = 1``.  Interior products
contract the first slot, and ``iota_pair(a, b, D)`` is ``iota(b, iota(a, D))``.

An :class:`Endo` stores ``N`` with entry ``(i, j)`` the ``d_i`` coefficient of
``N(d_j)``; its dual acts on 1-forms through the transposed matrix.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from pnkit.expr import BUILTINS, ONE, ZERO, CanonicalForm, Coordinate, canonicalize, parse


class ChartMismatch(ValueError):
    pass


class KindMismatch(TypeError):
    pass


class DegenerateError(ValueError):
    pass


@dataclass(frozen=True)
class Chart:
    """Ordered coordinate names plus the opaque function names in scope."""

    coords: tuple
    opaque: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(self.coords))
        object.__setattr__(self, "opaque", tuple(self.opaque))
        if not self.coords:
            raise ValueError("a chart needs at least one coordinate")
        if len(set(self.coords)) != len(self.coords):
            raise ValueError(f"duplicate coordinate names in {self.coords}")
        clash = set(self.coords) & (set(self.opaque) | BUILTINS)
        if clash:
            raise ValueError(f"names used both as coordinates and functions: {sorted(clash)}")
        for name in self.coords + self.opaque:
            if not (name[:1].isalpha() and all(c.isalnum() or c == "_" for c in name)):
                raise ValueError(f"invalid identifier {name!r}")

    @property
    def n(self) -> int:
        return len(self.coords)

    def index(self, name) -> int:
        if isinstance(name, int):
            if not 0 <= name < self.n:
                raise IndexError(f"coordinate index {name} out of range")
            return name
        try:
            return self.coords.index(name)
        except ValueError:
            raise KeyError(f"unknown coordinate {name!r}") from None

    def atom(self, i) -> Coordinate:
        i = self.index(i)
        return Coordinate(self.coords[i], i)

    def coordinate(self, i) -> CanonicalForm:
        return CanonicalForm.atom(self.atom(i))

    def scalar(self, value) -> CanonicalForm:
        """Coerce ints, Fractions, expression strings or forms to a coefficient."""
        if isinstance(value, str):
            return canonicalize(parse(value, self.coords, self.opaque))
        return CanonicalForm.coerce(value)

    def diff(self, f: CanonicalForm, i) -> CanonicalForm:
        return f.diff(self.atom(i))


def _sort_sign(idx: Sequence[int]):
    """Sorted copy of ``idx`` and the sign of the sorting permutation (0 on repeats)."""
    idx = list(idx)
    if len(set(idx)) != len(idx):
        return None, 0
    sign = 1
    for i in range(len(idx)):
        for j in range(len(idx) - 1 - i):
            if idx[j] > idx[j + 1]:
                idx[j], idx[j + 1] = idx[j + 1], idx[j]
                sign = -sign
    return tuple(idx), sign


class Alternating:
    """Common storage for :class:`MultiVector` and :class:`Form`."""

    kind = ""
    __slots__ = ("chart", "grade", "coeffs")

    def __init__(self, chart: Chart, grade: int, components: Mapping = None, *, _raw: bool = False):
        if grade < 0 and (components or grade < -1):
            # grade -1 only occurs as the empty result of [f, g]
            raise ValueError("grade must be non-negative")
        self.chart = chart
        self.grade = grade
        if _raw:
            self.coeffs = components
            return
        coeffs: dict = {}
        for key, value in (components or {}).items():
            if grade == 0 and key in ((), None):
                key = ()
            key = tuple(chart.index(k) for k in key)
            if len(key) != grade:
                raise ValueError(f"index tuple {key} does not have length {grade}")
            srt, sign = _sort_sign(key)
            if not sign:
                raise ValueError(f"repeated index in {key}")
            c = chart.scalar(value)
            if sign < 0:
                c = -c
            coeffs[srt] = coeffs.get(srt, ZERO) + c
        self.coeffs = {k: v for k, v in coeffs.items() if not v.is_zero()}

    @classmethod
    def _new(cls, chart, grade, coeffs):
        return cls(chart, grade, {k: v for k, v in coeffs.items() if not v.is_zero()}, _raw=True)

    @classmethod
    def zero(cls, chart: Chart, grade: int):
        return cls(chart, grade, {}, _raw=True)

    @classmethod
    def scalar(cls, chart: Chart, f) -> "Alternating":
        return cls(chart, 0, {(): f})

    @classmethod
    def basis(cls, chart: Chart, *idx) -> "Alternating":
        return cls(chart, len(idx), {tuple(idx): 1})

    @classmethod
    def from_components(cls, chart: Chart, values: Sequence) -> "Alternating":
        """Grade-1 element from a full component list."""
        return cls(chart, 1, {(i,): v for i, v in enumerate(values)})

    # -- access
    def __getitem__(self, idx) -> CanonicalForm:
        if not isinstance(idx, tuple):
            idx = (idx,)
        idx = tuple(self.chart.index(k) for k in idx)
        srt, sign = _sort_sign(idx)
        if not sign:
            return ZERO
        c = self.coeffs.get(srt, ZERO)
        return c if sign > 0 else -c

    def components(self) -> list:
        """Full component list of a grade-1 element."""
        if self.grade != 1:
            raise ValueError("components() needs grade 1")
        return [self.coeffs.get((i,), ZERO) for i in range(self.chart.n)]

    @property
    def value(self) -> CanonicalForm:
        if self.grade != 0:
            raise ValueError("value needs grade 0")
        return self.coeffs.get((), ZERO)

    def is_zero(self) -> bool:
        return not self.coeffs

    def items(self):
        return sorted(self.coeffs.items())

    # -- linear structure
    def _check(self, other):
        if type(other) is not type(self):
            raise KindMismatch(f"cannot combine {self.kind} with {getattr(other, 'kind', other)!r}")
        if other.chart != self.chart:
            raise ChartMismatch("elements live on different charts")
        if other.grade != self.grade:
            raise ValueError(f"grade mismatch: {self.grade} vs {other.grade}")

    def __add__(self, other):
        if type(other) is type(self) and other.chart == self.chart and other.grade != self.grade:
            if not other.coeffs:
                return self
            if not self.coeffs:
                return other
        self._check(other)
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out[k] + v if k in out else v
        return self._new(self.chart, self.grade, out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return type(self)(self.chart, self.grade, {k: -v for k, v in self.coeffs.items()}, _raw=True)

    def __mul__(self, f):
        if isinstance(f, Alternating):
            return NotImplemented
        f = self.chart.scalar(f)
        if f.is_zero():
            return self.zero(self.chart, self.grade)
        return self._new(self.chart, self.grade, {k: v * f for k, v in self.coeffs.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Alternating):
            return NotImplemented
        return (type(self) is type(other) and self.chart == other.chart
                and (self.grade == other.grade or (not self.coeffs and not other.coeffs))
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.kind, self.grade, frozenset(self.coeffs.items())))

    def map(self, fn) -> "Alternating":
        return self._new(self.chart, self.grade, {k: fn(v) for k, v in self.coeffs.items()})

    def _basis_str(self, idx) -> str:
        raise NotImplementedError

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for k, v in self.items():
            if not k:
                parts.append(f"({v})")
            else:
                parts.append(f"({v})*{self._basis_str(k)}")
        return " + ".join(parts)

    def __repr__(self):
        return f"{type(self).__name__}[{self.grade}]({self})"


class MultiVector(Alternating):
    """A multivector field ``sum D^I d_{i1} ^ ... ^ d_{ik}``."""

    kind = "multivector"
    __slots__ = ()

    def _basis_str(self, idx):
        return "^".join(f"d_{self.chart.coords[i]}" for i in idx)


class Form(Alternating):
    """A differential form ``sum w_I dx_{i1} ^ ... ^ dx_{ik}``."""

    kind = "form"
    __slots__ = ()

    def _basis_str(self, idx):
        return "^".join(f"d{self.chart.coords[i]}" for i in idx)


def dual_kind(t: type) -> type:
    return Form if t is MultiVector else MultiVector


# -- products ----------------------------------------------------------------

def wedge(a: Alternating, b: Alternating) -> Alternating:
    """Graded-commutative exterior product with shuffle signs."""
    if type(a) is not type(b):
        raise KindMismatch(f"cannot wedge a {a.kind} with a {b.kind}")
    if a.chart != b.chart:
        raise ChartMismatch("wedge of elements on different charts")
    grade = a.grade + b.grade
    if grade > a.chart.n:
        return type(a).zero(a.chart, grade)
    out: dict = {}
    for ia, ca in a.coeffs.items():
        for ib, cb in b.coeffs.items():
            srt, sign = _sort_sign(ia + ib)
            if not sign:
                continue
            term = ca * cb
            if sign < 0:
                term = -term
            out[srt] = out[srt] + term if srt in out else term
    return type(a)._new(a.chart, grade, out)


def iota(arg: Alternating, target: Alternating) -> Alternating:
    """Contract a grade-1 element of the dual kind into the first slot of ``target``."""
    if arg.grade != 1:
        raise ValueError("interior product needs a grade-1 argument")
    if type(arg) is type(target):
        raise KindMismatch(f"cannot contract a {arg.kind} into a {target.kind}")
    if arg.chart != target.chart:
        raise ChartMismatch("interior product across charts")
    if target.grade == 0:
        raise ValueError("cannot contract into a grade-0 element")
    comps = arg.coeffs
    out: dict = {}
    for idx, c in target.coeffs.items():
        for pos, i in enumerate(idx):
            a = comps.get((i,))
            if a is None:
                continue
            rest = idx[:pos] + idx[pos + 1:]
            term = a * c
            if pos % 2:
                term = -term
            out[rest] = out[rest] + term if rest in out else term
    return type(target)._new(target.chart, target.grade - 1, out)


def iota_pair(a1: Alternating, a2: Alternating, target: Alternating) -> Alternating:
    """``iota_{a1 ^ a2} target := iota_{a2} iota_{a1} target``."""
    if target.grade < 2:
        raise ValueError("iota_pair needs a target of grade at least 2")
    return iota(a2, iota(a1, target))


def evaluate(target: Alternating, *args: Alternating) -> CanonicalForm:
    """``target(args[0], ..., args[k-1])`` for a grade-k target."""
    if len(args) != target.grade:
        raise ValueError(f"need {target.grade} arguments, got {len(args)}")
    out = target
    for a in args:
        out = iota(a, out)
    return out.value if out.grade == 0 else ZERO


def pairing(a: Alternating, b: Alternating) -> CanonicalForm:
    """Natural pairing of a 1-form with a vector (either order)."""
    if a.grade != 1 or b.grade != 1 or type(a) is type(b):
        raise KindMismatch("pairing needs a vector and a 1-form")
    if a.chart != b.chart:
        raise ChartMismatch("pairing across charts")
    out = ZERO
    for k, v in a.coeffs.items():
        w = b.coeffs.get(k)
        if w is not None:
            out = out + v * w
    return out


def sharp(pi: MultiVector, alpha: Form) -> MultiVector:
    """``<pi# alpha, beta> = pi(alpha, beta)``."""
    if not isinstance(pi, MultiVector) or pi.grade != 2:
        raise KindMismatch("sharp needs a bivector")
    return iota(alpha, pi)


def flat(omega: Form, X: MultiVector) -> Form:
    """``<omega_flat X, Y> = omega(X, Y)``."""
    if not isinstance(omega, Form) or omega.grade != 2:
        raise KindMismatch("flat needs a 2-form")
    return iota(X, omega)


# -- (1,1)-tensors ------------------------------------------------------------

class Endo:
    """A (1,1)-tensor field; ``matrix[i][j]`` is the ``d_i`` coefficient of ``N(d_j)``."""

    __slots__ = ("chart", "matrix")

    def __init__(self, chart: Chart, matrix: Sequence[Sequence]):
        n = chart.n
        if len(matrix) != n or any(len(row) != n for row in matrix):
            raise ValueError(f"endomorphism matrix must be {n}x{n}")
        self.chart = chart
        self.matrix = tuple(tuple(chart.scalar(v) for v in row) for row in matrix)

    @classmethod
    def identity(cls, chart: Chart) -> "Endo":
        return cls.scalar(chart, 1)

    @classmethod
    def scalar(cls, chart: Chart, a) -> "Endo":
        n = chart.n
        a = chart.scalar(a)
        return cls(chart, [[a if i == j else ZERO for j in range(n)] for i in range(n)])

    @classmethod
    def zero(cls, chart: Chart) -> "Endo":
        return cls.scalar(chart, 0)

    def _check(self, chart):
        if chart != self.chart:
            raise ChartMismatch("endomorphism applied across charts")

    def apply(self, X: MultiVector) -> MultiVector:
        """``N X`` for a vector field."""
        if not isinstance(X, MultiVector) or X.grade != 1:
            raise KindMismatch("apply needs a vector field")
        self._check(X.chart)
        x = X.components()
        n = self.chart.n
        return MultiVector.from_components(
            self.chart, [_dot((self.matrix[i][j] for j in range(n)), x) for i in range(n)])

    def star(self, alpha: Form) -> Form:
        """``N* alpha``, acting by the transposed matrix."""
        if not isinstance(alpha, Form) or alpha.grade != 1:
            raise KindMismatch("star needs a 1-form")
        self._check(alpha.chart)
        a = alpha.components()
        n = self.chart.n
        return Form.from_components(
            self.chart, [_dot((self.matrix[i][j] for i in range(n)), a) for j in range(n)])

    def __call__(self, X):
        return self.apply(X)

    def __matmul__(self, other: "Endo") -> "Endo":
        self._check(other.chart)
        return Endo(self.chart, mat_mul(self.matrix, other.matrix))

    def __add__(self, other: "Endo") -> "Endo":
        self._check(other.chart)
        return Endo(self.chart, [[a + b for a, b in zip(r, s)]
                                 for r, s in zip(self.matrix, other.matrix)])

    def __sub__(self, other: "Endo") -> "Endo":
        return self + other * -1

    def __mul__(self, f) -> "Endo":
        f = self.chart.scalar(f)
        return Endo(self.chart, [[a * f for a in r] for r in self.matrix])

    __rmul__ = __mul__

    def __pow__(self, p: int) -> "Endo":
        if p < 0:
            raise ValueError("negative powers are not supported")
        out = Endo.identity(self.chart)
        for _ in range(p):
            out = out @ self
        return out

    def __eq__(self, other):
        return isinstance(other, Endo) and self.chart == other.chart and self.matrix == other.matrix

    def __hash__(self):
        return hash(self.matrix)

    def is_constant(self) -> bool:
        return all(v.is_constant() for r in self.matrix for v in r)

    def transpose_matrix(self) -> list:
        n = self.chart.n
        return [[self.matrix[j][i] for j in range(n)] for i in range(n)]

    def __repr__(self):
        rows = ", ".join("[" + ", ".join(str(v) for v in r) + "]" for r in self.matrix)
        return f"Endo([{rows}])"


def endo_apply(N: Endo, X: MultiVector) -> MultiVector:
    return N.apply(X)


def endo_star_apply(N: Endo, alpha: Form) -> Form:
    return N.star(alpha)


# -- matrices of CanonicalForm ------------------------------------------------

def _dot(row: Iterable[CanonicalForm], vec: Sequence[CanonicalForm]) -> CanonicalForm:
    out = ZERO
    for a, b in zip(row, vec):
        if not a.is_zero() and not b.is_zero():
            out = out + a * b
    return out


def mat_mul(A, B) -> list:
    n, m, p = len(A), len(B), len(B[0])
    return [[_dot((A[i][k] for k in range(m)), [B[k][j] for k in range(m)]) for j in range(p)]
            for i in range(n)]


def mat_neg(A) -> list:
    return [[-v for v in r] for r in A]


def mat_transpose(A) -> list:
    return [list(r) for r in zip(*A)]


def mat_is_zero(A) -> bool:
    return all(v.is_zero() for r in A for v in r)


def mat_inverse(A):
    """Gauss-Jordan inverse over rational functions; returns ``(inverse, det)``."""
    n = len(A)
    M = [list(A[i]) + [ONE if i == j else ZERO for j in range(n)] for i in range(n)]
    det = ONE
    for col in range(n):
        piv = next((r for r in range(col, n) if not M[r][col].is_zero()), None)
        if piv is None:
            return None, ZERO
        if piv != col:
            M[col], M[piv] = M[piv], M[col]
            det = -det
        p = M[col][col]
        det = det * p
        inv = p.reciprocal()
        M[col] = [v * inv for v in M[col]]
        for r in range(n):
            if r != col and not M[r][col].is_zero():
                f = M[r][col]
                M[r] = [a - f * b for a, b in zip(M[r], M[col])]
    return [row[n:] for row in M], det


def sharp_matrix(pi: MultiVector) -> list:
    """Matrix P with ``(pi# alpha)^j = sum_i P[j][i] alpha_i``."""
    n = pi.chart.n
    return [[pi[i, j] if i != j else ZERO for i in range(n)] for j in range(n)]


def flat_matrix(omega: Form) -> list:
    """Matrix W with ``(omega_flat X)_j = sum_i W[j][i] X^i``."""
    n = omega.chart.n
    return [[omega[i, j] if i != j else ZERO for i in range(n)] for j in range(n)]


def bivector_from_sharp_matrix(chart: Chart, P) -> MultiVector:
    """Bivector whose sharp map has matrix ``P``; reads the strictly upper part."""
    n = chart.n
    return MultiVector(chart, 2, {(i, j): P[j][i] for i, j in combinations(range(n), 2)})


def sharp_matrix_is_antisymmetric(P) -> bool:
    n = len(P)
    return all((P[i][j] + P[j][i]).is_zero() for i in range(n) for j in range(i, n))


def determinant(A) -> CanonicalForm:
    return mat_inverse(A)[1]


def invert_flat(omega: Form) -> MultiVector:
    """The bivector pi with ``pi# = -(omega_flat)^-1``."""
    W = flat_matrix(omega)
    inv, det = mat_inverse(W)
    if inv is None or det.is_zero():
        raise DegenerateError("degenerate two-form: determinant is identically zero")
    return bivector_from_sharp_matrix(omega.chart, mat_neg(inv))


def invert_sharp(pi: MultiVector) -> Form:
    """The 2-form omega with ``omega_flat = -(pi#)^-1``."""
    P = sharp_matrix(pi)
    inv, det = mat_inverse(P)
    if inv is None or det.is_zero():
        raise DegenerateError("degenerate bivector: determinant is identically zero")
    Wm = mat_neg(inv)
    n = pi.chart.n
    return Form(pi.chart, 2, {(i, j): Wm[j][i] for i, j in combinations(range(n), 2)})


def _transform(target: Alternating, images: Sequence[Alternating], kind: type) -> Alternating:
    """Element of ``kind`` with components ``target(images[i1], ..., images[ik])``."""
    n = target.chart.n
    k = target.grade
    out = {}
    for idx in combinations(range(n), k):
        v = evaluate(target, *(images[i] for i in idx))
        if not v.is_zero():
            out[idx] = v
    return kind(target.chart, k, out, _raw=True)


def lower_3(omega: Form, Phi: MultiVector) -> Form:
    """``phi = -omega_flat Phi`` with ``(omega_flat Phi)(X,Y,Z) = Phi(wX, wY, wZ)``."""
    if Phi.chart != omega.chart:
        raise ChartMismatch("lower_3 across charts")
    images = [flat(omega, MultiVector.basis(omega.chart, i)) for i in range(omega.chart.n)]
    return -_transform(Phi, images, Form)


def raise_3(pi: MultiVector, phi: Form) -> MultiVector:
    """``Phi(a, b, c) = phi(pi# a, pi# b, pi# c)``."""
    if phi.chart != pi.chart:
        raise ChartMismatch("raise_3 across charts")
    images = [sharp(pi, Form.basis(pi.chart, i)) for i in range(pi.chart.n)]
    return _transform(phi, images, MultiVector)


def lambda_endo(N: Endo, D: Alternating) -> Alternating:
    """Apply ``N`` (multivectors, through ``N*`` on the arguments) or ``N*`` (forms) to every slot."""
    chart = D.chart
    if isinstance(D, MultiVector):
        images = [N.star(Form.basis(chart, i)) for i in range(chart.n)]
    else:
        images = [N.apply(MultiVector.basis(chart, i)) for i in range(chart.n)]
    return _transform(D, images, type(D))


def constant(chart: Chart, v) -> CanonicalForm:
    return chart.scalar(Fraction(v))
