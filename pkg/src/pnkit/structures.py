"""Structure checks: Poisson, Nijenhuis, compatible, pseudo-Poisson Nijenhuis,
pseudo-symplectic Nijenhuis and twisted Poisson, plus the built-in examples."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import combinations
from typing import Optional

import sympy

from pnkit.calculus import (
    bracket_N, cartan_lie, compatibility_tensor, cotangent_pi, d, d_pi, derivation_defect,
    dual_derivation_defect, lie, schouten, tangent_n, torsion,
)
from pnkit.expr import ZERO, CanonicalForm, Coordinate, Opaque
from pnkit.report import CheckReport, Residual, residuals_of
from pnkit.tensor import (
    Chart, DegenerateError, Endo, Form, MultiVector, bivector_from_sharp_matrix, determinant,
    flat_matrix, invert_flat, iota, iota_pair, mat_mul, mat_transpose, raise_3,
    sharp, sharp_matrix, sharp_matrix_is_antisymmetric, wedge,
)


class PreconditionError(ValueError):
    pass


class ParameterError(ValueError):
    pass


@dataclass
class StructureData:
    chart: Chart
    pi: Optional[MultiVector] = None
    N: Optional[Endo] = None
    Phi: Optional[MultiVector] = None
    omega: Optional[Form] = None
    phi: Optional[Form] = None
    name: str = ""
    params: dict = field(default_factory=dict)
    renames: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.pi is not None and self.omega is not None:
            raise ValueError("give either a bivector or a two-form, not both")
        for t in (self.pi, self.N, self.Phi, self.omega, self.phi):
            if t is not None and t.chart != self.chart:
                raise ValueError("all tensors must live on the structure's chart")
        for t, kind, grade, label in ((self.pi, MultiVector, 2, "bivector"),
                                      (self.Phi, MultiVector, 3, "trivector"),
                                      (self.omega, Form, 2, "two-form"),
                                      (self.phi, Form, 3, "three-form")):
            if t is not None and (type(t) is not kind or t.grade != grade):
                raise ValueError(f"{label} has the wrong kind or grade")

    def endo(self) -> Endo:
        return self.N if self.N is not None else Endo.zero(self.chart)

    def bivector(self) -> MultiVector:
        if self.pi is not None:
            return self.pi
        if self.omega is not None:
            return invert_flat(self.omega)
        return MultiVector.zero(self.chart, 2)

    def trivector(self) -> MultiVector:
        if self.Phi is not None:
            return self.Phi
        if self.phi is not None:
            return raise_3(self.bivector(), self.phi)
        return MultiVector.zero(self.chart, 3)

    def three_form(self) -> Form:
        return self.phi if self.phi is not None else Form.zero(self.chart, 3)


def _coord_fields(chart):
    return [MultiVector.basis(chart, i) for i in range(chart.n)]


def _coord_forms(chart):
    return [Form.basis(chart, i) for i in range(chart.n)]


def _d(chart, i) -> str:
    return f"d_{chart.coords[i]}"


def _dx(chart, i) -> str:
    return f"d{chart.coords[i]}"


# -- single conditions ------------------------------------------------------------

def is_poisson(pi: MultiVector) -> CheckReport:
    rep = CheckReport("poisson")
    rep.add("[pi,pi] = 0", residuals_of(schouten(None, pi, pi), "[pi,pi]"))
    return rep


def is_nijenhuis(N: Endo) -> CheckReport:
    rep = CheckReport("nijenhuis")
    chart = N.chart
    fields = _coord_fields(chart)
    res = []
    for i, j in combinations(range(chart.n), 2):
        res += residuals_of(torsion(N, fields[i], fields[j]),
                            f"T_N({_d(chart, i)},{_d(chart, j)})")
    rep.add("Nijenhuis torsion = 0", res)
    return rep


def matrix_identity_residuals(pi: MultiVector, N: Endo) -> list:
    """Entries of ``N pi# - pi# N*`` as matrices."""
    P = sharp_matrix(pi)
    lhs = mat_mul(N.matrix, P)
    rhs = mat_mul(P, mat_transpose(N.matrix))
    names = pi.chart.coords
    out = []
    for r in range(pi.chart.n):
        for c in range(pi.chart.n):
            v = lhs[r][c] - rhs[r][c]
            if not v.is_zero():
                out.append(Residual(f"(N pi# - pi# N*)[{names[r]},{names[c]}]", v))
    return out


def pi_N(pi: MultiVector, N: Endo) -> MultiVector:
    """``pi_N(a, b) = <N pi# a, b>``; raises if that is not antisymmetric."""
    M = mat_mul(N.matrix, sharp_matrix(pi))
    if not sharp_matrix_is_antisymmetric(M):
        raise PreconditionError("N pi# is not antisymmetric, so pi_N is not a bivector")
    return bivector_from_sharp_matrix(pi.chart, M)


def compatibility(pi: MultiVector, N: Endo) -> CheckReport:
    rep = CheckReport("compatibility")
    chart = pi.chart
    mat = matrix_identity_residuals(pi, N)
    rep.add("compatible: N pi# = pi# N*", mat)
    forms = _coord_forms(chart)
    res = []
    for i, j in combinations(range(chart.n), 2):
        res += residuals_of(compatibility_tensor(pi, N, forms[i], forms[j]),
                            f"C({_dx(chart, i)},{_dx(chart, j)})")
    rep.add("compatible: C = 0", res)
    if mat:
        rep.skip("compatible: pi_N antisymmetric", "matrix identity fails")
    else:
        M = mat_mul(N.matrix, sharp_matrix(pi))
        n = chart.n
        bad = [Residual(f"pi_N[{chart.coords[i]},{chart.coords[j]}] + pi_N[{chart.coords[j]},{chart.coords[i]}]",
                        M[j][i] + M[i][j])
               for i in range(n) for j in range(i, n) if not (M[j][i] + M[i][j]).is_zero()]
        rep.add("compatible: pi_N antisymmetric", bad)
    return rep


# -- pseudo-Poisson Nijenhuis -------------------------------------------------------

def condition_i(pi, Phi) -> list:
    return residuals_of(schouten(None, pi, Phi), "[pi,Phi]")


def condition_ii(pi, N, Phi) -> list:
    chart = pi.chart
    forms = _coord_forms(chart)
    half = CanonicalForm.const(Fraction(1, 2))
    pp = schouten(None, pi, pi)
    res = []
    for i, j in combinations(range(chart.n), 2):
        lhs = iota_pair(forms[i], forms[j], pp) * half
        rhs = N.apply(iota_pair(forms[i], forms[j], Phi))
        res += residuals_of(lhs - rhs, f"(ii)({_dx(chart, i)},{_dx(chart, j)})")
    return res


def condition_iii(pi, N, Phi) -> list:
    """``N i_{a^b} L_X Phi - i_{a^b} L_{NX} Phi - i_{(L_X N*)(a^b)} Phi`` on coordinates."""
    chart = pi.chart
    forms = _coord_forms(chart)
    res = []
    for k, X in enumerate(_coord_fields(chart)):
        LX = lie(X, Phi)
        LNX = lie(N.apply(X), Phi)
        LN = lie(X, N)
        if LX.is_zero() and LNX.is_zero() and all(v.is_zero() for r in LN.matrix for v in r):
            continue
        starred = [LN.star(a) for a in forms]
        for i, j in combinations(range(chart.n), 2):
            a, b = forms[i], forms[j]
            val = (N.apply(iota_pair(a, b, LX)) - iota_pair(a, b, LNX)
                   - iota_pair(starred[i], b, Phi) - iota_pair(a, starred[j], Phi))
            res += residuals_of(val, f"(iii)({_d(chart, k)};{_dx(chart, i)},{_dx(chart, j)})")
    return res


def qlb_conditions(pi, N, Phi) -> CheckReport:
    """The quasi-Lie bialgebroid side, computed without the pPN formulas."""
    rep = CheckReport("quasi-Lie bialgebroid")
    chart = pi.chart
    sN = tangent_n(N)
    funcs = [MultiVector.scalar(chart, chart.coordinate(i)) for i in range(chart.n)]
    fields = _coord_fields(chart)
    samples = [(f"{c}", f) for c, f in zip(chart.coords, funcs)] + \
              [(_d(chart, i), X) for i, X in enumerate(fields)]
    res = []
    for n1, D1 in samples:
        for n2, D2 in samples:
            res += residuals_of(derivation_defect(pi, N, D1, D2), f"A({n1},{n2})")
    rep.add("qlb: d_pi derives [.,.]_N", res)
    res = []
    for (label, f) in samples[:chart.n]:
        res += residuals_of(d_pi(pi, d_pi(pi, f)) - schouten(sN, Phi, f), f"(d_pi^2 - [Phi,.]_N)({label})")
    rep.add("qlb: d_pi^2 = [Phi,.]_N on functions", res)
    if res:
        rep.skip("qlb: d_pi^2 = [Phi,.]_N on fields", "not tensorial while the function part fails")
    else:
        res = []
        for label, X in samples[chart.n:]:
            res += residuals_of(d_pi(pi, d_pi(pi, X)) - schouten(sN, Phi, X),
                                f"(d_pi^2 - [Phi,.]_N)({label})")
        rep.add("qlb: d_pi^2 = [Phi,.]_N on fields", res)
    rep.add("qlb: d_pi Phi = 0", residuals_of(d_pi(pi, Phi), "d_pi Phi"))
    return rep


def ppn_check(pi: MultiVector, N: Endo, Phi: MultiVector, cross_check: bool = True) -> CheckReport:
    rep = CheckReport("pseudo-Poisson Nijenhuis")
    nij = is_nijenhuis(N)
    rep.extend(nij)
    rep.extend(compatibility(pi, N))
    rep.add("(i) [pi,Phi] = 0", condition_i(pi, Phi))
    ii = condition_ii(pi, N, Phi)
    rep.add("(ii) 1/2 i_{a^b}[pi,pi] = N i_{a^b} Phi", ii)
    if ii:
        rep.skip("(iii) L_X coupling", "not tensorial without (ii)")
    else:
        rep.add("(iii) L_X coupling", condition_iii(pi, N, Phi))
    if cross_check:
        ppn_ok = rep.passed
        q = qlb_conditions(pi, N, Phi)
        q_ok = nij.passed and q.passed
        rep.extend(q)
        rep.add_flag("agreement: pPN iff quasi-Lie bialgebroid", ppn_ok == q_ok,
                     f"pPN conditions {'pass' if ppn_ok else 'fail'} but the quasi-Lie "
                     f"bialgebroid conditions {'pass' if q_ok else 'fail'}")
    return rep


# -- compatibility equivalences -------------------------------------------------------

@dataclass
class ProbeSamples:
    functions: list
    fields: list
    forms: list

    @classmethod
    def default(cls, chart: Chart) -> "ProbeSamples":
        """Coordinate functions, coordinate fields and forms, one grade-2 element per side."""
        fs = [chart.coordinate(i) for i in range(chart.n)]
        fields = _coord_fields(chart)
        forms = _coord_forms(chart)
        if chart.n >= 2:
            last = chart.coordinate(chart.n - 1)
            fields = fields + [MultiVector(chart, 2, {(0, 1): last})]
            forms = forms + [Form(chart, 2, {(0, 1): last})]
        return cls(fs, fields, forms)


def equivalence_probe(pi: MultiVector, N: Endo, samples: Optional[ProbeSamples] = None) -> CheckReport:
    chart = pi.chart
    samples = samples or ProbeSamples.default(chart)
    rep = CheckReport("compatibility equivalence probe")
    comp = compatibility(pi, N)
    v1 = comp.passed
    rep.add_flag("(i) compatible", v1, "; ".join(c.name for c in comp.failed()))

    mv = [MultiVector.scalar(chart, f) for f in samples.functions] + list(samples.fields)
    fm = [Form.scalar(chart, f) for f in samples.functions] + list(samples.forms)
    res = []
    for a, x1 in enumerate(fm):
        for b, x2 in enumerate(fm):
            res += residuals_of(dual_derivation_defect(pi, N, x1, x2), f"B(s{a},s{b})")
    v2 = not res
    rep.add("(ii) d_N derives [.,.]_pi on samples", res)
    res = []
    for a, D1 in enumerate(mv):
        for b, D2 in enumerate(mv):
            res += residuals_of(derivation_defect(pi, N, D1, D2), f"A(s{a},s{b})")
    v3 = not res
    rep.add("(iii) d_pi derives [.,.]_N on samples", res)

    verdicts = [v1, v2, v3]
    if matrix_identity_residuals(pi, N):
        rep.skip("lemma: L^pi_{d_N f} X + [d_pi f, X]_N = 0", "matrix identity fails")
    else:
        sp, sN = cotangent_pi(pi), tangent_n(N)
        res = []
        for a, f in enumerate(samples.functions):
            dNf = Form.from_components(chart, [sN.rho_f(i, [chart.diff(f, k) for k in range(chart.n)])
                                               for i in range(chart.n)])
            dpf = d_pi(pi, MultiVector.scalar(chart, f))
            for b, X in enumerate(samples.fields):
                if X.grade != 1:
                    continue
                val = cartan_lie(sp, dNf, X) + schouten(sN, dpf, X)
                res += residuals_of(val, f"lemma(f{a},X{b})")
        rep.add("lemma: L^pi_{d_N f} X + [d_pi f, X]_N = 0", res)
        verdicts.append(not res)
    rep.add_flag("agreement", len(set(verdicts)) == 1,
                 f"verdicts disagree: {verdicts}")
    return rep


def agreement_holds(rep: CheckReport) -> bool:
    return rep.get("agreement").passed


# -- hierarchy and products ----------------------------------------------------------------

def hierarchy(pi: MultiVector, N: Endo, k: int) -> list:
    """``pi_0 = pi`` and ``pi_{j+1}# = N pi_j#`` up to ``pi_k``."""
    if not compatibility(pi, N).passed:
        raise PreconditionError("hierarchy needs a compatible pair")
    if not is_nijenhuis(N).passed:
        raise PreconditionError("hierarchy needs a Nijenhuis tensor")
    out = [pi]
    P = sharp_matrix(pi)
    for _ in range(k):
        P = mat_mul(N.matrix, P)
        if not sharp_matrix_is_antisymmetric(P):
            raise PreconditionError("hierarchy member is not antisymmetric")
        out.append(bivector_from_sharp_matrix(pi.chart, P))
    return out


def hierarchy_identity_check(pi: MultiVector, N: Endo, k: int, l: int, Q: MultiVector) -> CheckReport:
    """``[pi_k, Q]_{N^(l+1)} = [pi_(k+1), Q]_{N^l}``."""
    rep = CheckReport("hierarchy identity")
    pis = hierarchy(pi, N, k + 1)
    lhs = schouten(tangent_n(N ** (l + 1)), pis[k], Q)
    rhs = schouten(tangent_n(N ** l), pis[k + 1], Q)
    rep.add(f"[pi_{k},Q]_N^{l + 1} = [pi_{k + 1},Q]_N^{l}",
            residuals_of(lhs - rhs, f"k={k},l={l}"))
    return rep


def _embed(elem, chart: Chart, shift: int, names: dict):
    """Move a field or Endo onto the product chart."""
    cache: dict = {}

    def atom_map(a):
        hit = cache.get(a)
        if hit is None:
            if isinstance(a, Coordinate):
                hit = CanonicalForm.atom(Coordinate(names.get(a.name, a.name), a.index + shift))
            else:
                hit = CanonicalForm.atom(Opaque(a.name, a.order, a.arg.subs_atoms(atom_map)))
            cache[a] = hit
        return hit

    def sub(c: CanonicalForm):
        return c if not shift and not names else c.subs_atoms(atom_map)

    if elem is None:
        return None
    if isinstance(elem, Endo):
        return elem
    return type(elem)(chart, elem.grade,
                      {tuple(i + shift for i in k): sub(v) for k, v in elem.coeffs.items()},
                      _raw=True)


def _embed_endo(N, n1, n2, chart, shift, names):
    n = n1 + n2
    M = [[ZERO] * n for _ in range(n)]
    if N is not None:
        for i in range(N.chart.n):
            for j in range(N.chart.n):
                v = N.matrix[i][j]
                if not v.is_zero():
                    e = _embed(MultiVector.scalar(N.chart, v), chart, shift, names)
                    M[i + shift][j + shift] = e.value
    return M


def product(s1: StructureData, s2: StructureData) -> StructureData:
    """Product structure: concatenated chart, summed tensors, block-diagonal N.

    Coordinates of ``s2`` that collide with ``s1`` get a ``_2`` suffix (more
    if needed); the renaming is recorded in ``renames``.  Opaque function
    names are shared between the factors.
    """
    c1, c2 = s1.chart, s2.chart
    taken = set(c1.coords) | set(c1.opaque) | set(c2.opaque)
    names = {}
    new2 = []
    for c in c2.coords:
        new = c
        k = 2
        while new in taken:
            new = f"{c}_{k}"
            k += 1
        taken.add(new)
        if new != c:
            names[c] = new
        new2.append(new)
    opaque = tuple(dict.fromkeys(c1.opaque + c2.opaque))
    chart = Chart(c1.coords + tuple(new2), opaque)
    n1, n2 = c1.n, c2.n

    def emb(e, which):
        if e is None:
            return None
        if which == 1:
            return _embed(e, chart, 0, {})
        return _embed(e, chart, n1, names)

    def add(a, b, kind, grade):
        if a is None and b is None:
            return None
        z = kind.zero(chart, grade)
        return (a if a is not None else z) + (b if b is not None else z)

    if (s1.pi is None) != (s2.pi is None) and (s1.omega is not None or s2.omega is not None):
        raise ValueError("cannot multiply a bivector structure with a two-form structure")
    M1 = _embed_endo(s1.N, n1, n2, chart, 0, {})
    M2 = _embed_endo(s2.N, n2, n1, chart, n1, names)
    n = n1 + n2
    N = None
    if s1.N is not None or s2.N is not None:
        N = Endo(chart, [[M1[i][j] + M2[i][j] for j in range(n)] for i in range(n)])
    return StructureData(
        chart,
        pi=add(emb(s1.pi, 1), emb(s2.pi, 2), MultiVector, 2),
        N=N,
        Phi=add(emb(s1.Phi, 1), emb(s2.Phi, 2), MultiVector, 3),
        omega=add(emb(s1.omega, 1), emb(s2.omega, 2), Form, 2),
        phi=add(emb(s1.phi, 1), emb(s2.phi, 2), Form, 3),
        name=f"{s1.name or 'first'} x {s2.name or 'second'}",
        renames=names,
    )


# -- pseudo-symplectic Nijenhuis --------------------------------------------------------

def nondegenerate(omega_or_pi) -> CheckReport:
    rep = CheckReport("nondegeneracy")
    M = flat_matrix(omega_or_pi) if isinstance(omega_or_pi, Form) else sharp_matrix(omega_or_pi)
    det = determinant(M)
    rep.add_flag("nondegenerate", not det.is_zero(), "determinant is identically zero")
    return rep


def psn_check(omega: Form, N: Endo, phi: Form, cross_check: bool = True) -> CheckReport:
    rep = CheckReport("pseudo-symplectic Nijenhuis")
    chart = omega.chart
    det = determinant(flat_matrix(omega))
    if det.is_zero():
        raise DegenerateError("degenerate two-form: determinant is identically zero")
    rep.add_flag("nondegenerate", True)
    pi = invert_flat(omega)
    rep.extend(is_nijenhuis(N))
    rep.extend(compatibility(pi, N))
    rep.add("d phi = 0", residuals_of(d(phi), "d phi"))
    domega = d(omega)
    fields = _coord_fields(chart)
    res = []
    for i, j in combinations(range(chart.n), 2):
        lhs = iota_pair(fields[i], fields[j], domega)
        rhs = N.star(iota_pair(fields[i], fields[j], phi))
        res += residuals_of(lhs + rhs, f"(ii)'({_d(chart, i)},{_d(chart, j)})")
    # the sign that makes this equivalent to (ii) for Phi = pi# phi under pi# = -(omega_flat)^-1
    rep.add("(ii)' i_{X^Y} d omega = -N* i_{X^Y} phi", res)
    if cross_check:
        own = rep.passed
        ppn = ppn_check(pi, N, raise_3(pi, phi))
        rep.add_flag("agreement: psn iff ppn(pi, N, pi# phi)", own == ppn.passed,
                     "failing ppn conditions: " + ", ".join(c.name for c in ppn.failed()))
    return rep


def twisted_poisson_check(pi: MultiVector, N: Endo, phi: Form) -> CheckReport:
    """``1/2 [pi_N, pi_N] = pi_N# phi`` and ``d phi = 0``."""
    rep = CheckReport("twisted Poisson")
    try:
        pN = pi_N(pi, N)
    except PreconditionError as e:
        rep.add_flag("pi_N antisymmetric", False, str(e))
        rep.skip("1/2 [pi_N,pi_N] = pi_N# phi", "pi_N is not a bivector")
    else:
        rep.add_flag("pi_N antisymmetric", True)
        half = CanonicalForm.const(Fraction(1, 2))
        val = schouten(None, pN, pN) * half - raise_3(pN, phi)
        rep.add("1/2 [pi_N,pi_N] = pi_N# phi", residuals_of(val, "residual"))
    rep.add("d phi = 0", residuals_of(d(phi), "d phi"))
    return rep


def nondeg_reduction_probe(pi: MultiVector, N: Endo, Phi: MultiVector) -> CheckReport:
    """For nondegenerate pi, (i) and (ii) with a compatible Nijenhuis N force (iii)."""
    if determinant(sharp_matrix(pi)).is_zero():
        raise DegenerateError("degenerate bivector: determinant is identically zero")
    rep = CheckReport("nondegenerate reduction")
    nij, comp = is_nijenhuis(N), compatibility(pi, N)
    rep.extend(nij)
    rep.extend(comp)
    i_ok = not rep.add("(i) [pi,Phi] = 0", condition_i(pi, Phi)).residuals
    ii_ok = not rep.add("(ii) 1/2 i_{a^b}[pi,pi] = N i_{a^b} Phi", condition_ii(pi, N, Phi)).residuals
    iii = rep.add("(iii) L_X coupling", condition_iii(pi, N, Phi))
    premises = nij.passed and comp.passed and i_ok and ii_ok
    rep.add_flag("theorem: (i) and (ii) imply (iii)", not premises or iii.passed,
                 "premises hold but (iii) fails: implementation bug")
    return rep


# -- kernels and examples ------------------------------------------------------------------

def kernel_star_basis(N: Endo) -> list:
    """Basis of the kernel of ``N*`` for a constant N, as constant 1-forms."""
    if not N.is_constant():
        raise NotImplementedError("kernel_star_basis needs a constant matrix")
    n = N.chart.n
    M = sympy.Matrix(n, n, lambda i, j: sympy.Rational(str(N.matrix[j][i].constant_value())))
    out = []
    for v in M.nullspace():
        out.append(Form.from_components(N.chart, [Fraction(int(x.p), int(x.q)) for x in v]))
    return out


def _nonzero(params, key):
    v = Fraction(params[key])
    if v == 0:
        raise ParameterError(f"parameter {key} must be non-zero")
    return v


def _ex_pn_zero_phi(params):
    a = Fraction(params.get("a", 1))
    chart = Chart(("x", "y", "z"))
    pi = MultiVector(chart, 2, {("x", "y"): "z", ("y", "z"): "x", ("z", "x"): "y"})
    return StructureData(chart, pi=pi, N=Endo.scalar(chart, a), Phi=MultiVector.zero(chart, 3),
                         params={"a": a})


def _ex_poisson_n_zero(params):
    c = Fraction(params.get("c", 1))
    chart = Chart(("x", "y", "z"))
    pi = MultiVector(chart, 2, {("x", "y"): 1})
    return StructureData(chart, pi=pi, N=Endo.zero(chart),
                         Phi=MultiVector(chart, 3, {("x", "y", "z"): c}), params={"c": c})


def _ex_scalar_n(params):
    a = _nonzero({"a": params.get("a", 2)}, "a")
    chart = Chart(("x", "y"))
    pi = MultiVector(chart, 2, {("x", "y"): params.get("pi", "x")})
    Phi = schouten(None, pi, pi) * CanonicalForm.const(1 / (2 * a))
    return StructureData(chart, pi=pi, N=Endo.scalar(chart, a), Phi=Phi, params={"a": a})


def scalar_n_structure(pi: MultiVector, a) -> StructureData:
    """``(pi, a id, [pi,pi]/2a)`` for any bivector."""
    a = _nonzero({"a": a}, "a")
    Phi = schouten(None, pi, pi) * CanonicalForm.const(1 / (2 * a))
    return StructureData(pi.chart, pi=pi, N=Endo.scalar(pi.chart, a), Phi=Phi, params={"a": a})


def _ex_torus6(params):
    lam = Fraction(params.get("lam", 1))
    idx = [int(params.get(k, d)) for k, d in (("a", 1), ("b", 2), ("c", 3))]
    if len(set(idx)) != 3 or not all(1 <= i <= 6 for i in idx):
        raise ParameterError("a, b, c must be three distinct indices in 1..6")
    raw = params.get("phi", "1,0,0,0")
    coeffs = [Fraction(s) for s in (raw.split(",") if isinstance(raw, str) else raw)]
    if len(coeffs) != 4:
        raise ParameterError("phi needs four coefficients")
    chart = Chart(tuple(f"t{i}" for i in range(1, 7)))
    omega = Form(chart, 2, {("t1", "t2"): 1, ("t3", "t4"): 1, ("t5", "t6"): 1})
    a, b, c = (i - 1 for i in idx)
    pi_l = wedge(MultiVector.basis(chart, a),
                 MultiVector.basis(chart, b) + MultiVector.basis(chart, c) * lam)
    N = Endo(chart, mat_mul(sharp_matrix(pi_l), flat_matrix(omega)))
    ker = kernel_star_basis(N)
    phi = Form.zero(chart, 3)
    for w, (i, j, k) in zip(coeffs, combinations(range(len(ker)), 3)):
        if w:
            phi = phi + wedge(wedge(ker[i], ker[j]), ker[k]) * w
    return StructureData(chart, omega=omega, N=N, phi=phi,
                         params={"lam": lam, "a": idx[0], "b": idx[1], "c": idx[2],
                                 "phi": ",".join(str(w) for w in coeffs)})


def _ex_r4(params):
    p = {"N11": 2, "N33": 1, "N12": 1, "N34": 1}
    p.update(params)
    N11, N33, N12, N34 = (_nonzero(p, k) for k in ("N11", "N33", "N12", "N34"))
    if N11 == N33:
        raise ParameterError("N11 and N33 must differ")
    delta = N11 - N33
    a1, a2, a3, a4 = N12, delta, N34, delta
    chart = Chart(("x1", "x2", "x3", "x4"), ("f", "g"))
    N = Endo(chart, [[N11, delta ** 2 / N12, 0, 0],
                     [N12, N11, 0, 0],
                     [0, 0, N33, delta ** 2 / N34],
                     [0, 0, N34, N33]])
    u = f"({a3})*x3 + ({a4})*x4"
    v = f"({a1})*x1 + ({a2})*x2"
    omega = Form(chart, 2, {("x1", "x2"): f"f({u})", ("x3", "x4"): f"g({v})"})
    fp = chart.scalar(f"f'({u})") * CanonicalForm.const(1 / N11)
    gp = chart.scalar(f"g'({v})") * CanonicalForm.const(1 / N33)
    dx = [Form.basis(chart, i) for i in range(4)]
    phi = (wedge(wedge(dx[0], dx[1]), dx[2] * a3 + dx[3] * a4) * fp
           + wedge(wedge(dx[0] * a1 + dx[1] * a2, dx[2]), dx[3]) * gp)
    return StructureData(chart, omega=omega, N=N, phi=phi,
                         params={"N11": N11, "N33": N33, "N12": N12, "N34": N34})


EXAMPLES = {
    "pn_zero_phi": _ex_pn_zero_phi,
    "poisson_n_zero": _ex_poisson_n_zero,
    "scalar_n": _ex_scalar_n,
    "torus6": _ex_torus6,
    "r4": _ex_r4,
}


def builtin_example(name: str, **params) -> StructureData:
    try:
        build = EXAMPLES[name]
    except KeyError:
        raise ParameterError(f"unknown example {name!r}; choose from {sorted(EXAMPLES)}") from None
    s = build(params)
    return replace(s, name=name)


def check_structure(s: StructureData) -> CheckReport:
    """The natural verdict for a structure: psn for two-forms, ppn for bivectors."""
    if s.omega is not None:
        return psn_check(s.omega, s.endo(), s.three_form())
    return ppn_check(s.bivector(), s.endo(), s.trivector())


def twisted_for(s: StructureData) -> CheckReport:
    return twisted_poisson_check(s.bivector(), s.endo(), s.three_form())
