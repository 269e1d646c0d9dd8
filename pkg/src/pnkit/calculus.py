"""Differentials, Lie derivatives and Schouten brackets on a chart.

Everything is driven by an :class:`AnchoredBundleSpec`: a bundle side
(tangent or cotangent), an anchor to the tangent bundle and a bracket on the
coordinate frame.  From that data the generalized Schouten bracket on the
exterior algebra of the bundle and the Koszul differential on the exterior
algebra of its dual are built.

Graded symmetry is ``[A, B] = -(-1)^((a-1)(b-1)) [B, A]`` and the bracket is a
derivation from the left::

    [A, B ^ C] = [A, B] ^ C + (-1)^((a+1)b) B ^ [A, C]

so that ``[X, f] = a(X)f`` and ``[D, f] = (-1)^(k+1) iota_{df} D``.
"""
from __future__ import annotations

import os
from itertools import combinations

from pnkit.expr import ZERO, CanonicalForm
from pnkit.tensor import (
    Alternating, ChartMismatch, Endo, Form, KindMismatch, MultiVector,
    dual_kind, iota, pairing, sharp, wedge,
)


def _sign(k: int) -> int:
    return -1 if k % 2 else 1


def gradient(chart, f: CanonicalForm) -> list:
    return [chart.diff(f, i) for i in range(chart.n)]


def _as_scalar(chart, f) -> CanonicalForm:
    if isinstance(f, Alternating):
        return f.value
    return chart.scalar(f)


# -- anchored bundles ----------------------------------------------------------

class AnchoredBundleSpec:
    """An anchored bundle over the chart with a bracket on the coordinate frame.

    ``anchor[k][i]`` is the ``d_k`` component of the anchor of the i-th frame
    element; ``frame_bracket(i, j)`` is a grade-1 element of the section kind.
    """

    def __init__(self, chart, side: str, anchor, frame_brackets, label: str = ""):
        if side not in ("tangent", "cotangent"):
            raise ValueError(f"unknown bundle side {side!r}")
        self.chart = chart
        self.side = side
        self.kind = MultiVector if side == "tangent" else Form
        self.anchor = anchor
        self._frame = frame_brackets
        self.label = label or side
        self._basis_cache: dict = {}

    def __repr__(self):
        return f"AnchoredBundleSpec({self.label})"

    # frame data
    def frame(self, i) -> Alternating:
        return self.kind.basis(self.chart, i)

    def frame_bracket(self, i: int, j: int) -> Alternating:
        if i == j:
            return self.kind.zero(self.chart, 1)
        if i > j:
            return -self.frame_bracket(j, i)
        return self._frame(i, j)

    def rho_f(self, i: int, grad) -> CanonicalForm:
        """Anchor of the i-th frame element applied to a function with gradient ``grad``."""
        out = ZERO
        for k in range(self.chart.n):
            a = self.anchor[k][i]
            if not a.is_zero() and not grad[k].is_zero():
                out = out + a * grad[k]
        return out

    def d_rho(self, f: CanonicalForm) -> list:
        """Components ``a(e_i) f`` for every frame element."""
        g = gradient(self.chart, f)
        return [self.rho_f(i, g) for i in range(self.chart.n)]

    def anchor_of(self, s: Alternating) -> MultiVector:
        """Anchor applied to a section."""
        comps = s.components()
        n = self.chart.n
        return MultiVector.from_components(self.chart, [
            sum((self.anchor[k][i] * comps[i] for i in range(n) if not comps[i].is_zero()), ZERO)
            for k in range(n)])

    def check(self, *elems):
        for e in elems:
            if type(e) is not self.kind:
                raise KindMismatch(f"{self.label} brackets act on {self.kind.kind}s, not {e.kind}s")
            if e.chart != self.chart:
                raise ChartMismatch("bracket argument on a different chart")

    # bracket of basis multi-indices, cached
    def basis_bracket(self, I: tuple, J: tuple) -> Alternating:
        key = (I, J)
        hit = self._basis_cache.get(key)
        if hit is not None:
            return hit
        p, q = len(I), len(J)
        grade = p + q - 1
        if p == 0 or q == 0:
            out = self.kind.zero(self.chart, max(grade, 0))
        elif p == 1 and q == 1:
            out = self.frame_bracket(I[0], J[0])
        elif q >= 2:
            head = self.kind.basis(self.chart, J[0])
            tail = self.kind.basis(self.chart, *J[1:])
            out = (wedge(self.basis_bracket(I, J[:1]), tail)
                   + wedge(head, self.basis_bracket(I, J[1:])) * _sign(p - 1))
        else:
            out = -self.basis_bracket(J, I)
        self._basis_cache[key] = out
        return out


def tangent_bundle(chart) -> AnchoredBundleSpec:
    n = chart.n
    ident = [[CanonicalForm.const(1 if i == k else 0) for i in range(n)] for k in range(n)]
    return AnchoredBundleSpec(chart, "tangent", ident,
                              lambda i, j: MultiVector.zero(chart, 1), "tangent")


def tangent_n(N: Endo) -> AnchoredBundleSpec:
    """``(TM, N, [.,.]_N)`` with ``[d_i, d_j]_N = sum_k (d_i N^k_j - d_j N^k_i) d_k``."""
    chart = N.chart
    M = N.matrix
    n = chart.n

    def fb(i, j):
        return MultiVector.from_components(
            chart, [chart.diff(M[k][j], i) - chart.diff(M[k][i], j) for k in range(n)])

    return AnchoredBundleSpec(chart, "tangent", M, fb, "tangent, N")


def cotangent_pi(pi: MultiVector) -> AnchoredBundleSpec:
    """``(T*M, pi#, [.,.]_pi)`` with ``[dx_i, dx_j]_pi = d pi^{ij}``."""
    chart = pi.chart
    n = chart.n
    anchor = [[pi[i, k] if i != k else ZERO for i in range(n)] for k in range(n)]

    def fb(i, j):
        return d(Form.scalar(chart, pi[i, j]))

    return AnchoredBundleSpec(chart, "cotangent", anchor, fb, "cotangent, pi")


def _spec_for(obj, chart=None) -> AnchoredBundleSpec:
    if isinstance(obj, AnchoredBundleSpec):
        return obj
    if isinstance(obj, Endo):
        return tangent_n(obj)
    if isinstance(obj, MultiVector):
        return cotangent_pi(obj)
    if obj is None and chart is not None:
        return tangent_bundle(chart)
    raise TypeError(f"cannot build a bundle from {obj!r}")


# -- Schouten bracket ----------------------------------------------------------

def _iota_drho(spec: AnchoredBundleSpec, g: CanonicalForm, I: tuple) -> dict:
    """``iota_{d_rho g} e_I`` as a coefficient dict (first-slot contraction)."""
    out = {}
    if not I:
        return out
    dg = spec.d_rho(g)
    for pos, i in enumerate(I):
        c = dg[i]
        if c.is_zero():
            continue
        rest = I[:pos] + I[pos + 1:]
        out[rest] = -c if pos % 2 else c
    return out


def schouten(spec, A: Alternating, B: Alternating) -> Alternating:
    """Generalized Schouten bracket of two homogeneous elements.

    ``spec`` is an :class:`AnchoredBundleSpec`, an Endo (for ``[.,.]_N``), a
    bivector (for ``[.,.]_pi`` on forms) or None for the classical bracket.
    """
    spec = _spec_for(spec, A.chart)
    spec.check(A, B)
    kind, chart = spec.kind, spec.chart
    p, q = A.grade, B.grade
    grade = p + q - 1
    if grade < 0:
        return kind.zero(chart, -1)
    out = kind.zero(chart, grade)
    acc: dict = {}

    def add(elem_coeffs, scale):
        for k, v in elem_coeffs.items():
            t = v * scale
            acc[k] = acc[k] + t if k in acc else t

    for I, f in A.coeffs.items():
        for J, g in B.coeffs.items():
            # fg [E_I, E_J]
            if p and q:
                bb = spec.basis_bracket(I, J)
                if bb.coeffs:
                    add(bb.coeffs, f * g)
            # (-1)^p f [g, E_I] ^ E_J,  [g, E_I] = -iota_{d g} E_I
            if p:
                it = _iota_drho(spec, g, I)
                if it:
                    w = wedge(kind(chart, p - 1, it, _raw=True), kind.basis(chart, *J))
                    add(w.coeffs, f * (-_sign(p)))
            # g (-1)^(p(q-1)) [f, E_J] ^ E_I
            if q:
                it = _iota_drho(spec, f, J)
                if it:
                    w = wedge(kind(chart, q - 1, it, _raw=True), kind.basis(chart, *I))
                    add(w.coeffs, g * (-_sign(p * (q - 1))))
    if acc:
        out = kind._new(chart, grade, acc)
    return out


def section_bracket(spec, X: Alternating, Y: Alternating) -> Alternating:
    """Bracket of two sections by the Leibniz rule on the frame."""
    spec = _spec_for(spec, X.chart)
    spec.check(X, Y)
    n = spec.chart.n
    x, y = X.components(), Y.components()
    out = [ZERO] * n
    for i in range(n):
        if x[i].is_zero():
            continue
        for j in range(n):
            if y[j].is_zero():
                continue
            fb = spec.frame_bracket(i, j)
            for (k,), c in fb.coeffs.items():
                out[k] = out[k] + x[i] * y[j] * c
    for i in range(n):
        if not x[i].is_zero():
            g = gradient(spec.chart, x[i])
            for j in range(n):
                if not y[j].is_zero():
                    # - Y^j (rho(e_j) X^i) e_i
                    out[i] = out[i] - y[j] * spec.rho_f(j, g)
        if not y[i].is_zero():
            g = gradient(spec.chart, y[i])
            for j in range(n):
                if not x[j].is_zero():
                    out[i] = out[i] + x[j] * spec.rho_f(j, g)
    return spec.kind.from_components(spec.chart, out)


def schouten_direct(spec, A: Alternating, B: Alternating) -> Alternating:
    """Independent Schouten evaluation by expanding decomposables.

    Each term ``f E_I`` is written as ``(f e_i1) ^ e_i2 ^ ...`` and

        [X1^...^Xp, Y1^...^Yq] = sum (-1)^(i+j) [Xi, Yj] ^ X1..^Xi..Xp ^ Y1..^Yj..Yq

    with ``[f, Q] = -iota_{df} Q`` and ``[P, g] = (-1)^(p+1) iota_{dg} P``.
    """
    spec = _spec_for(spec, A.chart)
    spec.check(A, B)
    kind, chart = spec.kind, spec.chart
    p, q = A.grade, B.grade
    grade = p + q - 1
    if grade < 0:
        return kind.zero(chart, -1)
    total = kind.zero(chart, grade)

    def factors(I, f):
        fs = [kind.basis(chart, i) for i in I]
        fs[0] = fs[0] * f
        return fs

    def wedge_all(fs, grade_if_empty=0):
        out = kind.scalar(chart, 1)
        for x in fs:
            out = wedge(out, x)
        return out

    def contract(fs, g):
        # iota_{d_rho g}(F1 ^ ... ^ Fk) via the antiderivation rule on factors
        dg = spec.d_rho(g)
        out = kind.zero(chart, len(fs) - 1)
        for pos, F in enumerate(fs):
            val = ZERO
            for (i,), c in F.coeffs.items():
                val = val + c * dg[i]
            if val.is_zero():
                continue
            out = out + wedge_all(fs[:pos] + fs[pos + 1:]) * (val * _sign(pos))
        return out

    for I, f in A.coeffs.items():
        for J, g in B.coeffs.items():
            if p == 0:
                total = total - contract(factors(J, g), f)
            elif q == 0:
                total = total + contract(factors(I, f), g) * _sign(p + 1)
            else:
                xs, ys = factors(I, f), factors(J, g)
                for i in range(p):
                    for j in range(q):
                        br = section_bracket(spec, xs[i], ys[j])
                        rest = wedge_all(xs[:i] + xs[i + 1:] + ys[:j] + ys[j + 1:])
                        total = total + wedge(br, rest) * _sign(i + j)
    return total


def schouten_classical(A: MultiVector, B: MultiVector) -> MultiVector:
    return schouten(None, A, B)


# -- differentials ---------------------------------------------------------------

def d(zeta: Form) -> Form:
    """De Rham differential, ``d(f dx_I) = sum_k d_k f dx_k ^ dx_I``."""
    if not isinstance(zeta, Form):
        raise KindMismatch("d acts on forms")
    chart = zeta.chart
    acc: dict = {}
    for I, f in zeta.coeffs.items():
        for k in range(chart.n):
            if k in I:
                continue
            df = chart.diff(f, k)
            if df.is_zero():
                continue
            pos = sum(1 for i in I if i < k)
            key = tuple(sorted(I + (k,)))
            t = -df if pos % 2 else df
            acc[key] = acc[key] + t if key in acc else t
    return Form._new(chart, zeta.grade + 1, acc)


def koszul_differential(spec: AnchoredBundleSpec, D: Alternating) -> Alternating:
    """Algebroid differential on the dual exterior algebra of ``spec``'s bundle.

    (dD)(e_0..e_k) = sum_i (-1)^i a(e_i) D(..^i..) + sum_{i<j} (-1)^(i+j) D([e_i,e_j], ..^i..^j..)
    """
    chart = spec.chart
    out_kind = dual_kind(spec.kind)
    if type(D) is not out_kind:
        raise KindMismatch(f"differential of {spec.label} acts on {out_kind.kind}s")
    if D.chart != chart:
        raise ChartMismatch("differential across charts")
    k = D.grade
    n = chart.n
    if k + 1 > n:
        return out_kind.zero(chart, k + 1)
    grads: dict = {}

    def rho_coeff(i, I):
        c = D.coeffs.get(I)
        if c is None:
            return ZERO
        g = grads.get(I)
        if g is None:
            g = grads[I] = gradient(chart, c)
        return spec.rho_f(i, g)

    acc: dict = {}
    for idx in combinations(range(n), k + 1):
        val = ZERO
        for a in range(k + 1):
            rest = idx[:a] + idx[a + 1:]
            t = rho_coeff(idx[a], rest)
            if not t.is_zero():
                val = val + t * _sign(a)
        if k >= 1:
            for a in range(k + 1):
                for b in range(a + 1, k + 1):
                    br = spec.frame_bracket(idx[a], idx[b])
                    if not br.coeffs:
                        continue
                    rest = idx[:a] + idx[a + 1:b] + idx[b + 1:]
                    s = _sign(a + b)
                    for (m,), c in br.coeffs.items():
                        coeff = D[(m,) + rest]
                        if not coeff.is_zero():
                            val = val + c * coeff * s
        if not val.is_zero():
            acc[idx] = val
    return out_kind(chart, k + 1, acc, _raw=True)


def d_N(N: Endo, zeta: Form) -> Form:
    """Differential of ``(TM, N, [.,.]_N)`` on forms."""
    return koszul_differential(tangent_n(N), zeta)


def d_pi(pi: MultiVector, D: MultiVector) -> MultiVector:
    """Differential of ``(T*M, pi#, [.,.]_pi)`` on multivectors; equals ``[pi, D]``."""
    out = koszul_differential(cotangent_pi(pi), D)
    if os.environ.get("PNKIT_VERIFY"):
        other = schouten(None, pi, D)
        if other != out:
            raise AssertionError(f"d_pi D != [pi, D]: {out} vs {other}")
    return out


def d_pi_f(pi: MultiVector, f) -> MultiVector:
    return d_pi(pi, MultiVector.scalar(pi.chart, f))


def d_N_f(N: Endo, f) -> Form:
    return d_N(N, Form.scalar(N.chart, f))


# -- Lie derivatives and deformed brackets -----------------------------------

def lie_bracket(X: MultiVector, Y: MultiVector) -> MultiVector:
    """Usual bracket of vector fields."""
    return section_bracket(None, X, Y)


def lie(X: MultiVector, T):
    """Lie derivative along a vector field of a form, multivector or Endo.

    For an Endo the result is ``L_X N``; its ``star`` is ``L_X N*``.
    """
    if not isinstance(X, MultiVector) or X.grade != 1:
        raise KindMismatch("lie needs a vector field")
    if isinstance(T, Endo):
        n = X.chart.n
        cols = []
        for j in range(n):
            e = MultiVector.basis(X.chart, j)
            col = lie_bracket(X, T.apply(e)) - T.apply(lie_bracket(X, e))
            cols.append(col.components())
        return Endo(X.chart, [[cols[j][i] for j in range(n)] for i in range(n)])
    if isinstance(T, MultiVector):
        return schouten(None, X, T)
    if isinstance(T, Form):
        if T.grade == 0:
            return Form.scalar(T.chart, pairing(X, d(T)))
        return iota(X, d(T)) + d(iota(X, T))
    raise TypeError(f"cannot take a Lie derivative of {T!r}")


def koszul_bracket(anchor_fn, alpha: Form, beta: Form) -> Form:
    """``L_{a alpha} beta - L_{a beta} alpha - d<a alpha, beta>`` for an anchor map ``a``."""
    if alpha.chart != beta.chart:
        raise ChartMismatch("bracket across charts")
    aa, ab = anchor_fn(alpha), anchor_fn(beta)
    return lie(aa, beta) - lie(ab, alpha) - d(Form.scalar(alpha.chart, pairing(aa, beta)))


def bracket_pi(pi: MultiVector, alpha: Form, beta: Form) -> Form:
    """``[alpha, beta]_pi``."""
    return koszul_bracket(lambda a: sharp(pi, a), alpha, beta)


def bracket_N(N: Endo, X: MultiVector, Y: MultiVector) -> MultiVector:
    """``[X, Y]_N = [NX, Y] + [X, NY] - N[X, Y]``."""
    return lie_bracket(N.apply(X), Y) + lie_bracket(X, N.apply(Y)) - N.apply(lie_bracket(X, Y))


def bracket_pi_Nstar(pi: MultiVector, N: Endo, alpha: Form, beta: Form) -> Form:
    """``[N* alpha, beta]_pi + [alpha, N* beta]_pi - N*[alpha, beta]_pi``."""
    return (bracket_pi(pi, N.star(alpha), beta) + bracket_pi(pi, alpha, N.star(beta))
            - N.star(bracket_pi(pi, alpha, beta)))


def bracket_Npi(pi: MultiVector, N: Endo, alpha: Form, beta: Form) -> Form:
    """Koszul bracket of the anchor ``N pi#``."""
    return koszul_bracket(lambda a: N.apply(sharp(pi, a)), alpha, beta)


def compatibility_tensor(pi: MultiVector, N: Endo, alpha: Form, beta: Form) -> Form:
    """``C(alpha, beta) = [alpha, beta]_{N pi#} - [alpha, beta]_pi^{N*}``."""
    return bracket_Npi(pi, N, alpha, beta) - bracket_pi_Nstar(pi, N, alpha, beta)


def cartan_lie(spec, gen: Alternating, T: Alternating) -> Alternating:
    """Lie derivative of the anchored bundle along a section, by the Cartan formula.

    On the dual exterior algebra this is ``d iota_gen + iota_gen d``; on the
    bundle's own exterior algebra it is the Schouten bracket ``[gen, .]``.
    """
    spec = _spec_for(spec, gen.chart)
    spec.check(gen)
    if gen.grade != 1:
        raise ValueError("cartan_lie needs a grade-1 generator")
    if type(T) is spec.kind:
        return schouten(spec, gen, T)
    out = iota(gen, koszul_differential(spec, T))
    if T.grade:
        out = out + koszul_differential(spec, iota(gen, T))
    return out


def torsion(N: Endo, X: MultiVector, Y: MultiVector) -> MultiVector:
    """Nijenhuis torsion ``[NX, NY] - N[X, Y]_N``."""
    return lie_bracket(N.apply(X), N.apply(Y)) - N.apply(bracket_N(N, X, Y))


def derivation_defect(pi: MultiVector, N: Endo, D1: MultiVector, D2: MultiVector) -> MultiVector:
    """``d_pi[D1,D2]_N - [d_pi D1, D2]_N - (-1)^(deg D1 + 1) [D1, d_pi D2]_N``."""
    sN = tangent_n(N)
    return (d_pi(pi, schouten(sN, D1, D2)) - schouten(sN, d_pi(pi, D1), D2)
            - schouten(sN, D1, d_pi(pi, D2)) * _sign(D1.grade + 1))


def dual_derivation_defect(pi: MultiVector, N: Endo, xi1: Form, xi2: Form) -> Form:
    """``d_N[xi1,xi2]_pi - [d_N xi1, xi2]_pi - (-1)^(deg xi1 + 1) [xi1, d_N xi2]_pi``."""
    sp = cotangent_pi(pi)
    return (d_N(N, schouten(sp, xi1, xi2)) - schouten(sp, d_N(N, xi1), xi2)
            - schouten(sp, xi1, d_N(N, xi2)) * _sign(xi1.grade + 1))
