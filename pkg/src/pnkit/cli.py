"""Command line: manifest checks, builtin examples, Courant axioms, hierarchies.

Exit codes: 0 all conditions pass, 1 some condition failed, 2 bad input.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from typing import Optional

from pnkit import __version__
from pnkit.courant import CourantStructure, verify_axioms
from pnkit.expr import ParseError
from pnkit.report import CONVENTIONS, PASS, FAIL, CheckReport
from pnkit.sampling import random_sections
from pnkit.structures import (
    EXAMPLES, ParameterError, PreconditionError, StructureData, builtin_example,
    check_structure, compatibility, hierarchy, hierarchy_identity_check,
    is_nijenhuis, is_poisson, ppn_check, psn_check, twisted_poisson_check,
)
from pnkit.tensor import Chart, DegenerateError, Endo, Form, MultiVector, invert_flat

CHECKS = ("poisson", "nijenhuis", "compatible", "ppn", "psn", "twisted", "courant", "hierarchy")
TENSORS = {
    "bivector": (MultiVector, 2),
    "trivector": (MultiVector, 3),
    "two_form": (Form, 2),
    "three_form": (Form, 3),
}
NEEDS = {
    "poisson": ("bivector",),
    "nijenhuis": ("endomorphism",),
    "compatible": ("bivector", "endomorphism"),
    "ppn": ("bivector", "endomorphism"),
    "psn": ("two_form", "endomorphism"),
    "twisted": ("endomorphism",),
    "courant": (),
    "hierarchy": ("bivector", "endomorphism"),
}
TOP_KEYS = ("coordinates", "opaque_functions", *TENSORS, "endomorphism", "check", "params")


class InputError(Exception):
    """Bad manifest or arguments; ``pointer`` is a JSON pointer when known."""

    def __init__(self, message: str, pointer: str = ""):
        self.pointer = pointer
        super().__init__(f"{pointer}: {message}" if pointer else message)


# -- manifests -----------------------------------------------------------------

def _no_duplicate_keys(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise InputError(f"duplicate key {k!r}")
        out[k] = v
    return out


def _expr(chart: Chart, text, ptr: str):
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        text = str(Fraction(text))
    if not isinstance(text, str):
        raise InputError("expected an expression string", ptr)
    try:
        return chart.scalar(text)
    except ParseError as e:
        raise InputError(str(e), ptr) from None


def _tensor(chart: Chart, key: str, raw, ptr: str):
    kind, grade = TENSORS[key]
    if not isinstance(raw, list):
        raise InputError("expected a list of components", ptr)
    comps = {}
    seen = set()
    for n, item in enumerate(raw):
        p = f"{ptr}/{n}"
        if not isinstance(item, dict) or set(item) != {"indices", "coeff"}:
            raise InputError("component needs exactly 'indices' and 'coeff'", p)
        idx = item["indices"]
        if not isinstance(idx, list) or len(idx) != grade:
            raise InputError(f"expected {grade} indices", p + "/indices")
        for m, name in enumerate(idx):
            if name not in chart.coords:
                raise InputError(f"unknown coordinate {name!r}", f"{p}/indices/{m}")
        if len(set(idx)) != len(idx):
            raise InputError("repeated index", p + "/indices")
        key_set = frozenset(idx)
        if key_set in seen:
            raise InputError("duplicate index set", p + "/indices")
        seen.add(key_set)
        comps[tuple(idx)] = _expr(chart, item["coeff"], p + "/coeff")
    return kind(chart, grade, comps)


def _endo(chart: Chart, raw, ptr: str) -> Endo:
    if not isinstance(raw, dict) or set(raw) != {"matrix"}:
        raise InputError("expected {\"matrix\": [[...], ...]}", ptr)
    rows = raw["matrix"]
    n = chart.n
    if not isinstance(rows, list) or len(rows) != n:
        raise InputError(f"expected {n} rows", ptr + "/matrix")
    out = []
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != n:
            raise InputError(f"expected {n} entries", f"{ptr}/matrix/{i}")
        out.append([_expr(chart, v, f"{ptr}/matrix/{i}/{j}") for j, v in enumerate(row)])
    return Endo(chart, out)


def parse_manifest(doc) -> tuple:
    """Validate a decoded manifest; returns ``(StructureData, check, params)``."""
    if not isinstance(doc, dict):
        raise InputError("manifest must be a JSON object", "")
    for k in doc:
        if k not in TOP_KEYS:
            raise InputError(f"unknown key {k!r}", "/" + k)
    coords = doc.get("coordinates")
    if not isinstance(coords, list) or not coords or not all(isinstance(c, str) for c in coords):
        raise InputError("expected a non-empty list of names", "/coordinates")
    opaque = doc.get("opaque_functions", [])
    if not isinstance(opaque, list) or not all(isinstance(c, str) for c in opaque):
        raise InputError("expected a list of names", "/opaque_functions")
    try:
        chart = Chart(tuple(coords), tuple(opaque))
    except ValueError as e:
        raise InputError(str(e), "/coordinates") from None
    check = doc.get("check")
    if check not in CHECKS:
        raise InputError(f"expected one of {', '.join(CHECKS)}", "/check")
    params = doc.get("params", {})
    if not isinstance(params, dict):
        raise InputError("expected an object", "/params")
    t = {k: _tensor(chart, k, doc[k], "/" + k) for k in TENSORS if k in doc}
    N = _endo(chart, doc["endomorphism"], "/endomorphism") if "endomorphism" in doc else None
    present = set(t) | ({"endomorphism"} if N is not None else set())
    for need in NEEDS[check]:
        if need not in present:
            raise InputError(f"check {check!r} needs {need!r}", "/" + need)
    if check == "twisted" and not ({"bivector", "two_form"} & present):
        raise InputError("check 'twisted' needs a bivector or a two_form", "/bivector")
    if "bivector" in t and "two_form" in t:
        raise InputError("give either a bivector or a two_form, not both", "/two_form")
    s = StructureData(chart, pi=t.get("bivector"), N=N, Phi=t.get("trivector"),
                      omega=t.get("two_form"), phi=t.get("three_form"))
    return s, check, params


def load_manifest(path: str) -> tuple:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None
    try:
        doc = json.loads(text, object_pairs_hook=_no_duplicate_keys)
    except json.JSONDecodeError as e:
        raise InputError(f"invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}") from None
    return parse_manifest(doc)


def _components(t) -> list:
    names = t.chart.coords
    return [{"indices": [names[i] for i in idx], "coeff": str(c)} for idx, c in t.items()]


def emit_manifest(s: StructureData, check: Optional[str] = None) -> dict:
    """Manifest document for a structure (inverse of :func:`parse_manifest`)."""
    doc = {"coordinates": list(s.chart.coords)}
    if s.chart.opaque:
        doc["opaque_functions"] = list(s.chart.opaque)
    for key, t in (("bivector", s.pi), ("trivector", s.Phi),
                   ("two_form", s.omega), ("three_form", s.phi)):
        if t is not None:
            doc[key] = _components(t)
    if s.N is not None:
        doc["endomorphism"] = {"matrix": [[str(c) for c in row] for row in s.N.matrix]}
    doc["check"] = check or ("psn" if s.omega is not None else "ppn")
    return doc


# -- running checks ---------------------------------------------------------------

def _int_param(params: dict, key: str, default: int, override=None) -> int:
    v = override if override is not None else params.get(key, default)
    if isinstance(v, bool) or not isinstance(v, int) or v < 0:
        raise InputError("expected a non-negative integer", "/params/" + key)
    return v


def hierarchy_report(pi: MultiVector, N: Endo, depth: int) -> CheckReport:
    """Compatibility of every ``(pi_k, N^p)``, p in {1, 2}, and the bracket identities."""
    rep = CheckReport("hierarchy")
    rep.extend(is_nijenhuis(N))
    rep.extend(compatibility(pi, N), prefix="(pi_0, N) ")
    if not rep.passed:
        rep.skip("hierarchy members", "needs a compatible Nijenhuis pair")
        return rep
    try:
        members = hierarchy(pi, N, depth)
    except PreconditionError as e:
        rep.add_flag("hierarchy members", False, str(e))
        return rep
    chart = pi.chart
    for k, pk in enumerate(members):
        for p in (1, 2):
            rep.extend(compatibility(pk, N ** p), prefix=f"(pi_{k}, N^{p}) ")
    qs = [MultiVector.basis(chart, i) for i in range(chart.n)]
    if chart.n >= 2:
        qs.append(MultiVector.basis(chart, 0, 1))
    for k in range(depth):
        for l in (0, 1):
            for q in qs:
                sub = hierarchy_identity_check(pi, N, k, l, q)
                rep.extend(sub, prefix=f"k={k} l={l} Q={q}: ")
    return rep


def run_check(s: StructureData, check: str, params: dict) -> tuple:
    """Returns ``(report, seed or None)``."""
    N = s.N
    if check == "poisson":
        return is_poisson(s.pi), None
    if check == "nijenhuis":
        return is_nijenhuis(N), None
    if check == "compatible":
        return compatibility(s.pi, N), None
    if check == "ppn":
        return ppn_check(s.pi, N, s.trivector()), None
    if check == "psn":
        return psn_check(s.omega, N, s.three_form()), None
    if check == "twisted":
        pi = s.pi if s.pi is not None else invert_flat(s.omega)
        return twisted_poisson_check(pi, N, s.three_form()), None
    if check == "courant":
        return courant_report(s, params)
    if check == "hierarchy":
        return hierarchy_report(s.pi, N, _int_param(params, "depth", 1)), None
    raise InputError(f"unknown check {check!r}", "/check")


def courant_report(s: StructureData, params: dict, sections=None, seed=None) -> tuple:
    count = _int_param(params, "sections", 4, sections)
    seed = _int_param(params, "seed", 0, seed)
    if s.pi is None and s.N is None and s.Phi is None:
        S = CourantStructure.standard(s.chart)
    else:
        S = CourantStructure.double(s.bivector(), s.endo(), s.trivector())
    try:
        rep = verify_axioms(S, random_sections(s.chart, count, seed))
    except ValueError as e:
        raise InputError(str(e), "/params/sections") from None
    return rep, seed


def report_document(rep: CheckReport, seed=None, timing_ms=None) -> dict:
    doc = {
        "version": __version__,
        "conventions": dict(CONVENTIONS),
        "verdict": PASS if rep.passed else FAIL,
        "conditions": [c.to_dict() for c in rep.conditions],
    }
    if seed is not None:
        doc["seed"] = seed
    doc["timing_ms"] = timing_ms
    return doc


def dumps(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


# -- argument handling -----------------------------------------------------------

def _parse_kv(items) -> dict:
    out = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise InputError(f"--param expects k=v, got {item!r}")
        out[key] = value
    return out


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pnkit", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"pnkit {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def output_flags(p):
        p.add_argument("--json", metavar="PATH", help="write the JSON report here ('-' for stdout)")
        p.add_argument("--timing", action="store_true", help="record wall time in the report")

    p = sub.add_parser("check", help="run the check named in a manifest")
    p.add_argument("manifest")
    output_flags(p)

    p = sub.add_parser("example", help="builtin examples")
    p.add_argument("--name", required=True, choices=sorted(EXAMPLES))
    p.add_argument("--param", action="append", metavar="K=V", help="example parameter")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--emit", metavar="PATH", help="write the example as a manifest ('-' for stdout)")
    g.add_argument("--check", action="store_true", help="check the example (the default)")
    output_flags(p)

    p = sub.add_parser("courant", help="Courant algebroid axioms")
    csub = p.add_subparsers(dest="action", required=True)
    v = csub.add_parser("verify", help="verify the five axioms on seeded random sections")
    v.add_argument("manifest")
    v.add_argument("--sections", type=int, default=None)
    v.add_argument("--seed", type=int, default=None)
    output_flags(v)

    p = sub.add_parser("hierarchy", help="check a Poisson-Nijenhuis hierarchy")
    p.add_argument("manifest")
    p.add_argument("--depth", type=int, default=None)
    output_flags(p)
    return ap


def _finish(args, rep: CheckReport, seed, started: float, out) -> int:
    timing = round((time.perf_counter() - started) * 1000, 3) if args.timing else None
    doc = report_document(rep, seed, timing)
    if args.json == "-":
        out.write(dumps(doc))
    else:
        out.write(rep.summary() + "\n")
        if args.json:
            with open(args.json, "w", encoding="utf-8") as fh:
                fh.write(dumps(doc))
    return 0 if rep.passed else 1


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 2
    started = time.perf_counter()
    try:
        if args.command == "check":
            s, check, params = load_manifest(args.manifest)
            rep, seed = run_check(s, check, params)
        elif args.command == "example":
            try:
                s = builtin_example(args.name, **_parse_kv(args.param))
            except (ValueError, ZeroDivisionError) as e:
                if isinstance(e, (InputError, ParameterError)):
                    raise
                raise ParameterError(f"bad example parameter: {e}") from None
            if args.emit:
                text = dumps(emit_manifest(s))
                if args.emit == "-":
                    out.write(text)
                else:
                    with open(args.emit, "w", encoding="utf-8") as fh:
                        fh.write(text)
                return 0
            rep, seed = check_structure(s), None
        elif args.command == "courant":
            s, _, params = load_manifest(args.manifest)
            rep, seed = courant_report(s, params, args.sections, args.seed)
        else:
            s, _, params = load_manifest(args.manifest)
            if s.pi is None or s.N is None:
                raise InputError("hierarchy needs a bivector and an endomorphism")
            depth = _int_param(params, "depth", 1, args.depth)
            rep, seed = hierarchy_report(s.pi, s.N, depth), None
    except DegenerateError as e:
        err.write(f"error: {e}\n")
        return 2
    except (InputError, ParameterError) as e:
        err.write(f"error: {e}\n")
        return 2
    return _finish(args, rep, seed, started, out)


def main() -> None:
    sys.exit(run())
