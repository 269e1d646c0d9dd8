import random
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from pnkit.tensor import Chart

# every property runs 200 derandomized cases so failures reproduce exactly
settings.register_profile(
    "pnkit",
    max_examples=200,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("pnkit")

CASES = 200

R2 = Chart(("x", "y"))
R3 = Chart(("x", "y", "z"))
R3F = Chart(("x", "y", "z"), ("f", "g"))
R4 = Chart(("x", "y", "z", "w"))


@pytest.fixture
def r2():
    return R2


@pytest.fixture
def r3():
    return R3


@pytest.fixture
def rng():
    return random.Random(20240601)


def opaque_value(name, order, at):
    """A fixed, arbitrary binding for opaque atoms used by evaluation oracles."""
    return Fraction(len(name) + 3 * order + 1) + Fraction(at) * (order + 2) / 5


# -- expression strings ----------------------------------------------------------

def _leaf(coords):
    return st.one_of(
        st.sampled_from(coords),
        st.integers(-4, 6).map(str),
        st.tuples(st.integers(1, 5), st.integers(2, 4)).map(lambda t: f"({t[0]}/{t[1]})"),
    )


def expression_strings(coords=("x", "y", "z"), opaque=("f", "g"), max_leaves=8, division=True):
    """Random well-formed expression strings in the input grammar."""
    leaf = _leaf(list(coords))

    def extend(inner):
        ops = [
            st.tuples(inner, inner).map(lambda t: f"({t[0]} + {t[1]})"),
            st.tuples(inner, inner).map(lambda t: f"({t[0]} - {t[1]})"),
            st.tuples(inner, inner).map(lambda t: f"({t[0]})*({t[1]})"),
            st.tuples(inner, st.integers(0, 3)).map(lambda t: f"({t[0]})^{t[1]}"),
            inner.map(lambda a: f"-({a})"),
        ]
        if opaque:
            ops.append(st.tuples(st.sampled_from(list(opaque) + ["sin", "exp"]),
                                 st.integers(0, 2), inner)
                       .map(lambda t: f"{t[0]}{chr(39) * t[1] if t[0] in opaque else ''}({t[2]})"))
        if division:
            # denominators that can never canonicalize to zero
            den = st.sampled_from(list(coords) + [f"({c} + 2)" for c in coords]
                                  + ([f"{o}({coords[0]})" for o in opaque] if opaque else []))
            ops.append(st.tuples(inner, den).map(lambda t: f"({t[0]})/{t[1]}"))
        return st.one_of(*ops)

    return st.recursive(leaf, extend, max_leaves=max_leaves)


def rational_points(coords=("x", "y", "z")):
    return st.fixed_dictionaries({c: st.fractions(-5, 5, max_denominator=4) for c in coords})


# -- acceptance summary ------------------------------------------------------------

# criterion number -> (label, passed); filled in by test_acceptance
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        label, ok = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:>2} {'PASS' if ok else 'FAIL'}  {label}")
