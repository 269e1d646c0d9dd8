"""Check reports: ordered condition records with residual witnesses."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from pnkit.expr import CanonicalForm
from pnkit.tensor import Alternating

PASS = "pass"
FAIL = "fail"
SKIPPED = "skipped"

CONVENTIONS = {
    "interior_product": "iota contracts the first slot; iota_{a^b} = iota_b iota_a",
    "evaluation": "determinant convention, (dx^dy)(d_x, d_y) = 1",
    "schouten_symmetry": "[A,B] = -(-1)^((deg A - 1)(deg B - 1)) [B,A]",
    "sharp_flat": "pi# = -(omega_flat)^-1",
    "endo_orientation": "matrix entry (i,j) is the d_i coefficient of N(d_j)",
}


@dataclass
class Residual:
    slot: str
    expr: CanonicalForm

    def to_dict(self):
        return {"slot": self.slot, "expr": str(self.expr)}


@dataclass
class Condition:
    name: str
    status: str
    residuals: list = field(default_factory=list)
    reason: str = ""

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_dict(self):
        d = {"name": self.name, "status": self.status,
             "residuals": [r.to_dict() for r in self.residuals]}
        if self.reason:
            d["reason"] = self.reason
        return d


def residuals_of(elem, slot: str) -> list:
    """Nonzero components of a field (or a scalar) as residual records."""
    if isinstance(elem, CanonicalForm):
        return [] if elem.is_zero() else [Residual(slot, elem)]
    if isinstance(elem, Alternating):
        names = elem.chart.coords
        out = []
        for idx, c in elem.items():
            comp = ",".join(names[i] for i in idx)
            out.append(Residual(f"{slot}[{comp}]" if idx else slot, c))
        return out
    raise TypeError(f"cannot take residuals of {elem!r}")


class CheckReport:
    """An ordered list of conditions; passes iff every non-skipped one passes."""

    def __init__(self, title: str = "", conditions: Optional[Iterable[Condition]] = None):
        self.title = title
        self.conditions: list = list(conditions or [])
        self.notes: list = []
        self.conventions = dict(CONVENTIONS)

    def add(self, name: str, residuals=(), reason: str = "") -> Condition:
        residuals = list(residuals)
        cond = Condition(name, FAIL if residuals else PASS, residuals, reason)
        self.conditions.append(cond)
        return cond

    def add_flag(self, name: str, ok: bool, reason: str = "") -> Condition:
        cond = Condition(name, PASS if ok else FAIL, [], "" if ok else reason)
        self.conditions.append(cond)
        return cond

    def skip(self, name: str, reason: str) -> Condition:
        cond = Condition(name, SKIPPED, [], reason)
        self.conditions.append(cond)
        return cond

    def extend(self, other: "CheckReport", prefix: str = "") -> None:
        for c in other.conditions:
            self.conditions.append(Condition(prefix + c.name, c.status, list(c.residuals), c.reason))
        self.notes.extend(other.notes)

    @property
    def passed(self) -> bool:
        return all(c.status != FAIL for c in self.conditions)

    def __bool__(self):
        return self.passed

    def get(self, name: str) -> Condition:
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)

    def failed(self) -> list:
        return [c for c in self.conditions if c.status == FAIL]

    def to_dict(self):
        return {
            "conventions": dict(self.conventions),
            "verdict": PASS if self.passed else FAIL,
            "conditions": [c.to_dict() for c in self.conditions],
        }

    def summary(self) -> str:
        lines = [f"{self.title or 'report'}: {PASS if self.passed else FAIL}"]
        for c in self.conditions:
            line = f"  [{c.status}] {c.name}"
            if c.reason:
                line += f" ({c.reason})"
            lines.append(line)
            for r in c.residuals[:5]:
                lines.append(f"      {r.slot} = {r.expr}")
            if len(c.residuals) > 5:
                lines.append(f"      ... {len(c.residuals) - 5} more")
        return "\n".join(lines)

    def __str__(self):
        return self.summary()
