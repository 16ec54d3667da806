"""Check records: every numeric claim carries its two sides and the margin used."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any


def to_plain(v: Any) -> Any:
    if isinstance(v, bool):
        return v
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, int):
        return v if abs(v) < 2**53 else str(v)
    if isinstance(v, float):
        return float(v)
    if isinstance(v, (list, tuple)):
        return [to_plain(x) for x in v]
    if isinstance(v, dict):
        return {str(k): to_plain(x) for k, x in v.items()}
    return str(v)


@dataclass(frozen=True)
class CheckRecord:
    """``lhs relation rhs`` evaluated with ``margin`` added to the favorable side."""

    name: str
    anchor: str
    lhs: Any
    relation: str
    rhs: Any
    margin: Any
    passed: bool
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "anchor": self.anchor,
            "lhs": to_plain(self.lhs),
            "relation": self.relation,
            "rhs": to_plain(self.rhs),
            "margin": to_plain(self.margin),
            "pass": self.passed,
            "detail": to_plain(self.detail),
        }


def check_le(name: str, anchor: str, lhs, rhs, margin=0.0, **detail) -> CheckRecord:
    return CheckRecord(name, anchor, lhs, "<=", rhs, margin, bool(lhs <= rhs + margin), detail)


def check_ge(name: str, anchor: str, lhs, rhs, margin=0.0, **detail) -> CheckRecord:
    return CheckRecord(name, anchor, lhs, ">=", rhs, margin, bool(lhs + margin >= rhs), detail)


def check_gt(name: str, anchor: str, lhs, rhs, margin=0.0, **detail) -> CheckRecord:
    return CheckRecord(name, anchor, lhs, ">", rhs, margin, bool(lhs + margin > rhs), detail)


def check_eq(name: str, anchor: str, lhs, rhs, **detail) -> CheckRecord:
    """Exact equality (integers, rationals, tuples)."""
    return CheckRecord(name, anchor, lhs, "==", rhs, 0, bool(lhs == rhs), detail)


def check_close(name: str, anchor: str, lhs: float, rhs: float, tol: float, **detail) -> CheckRecord:
    err = abs(lhs - rhs)
    return CheckRecord(name, anchor, lhs, "~=", rhs, tol, bool(err <= tol), {"error": err, **detail})
