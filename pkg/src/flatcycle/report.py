"""Small check/report containers shared by the verification routines."""

from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class Check:
    """One verified inequality: ``lhs <= rhs`` (or a boolean condition).

    ``residual`` is ``lhs - rhs`` for inequalities, so a check passes when the
    residual is non-positive; for equality checks it is the absolute error and
    ``bound`` the tolerance it was compared against.
    """

    name: str
    passed: bool
    residual: float = 0.0
    bound: float = 0.0
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "pass": bool(self.passed),
            "residual": _jsonable(self.residual),
            "bound": _jsonable(self.bound),
            "detail": self.detail,
        }


def _jsonable(x):
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        return str(x)
    return x


@dataclass
class Report:
    name: str
    checks: list = field(default_factory=list)
    values: dict = field(default_factory=dict)

    def add(self, name, passed, residual=0.0, bound=0.0, detail="") -> Check:
        c = Check(name, bool(passed), float(residual), float(bound), detail)
        self.checks.append(c)
        return c

    def leq(self, name, lhs, rhs, tol=0.0, detail="") -> Check:
        """Record ``lhs <= rhs + tol``; the stored residual is ``lhs - rhs``."""
        lhs, rhs = float(lhs), float(rhs)
        return self.add(name, lhs <= rhs + tol, lhs - rhs, tol, detail or f"{lhs!r} <= {rhs!r}")

    def close(self, name, a, b, tol, detail="") -> Check:
        err = abs(float(a) - float(b))
        return self.add(name, err <= tol, err, tol, detail or f"|{float(a)!r} - {float(b)!r}|")

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]

    def merge(self, other: "Report", prefix: str = "") -> None:
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.passed, c.residual, c.bound, c.detail))

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "pass": self.passed,
            "values": {k: _jsonable(v) if isinstance(v, (int, float)) else v for k, v in self.values.items()},
            "checks": [c.to_dict() for c in self.checks],
        }
