"""Verification reports shared by the half-space and convex checks."""

from __future__ import annotations

from dataclasses import dataclass, field

from .quadrature import MONTE_CARLO, Estimate

__all__ = ["DegenerateInputError", "HardyReport", "RHS_FLOOR"]

# a right-hand side below this is treated as "u = 0" and rejected
RHS_FLOOR = 1e-14


class DegenerateInputError(ValueError):
    """The test function is (numerically) zero, so no ratio exists."""


@dataclass(frozen=True)
class HardyReport:
    """Outcome of checking ``lhs >= constant * rhs`` for one test function.

    ``sigma`` multiplies the error fields in the pass/fail rule; it is 1 for
    deterministic bounds and 3 when an estimate is a Monte Carlo standard
    error.
    """

    name: str
    lhs: Estimate
    rhs: Estimate
    constant: float
    sigma: float = 1.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not abs(self.rhs.value) > RHS_FLOOR:
            raise DegenerateInputError(f"{self.name}: right-hand side {self.rhs.value:.3g} is degenerate")

    @classmethod
    def build(cls, name: str, lhs: Estimate, rhs: Estimate, constant: float, meta: dict | None = None):
        mc = MONTE_CARLO in (lhs.kind, rhs.kind)
        return cls(name, lhs, rhs, constant, 3.0 if mc else 1.0, dict(meta or {}))

    @property
    def ratio(self) -> float:
        return self.lhs.value / self.rhs.value

    @property
    def ratio_error(self) -> float:
        r = self.ratio
        return abs(r) * (self.lhs.error / abs(self.lhs.value or 1.0) + self.rhs.error / abs(self.rhs.value))

    @property
    def margin(self) -> float:
        return self.lhs.value - self.constant * self.rhs.value

    @property
    def tol_combined(self) -> float:
        return self.sigma * (self.lhs.error + abs(self.constant) * self.rhs.error)

    @property
    def passed(self) -> bool:
        return self.margin >= -self.tol_combined

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": self.lhs.as_dict(),
            "rhs": self.rhs.as_dict(),
            "constant": self.constant,
            "ratio": {"value": self.ratio, "error": self.ratio_error},
            "margin": {"value": self.margin, "error": self.tol_combined},
            "sigma": self.sigma,
            "verdict": self.verdict,
            **({"meta": self.meta} if self.meta else {}),
        }
