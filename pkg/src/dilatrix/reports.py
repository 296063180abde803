"""Check reports: one verified inequality instance and sweep summaries."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any


@dataclass
class CheckReport:
    """Outcome of one inequality check.

    ``gap`` is lhs - rhs with the convention that the claimed inequality is
    lhs >= rhs, so a nonnegative gap means the inequality holds; a check
    with ``two_sided`` set claims equality and passes iff |gap| stays
    within tolerance.  ``vacuous`` marks instances where the hypothesis of
    the statement fails in the degenerate full-measure way (s > 0 with the
    dilation covering the support); ``applicable`` is False when a
    variant's hypotheses do not apply at all.  Neither counts as a failure.
    """

    check: str
    parameters: dict[str, Any]
    lhs: float
    rhs: float
    tolerance: float
    anchor: str
    vacuous: bool = False
    applicable: bool = True
    two_sided: bool = False
    gap: float = field(init=False)
    passed: bool = field(init=False)

    def __post_init__(self) -> None:
        self.gap = self.lhs - self.rhs
        ok = abs(self.gap) <= self.tolerance if self.two_sided else self.gap >= -self.tolerance
        self.passed = (not self.applicable) or self.vacuous or ok

    def to_dict(self) -> dict[str, Any]:
        return {
            "check": self.check,
            "parameters": self.parameters,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "gap": self.gap,
            "pass": self.passed,
            "tolerance": self.tolerance,
            "anchor": self.anchor,
            "vacuous": self.vacuous,
            "applicable": self.applicable,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def summarize(reports: list[CheckReport]) -> dict[str, Any]:
    """Order-independent summary of a batch of reports."""
    effective = [r for r in reports if r.applicable and not r.vacuous]
    worst = min(effective, key=lambda r: r.gap) if effective else None
    return {
        "total": len(reports),
        "passed": sum(r.passed for r in reports),
        "vacuous": sum(r.vacuous for r in reports),
        "worstGap": worst.gap if worst is not None else None,
        "worstInstance": worst.parameters if worst is not None else None,
    }
