"""Check verdicts with re-checkable witnesses, plus enumeration budgets.

Every bounded check returns a CheckReport.  A Refuted report always carries a
concrete witness; re-running the relevant single-instance test on the witness
reproduces the refutation.  Budget overruns yield Inconclusive, never a
silent pass.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

VERIFIED = "verified"
REFUTED = "refuted"
INCONCLUSIVE = "inconclusive"


class BudgetExceeded(Exception):
    pass


@dataclass
class Budget:
    max_instances: int = 1_000_000
    max_seconds: float = 60.0
    used: int = 0
    started: float = field(default_factory=time.monotonic)

    def tick(self, n: int = 1) -> None:
        self.used += n
        if self.used > self.max_instances:
            raise BudgetExceeded("instance budget exceeded: %d of at most %d candidates"
                                 % (self.used, self.max_instances))
        if self.used % 4096 < n and time.monotonic() - self.started > self.max_seconds:
            raise BudgetExceeded("time budget exceeded after %d candidates (%.0fs cap)"
                                 % (self.used, self.max_seconds))


@dataclass(frozen=True)
class Witness:
    kind: str  # clause-instance | uncovered-atom | non-decreasing | unsuitable | split-atom | missing-answer | disagreement
    rendering: str
    data: dict

    def to_json(self) -> dict:
        return {"kind": self.kind, "rendering": self.rendering, "data": self.data}


@dataclass
class CheckReport:
    check: str
    verdict: str
    bound: Optional[int] = None
    instances_checked: int = 0
    witness: Optional[Witness] = None
    reason: Optional[str] = None
    details: dict = field(default_factory=dict)

    @property
    def verified(self) -> bool:
        return self.verdict == VERIFIED

    @property
    def refuted(self) -> bool:
        return self.verdict == REFUTED

    @property
    def inconclusive(self) -> bool:
        return self.verdict == INCONCLUSIVE

    def to_json(self) -> dict:
        return {
            "check": self.check,
            "verdict": self.verdict,
            "bound": self.bound,
            "instances_checked": self.instances_checked,
            "witness": self.witness.to_json() if self.witness else None,
            "reason": self.reason,
            "details": self.details,
        }

    def render_text(self) -> str:
        lines = ["%s: %s" % (self.check, self.verdict.upper())]
        if self.bound is not None:
            lines.append("  bound: %d  instances checked: %d" % (self.bound, self.instances_checked))
        if self.reason:
            lines.append("  reason: %s" % self.reason)
        if self.witness:
            lines.append("  witness (%s): %s" % (self.witness.kind, self.witness.rendering))
        for k, v in self.details.items():
            lines.append("  %s: %s" % (k, v))
        return "\n".join(lines)


def verified(check: str, bound: Optional[int] = None, instances: int = 0, **details) -> CheckReport:
    return CheckReport(check, VERIFIED, bound, instances, None, None, dict(details))


def refuted(check: str, witness: Witness, bound: Optional[int] = None, instances: int = 0,
            reason: Optional[str] = None, **details) -> CheckReport:
    return CheckReport(check, REFUTED, bound, instances, witness, reason, dict(details))


def inconclusive(check: str, reason: str, bound: Optional[int] = None, instances: int = 0,
                 **details) -> CheckReport:
    return CheckReport(check, INCONCLUSIVE, bound, instances, None, reason, dict(details))
