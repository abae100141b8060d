"""Pass/fail result shared by the audit and index checkers."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class CheckResult:
    passed: bool
    witness: dict | None = None

    def to_dict(self) -> dict:
        return {"pass": self.passed, "witness": self.witness}
