"""Small shared result record for identity checks and suite reports."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass
class CheckResult:
    name: str
    passed: bool
    mode: str = "canonical"  # canonical | sampled | exact
    max_residual: float = 0.0
    detail: str = ""
    skipped: bool = False

    @property
    def status(self) -> str:
        if self.skipped:
            return "skip"
        return "pass" if self.passed else "fail"

    def as_record(self, suite: str, seed: int) -> dict:
        return {
            "suite": suite,
            "check": self.name,
            "status": self.status,
            "mode": self.mode,
            "max_residual": float(self.max_residual),
            "seed": seed,
            "detail": self.detail,
        }
