"""Violation-list reports returned by the validators."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Violation:
    kind: str
    message: str
    witness: object = None

    def __str__(self):
        if self.witness is None:
            return f"[{self.kind}] {self.message}"
        return f"[{self.kind}] {self.message} (witness: {self.witness})"


@dataclass
class ValidationReport:
    """Empty violation list means the checked object is valid.

    ``sampled`` marks reports whose coverage checks ran on a random sample
    instead of exhaustively.
    """

    subject: str = ""
    violations: list[Violation] = field(default_factory=list)
    sampled: bool = False

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, kind: str, message: str, witness: object = None) -> None:
        self.violations.append(Violation(kind, message, witness))

    def summary(self) -> str:
        status = "valid" if self.ok else f"INVALID ({len(self.violations)} violations)"
        mode = " [sampled]" if self.sampled else ""
        lines = [f"{self.subject or 'object'}: {status}{mode}"]
        lines.extend(f"  {v}" for v in self.violations)
        return "\n".join(lines)
