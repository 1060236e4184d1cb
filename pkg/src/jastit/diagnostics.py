"""Diagnostic records shared by the frame and model validators."""

from __future__ import annotations

from dataclasses import dataclass, field

VIOLATION = "violation"
WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    code: str
    message: str
    witness: tuple = field(default=())

    def __str__(self) -> str:
        w = f" witness={self.witness!r}" if self.witness else ""
        return f"{self.severity}[{self.code}] {self.message}{w}"


def violations(diags) -> list[Diagnostic]:
    return [d for d in diags if d.severity == VIOLATION]


def warnings(diags) -> list[Diagnostic]:
    return [d for d in diags if d.severity == WARNING]


class ResourceBoundExceeded(Exception):
    """A configured enumeration cap would be exceeded; raised instead of running forever."""
