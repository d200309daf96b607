"""Shared error and diagnostic types."""
from __future__ import annotations

from dataclasses import dataclass, field


class SchemaError(Exception):
    """Hard failure in schema construction or evaluation."""


class NormalizeFirstError(SchemaError):
    """Unification was attempted on terms still containing defined symbols."""


class ResourceOut(SchemaError):
    """A saturation search exceeded its clause or step limits."""


@dataclass(frozen=True)
class Diagnostic:
    path: str
    message: str
    line: int | None = None
    column: int | None = None

    def __str__(self) -> str:
        loc = ""
        if self.line is not None:
            loc = f"{self.line}:{self.column if self.column is not None else 0}: "
        where = f"{self.path}: " if self.path else ""
        return f"{loc}{where}{self.message}"


@dataclass
class CheckReport:
    ok: bool = True
    diagnostics: list[Diagnostic] = field(default_factory=list)

    def add(self, path: str, message: str) -> None:
        self.ok = False
        self.diagnostics.append(Diagnostic(path, message))

    def extend(self, other: "CheckReport") -> None:
        if not other.ok:
            self.ok = False
        self.diagnostics.extend(other.diagnostics)

    def __str__(self) -> str:
        if self.ok:
            return "ok"
        return "\n".join(str(d) for d in self.diagnostics)
