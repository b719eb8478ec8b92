from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .model import Loc


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    message: str
    loc: Optional[Loc] = None

    def __str__(self) -> str:
        where = str(self.loc) if self.loc else "<unknown>"
        return f"{where}: {self.severity}: {self.message}"


class PDDLError(Exception):
    """Raised by the parser on malformed or ill-typed input."""

    def __init__(self, message: str, loc: Optional[Loc] = None):
        self.message = message
        self.loc = loc
        super().__init__(str(Diagnostic("error", message, loc)))


class ValidationError(PDDLError):
    """A parsed domain failed validation; carries every diagnostic."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        first = diagnostics[0]
        Exception.__init__(self, "\n".join(str(d) for d in diagnostics))
        self.message = first.message
        self.loc = first.loc
