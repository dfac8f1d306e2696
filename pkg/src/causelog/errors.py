"""Exception types shared by the parsers and engines."""

from __future__ import annotations


class CauselogError(Exception):
    """Base class for every error raised by causelog."""


class ParseError(CauselogError):
    """Malformed input text. Carries a 1-based line (and column when known)."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.message = message
        self.line = line
        self.col = col
        where = ""
        if line is not None:
            where = f"line {line}"
            if col is not None:
                where += f", col {col}"
            where += ": "
        super().__init__(where + message)


class ValidationError(CauselogError):
    """Input is well formed but violates a semantic rule (cycle, bad domain, ...)."""
