"""Diagnostics shared across the toolkit.

Format is one diagnostic per line: "file:line:col: severity: message".
"""

from __future__ import annotations

from .cast.nodes import Span


class CompileError(Exception):
    severity = "error"

    def __init__(self, span: Span, message: str):
        self.span = span
        self.message = message
        super().__init__(self.format())

    def format(self) -> str:
        return f"{self.span}: {self.severity}: {self.message}"


class SyntaxErr(CompileError):
    """Token stream does not match the subset grammar."""

    def __init__(self, span: Span, message: str, expected: tuple[str, ...] = ()):
        self.expected = expected
        if expected:
            message = f"{message} (expected {', '.join(expected)})"
        super().__init__(span, message)


class UnsupportedConstructError(CompileError):
    """Valid C, but outside the supported subset; never silently skipped."""


class TypeErr(CompileError):
    """Subset type rule violation."""


class TrapError(Exception):
    """Interpreter trap: the abstract machine has no defined continuation."""

    def __init__(self, kind: str, span: Span, message: str):
        self.kind = kind
        self.span = span
        self.message = message
        super().__init__(f"{span}: trap: {kind}: {message}")
