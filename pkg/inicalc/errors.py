"""Exception hierarchy shared by the parser, checker, evaluators and harness."""

from __future__ import annotations

from typing import TYPE_CHECKING, Iterable

if TYPE_CHECKING:
    from inicalc.syntax.ast import Span


class IniError(Exception):
    """Base class for every user-facing failure (maps to exit code 1)."""

    kind: str = "IniError"

    def to_dict(self) -> dict:
        return {"kind": self.kind, "message": str(self)}


class ParseError(IniError):
    kind = "ParseError"

    def __init__(self, span: Span, expected: Iterable[str] = (), message: str = "syntax error") -> None:
        self.span = span
        self.expected = frozenset(expected)
        self.message = message
        super().__init__(f"{span}: {message}")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "message": self.message,
            "span": self.span.to_dict(),
            "expected": sorted(self.expected),
        }


class TypeCheckError(IniError):
    """A typing failure; ``kind`` is one of the TypeErrorKind values."""

    def __init__(
        self,
        kind: str,
        span: Span,
        explanation: str,
        variable: str | None = None,
        sites: tuple[Span, ...] = (),
    ) -> None:
        self.kind = kind
        self.span = span
        self.explanation = explanation
        self.variable = variable
        self.sites = sites
        super().__init__(f"{span}: {kind}: {explanation}")

    def to_dict(self) -> dict:
        out = {
            "kind": self.kind,
            "span": self.span.to_dict(),
            "explanation": self.explanation,
        }
        if self.variable is not None:
            out["variable"] = self.variable
            out["sites"] = [s.to_dict() for s in self.sites]
        return out


class PrimUnknown(IniError):
    kind = "PrimUnknown"


class IncomparableValue(IniError):
    kind = "IncomparableValue"


class UnsupportedType(IniError):
    kind = "UnsupportedType"


class NotAPairSupport(IniError):
    kind = "NotAPairSupport"


class NotInFragment(IniError):
    kind = "NotInFragment"


class GenExhausted(IniError):
    kind = "GenExhausted"


class UsageError(IniError):
    kind = "UsageError"
