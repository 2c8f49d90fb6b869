"""Ordered typing context with per-variable consumption state."""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, Mapping, Union

from inicalc.syntax.ast import Span, TypeExpr


class Usage(str, Enum):
    FRESH = "fresh"
    CONSUMED = "consumed"


@dataclass(frozen=True)
class ContextEntry:
    name: str
    type: TypeExpr
    state: Usage = Usage.FRESH
    site: Span | None = None  # where the variable was consumed


@dataclass(frozen=True)
class UsageContext:
    entries: tuple[ContextEntry, ...] = ()

    @classmethod
    def of(cls, bindings: Union[Mapping[str, TypeExpr], Iterable[tuple[str, TypeExpr]]]) -> UsageContext:
        pairs = bindings.items() if isinstance(bindings, Mapping) else bindings
        ctx = cls()
        for name, ty in pairs:
            ctx = ctx.extend(name, ty)
        return ctx

    @classmethod
    def coerce(cls, ctx: Union[UsageContext, Mapping[str, TypeExpr], None]) -> UsageContext:
        if ctx is None:
            return cls()
        if isinstance(ctx, UsageContext):
            return ctx
        return cls.of(ctx)

    def lookup(self, name: str) -> ContextEntry | None:
        for entry in self.entries:
            if entry.name == name:
                return entry
        return None

    def __contains__(self, name: object) -> bool:
        return any(entry.name == name for entry in self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def names(self) -> frozenset[str]:
        return frozenset(entry.name for entry in self.entries)

    def types(self) -> dict[str, TypeExpr]:
        return {entry.name: entry.type for entry in self.entries}

    def is_fresh(self, name: str) -> bool:
        entry = self.lookup(name)
        return entry is not None and entry.state is Usage.FRESH

    def consumed(self) -> frozenset[str]:
        return frozenset(e.name for e in self.entries if e.state is Usage.CONSUMED)

    def extend(self, name: str, ty: TypeExpr) -> UsageContext:
        if name in self:
            raise ValueError(f"duplicate context variable '{name}'")
        return UsageContext(self.entries + (ContextEntry(name, ty),))

    def consume(self, name: str, site: Span) -> UsageContext:
        out = []
        for entry in self.entries:
            if entry.name == name:
                if entry.state is Usage.CONSUMED:
                    raise ValueError(f"'{name}' is already consumed")
                entry = replace(entry, state=Usage.CONSUMED, site=site)
            out.append(entry)
        return UsageContext(tuple(out))

    def drop(self, name: str) -> UsageContext:
        return UsageContext(tuple(e for e in self.entries if e.name != name))

    def merge(self, other: UsageContext) -> UsageContext:
        """Join of two residuals computed from the same input (additive rules)."""
        out = []
        for entry in self.entries:
            theirs = other.lookup(entry.name)
            if entry.state is Usage.FRESH and theirs is not None and theirs.state is Usage.CONSUMED:
                entry = theirs
            out.append(entry)
        return UsageContext(tuple(out))
