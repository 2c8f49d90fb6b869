"""Semantic values, their canonical order and their text form."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Iterable, Iterator, TypeVar, Union

from inicalc.errors import IncomparableValue
from inicalc.syntax.ast import Layer, Term

T = TypeVar("T")


@dataclass(frozen=True)
class BoolV:
    value: bool


@dataclass(frozen=True)
class NameV:
    """A generated name. Non-negative indices are local to the enclosing
    name-model value; negative ones are atoms of a bind still in progress."""
    index: int


@dataclass(frozen=True)
class PairV:
    first: SemValue
    second: SemValue


@dataclass(frozen=True)
class TagV:
    index: int
    value: SemValue


@dataclass(frozen=True)
class ClosV:
    param: str
    body: Term
    env: tuple[tuple[str, SemValue], ...]
    layer: Layer

    def environment(self) -> dict[str, SemValue]:
        return dict(self.env)


@dataclass(frozen=True)
class MonV:
    value: Any  # Dist | PSet | NameVal


SemValue = Union[BoolV, NameV, PairV, TagV, ClosV, MonV]

TT = BoolV(True)
FF = BoolV(False)


# ── Canonical order ────────────────────────────────────────────────
# Constructor tag first, then lexicographic; tt sorts before ff.

def value_key(v: SemValue) -> tuple:
    match v:
        case BoolV(b):
            return (0, 0 if b else 1)
        case NameV(i):
            return (1, i)
        case PairV(a, b):
            return (2, value_key(a), value_key(b))
        case TagV(i, inner):
            return (3, i, value_key(inner))
        case MonV(m):
            return (4, m.sort_key())
        case ClosV():
            raise IncomparableValue("closures have no canonical order")
    raise TypeError(f"not a value: {v!r}")


def canonical_order(items: Iterable[T], key: Callable[[T], SemValue]) -> list[T]:
    """Sort by canonical value order; closures keep insertion order."""
    items = list(items)
    try:
        return sorted(items, key=lambda item: value_key(key(item)))
    except IncomparableValue:
        return items


def iter_values(v: SemValue) -> Iterator[SemValue]:
    yield v
    match v:
        case PairV(a, b):
            yield from iter_values(a)
            yield from iter_values(b)
        case TagV(_, inner):
            yield from iter_values(inner)
        case ClosV(env=env):
            for _, bound in env:
                yield from iter_values(bound)
        case MonV(m):
            for inner in m.payloads():
                yield from iter_values(inner)


def contains_closure(v: SemValue) -> bool:
    return any(isinstance(inner, ClosV) for inner in iter_values(v))


def ensure_first_order(v: SemValue) -> None:
    if contains_closure(v):
        raise IncomparableValue("cannot compare values containing closures")


# ── Names ──────────────────────────────────────────────────────────

def name_order(v: SemValue) -> list[int]:
    """Name indices in first-use order of a left-to-right traversal."""
    seen: dict[int, None] = {}
    for inner in iter_values(v):
        if isinstance(inner, NameV):
            seen.setdefault(inner.index, None)
    return list(seen)


def rename_names(v: SemValue, mapping: dict[int, int]) -> SemValue:
    match v:
        case NameV(i):
            return NameV(mapping.get(i, i))
        case BoolV():
            return v
        case PairV(a, b):
            return PairV(rename_names(a, mapping), rename_names(b, mapping))
        case TagV(i, inner):
            return TagV(i, rename_names(inner, mapping))
        case ClosV(param, body, env, layer):
            return ClosV(param, body, tuple((n, rename_names(b, mapping)) for n, b in env), layer)
        case MonV():
            return v
    raise TypeError(f"not a value: {v!r}")


# ── Text form ──────────────────────────────────────────────────────

def show_value(v: SemValue) -> str:
    match v:
        case BoolV(b):
            return "tt" if b else "ff"
        case NameV(i):
            return f"n{i}" if i >= 0 else f"a{-i}"
        case PairV(a, b):
            return f"({show_value(a)},{show_value(b)})"
        case TagV(i, inner):
            return f"{'inl' if i == 1 else 'inr'} {show_value(inner)}"
        case ClosV(param=param):
            return f"<fn {param}>"
        case MonV(m):
            return f"M{m.show()}"
    raise TypeError(f"not a value: {v!r}")
