"""Primitive registry: signatures, providing model, and pure implementations."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from inicalc.semantics.values import BoolV, NameV, PairV, SemValue
from inicalc.syntax.ast import BOOL, NAME, Prod, TypeExpr


@dataclass(frozen=True)
class PrimSpec:
    name: str
    arg: TypeExpr | None          # None for nullary effects
    result: TypeExpr
    model: str | None = None      # model providing it; None = every model
    apply: Callable[[SemValue], SemValue] | None = None


def _bool_pair(fn: Callable[[bool, bool], bool]) -> Callable[[SemValue], SemValue]:
    def run(v: SemValue) -> SemValue:
        assert isinstance(v, PairV) and isinstance(v.first, BoolV) and isinstance(v.second, BoolV)
        return BoolV(fn(v.first.value, v.second.value))
    return run


def _not(v: SemValue) -> SemValue:
    assert isinstance(v, BoolV)
    return BoolV(not v.value)


def _eqn(v: SemValue) -> SemValue:
    assert isinstance(v, PairV) and isinstance(v.first, NameV) and isinstance(v.second, NameV)
    return BoolV(v.first.index == v.second.index)


BOOL_PAIR = Prod(BOOL, BOOL)

PRIMITIVES: dict[str, PrimSpec] = {
    "coin": PrimSpec("coin", None, BOOL, model="dist"),
    "amb": PrimSpec("amb", None, BOOL, model="pset"),
    "fresh": PrimSpec("fresh", None, NAME, model="name"),
    "not": PrimSpec("not", BOOL, BOOL, apply=_not),
    "and": PrimSpec("and", BOOL_PAIR, BOOL, apply=_bool_pair(lambda a, b: a and b)),
    "or": PrimSpec("or", BOOL_PAIR, BOOL, apply=_bool_pair(lambda a, b: a or b)),
    "xor": PrimSpec("xor", BOOL_PAIR, BOOL, apply=_bool_pair(lambda a, b: a != b)),
    "eqb": PrimSpec("eqb", BOOL_PAIR, BOOL, apply=_bool_pair(lambda a, b: a == b)),
    "eqn": PrimSpec("eqn", Prod(NAME, NAME), BOOL, model="name", apply=_eqn),
}

# The one-level language only knows coin; the independent layer has no
# primitive operations at all.
INI_PRIMITIVES = frozenset({"coin"})


def effect_primitives(model_id: str) -> tuple[str, ...]:
    return tuple(
        name for name, spec in PRIMITIVES.items()
        if spec.arg is None and spec.model == model_id
    )
