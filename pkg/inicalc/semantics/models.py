"""Commutative effect models: finite distributions, finite powerset, name generation."""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from contextvars import ContextVar
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Iterable, Union

from inicalc.errors import PrimUnknown, UsageError
from inicalc.primitives import PRIMITIVES, effect_primitives
from inicalc.semantics.values import (
    FF, TT, NameV, PairV, SemValue, canonical_order, ensure_first_order,
    name_order, rename_names, show_value, value_key,
)

logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)


class ModelId(str, Enum):
    DIST = "dist"
    PSET = "pset"
    NAME = "name"


# ── Monadic values ─────────────────────────────────────────────────

@dataclass(frozen=True)
class Dist:
    """Finite distribution with exact weights, in canonical key order."""
    entries: tuple[tuple[SemValue, Fraction], ...]

    @classmethod
    def of(cls, pairs: Iterable[tuple[SemValue, Fraction]]) -> Dist:
        acc: dict[SemValue, Fraction] = {}
        for value, weight in pairs:
            acc[value] = acc.get(value, Fraction(0)) + Fraction(weight)
        items = [(v, w) for v, w in acc.items() if w != 0]
        if any(w < 0 for _, w in items):
            raise ValueError("negative probability weight")
        total = sum((w for _, w in items), Fraction(0))
        if total != 1:
            raise ValueError(f"weights sum to {total}, not 1")
        return cls(tuple(canonical_order(items, key=lambda item: item[0])))

    @classmethod
    def point(cls, value: SemValue) -> Dist:
        return cls(((value, Fraction(1)),))

    def weight(self, value: SemValue) -> Fraction:
        for v, w in self.entries:
            if v == value:
                return w
        return Fraction(0)

    def support(self) -> tuple[SemValue, ...]:
        return tuple(v for v, _ in self.entries)

    payloads = support

    def sort_key(self) -> tuple:
        return (0, tuple((value_key(v), w) for v, w in self.entries))

    def show(self) -> str:
        return "{" + ", ".join(f"{show_value(v)}: {w}" for v, w in self.entries) + "}"


@dataclass(frozen=True)
class PSet:
    """Finite set of values, deduplicated and canonically ordered."""
    elements: tuple[SemValue, ...]

    @classmethod
    def of(cls, values: Iterable[SemValue]) -> PSet:
        unique = list(dict.fromkeys(values))
        return cls(tuple(canonical_order(unique, key=lambda v: v)))

    def support(self) -> tuple[SemValue, ...]:
        return self.elements

    payloads = support

    def sort_key(self) -> tuple:
        return (1, tuple(value_key(v) for v in self.elements))

    def show(self) -> str:
        return "{" + ", ".join(show_value(v) for v in self.elements) + "}"


@dataclass(frozen=True)
class NameVal:
    """``count`` generated names and a payload over indices ``0 .. count-1``."""
    count: int
    payload: SemValue

    def canonical(self) -> NameVal:
        used = [i for i in name_order(self.payload) if 0 <= i < self.count]
        unused = sorted(set(range(self.count)) - set(used))
        mapping = {old: new for new, old in enumerate(used + unused)}
        return NameVal(self.count, rename_names(self.payload, mapping))

    def local_names(self) -> frozenset[int]:
        return frozenset(i for i in name_order(self.payload) if 0 <= i < self.count)

    def trimmed(self) -> NameVal:
        """Canonical form with the names the payload never mentions dropped;
        generating a name nobody looks at is unobservable."""
        canon = self.canonical()
        return NameVal(len(canon.local_names()), canon.payload)

    def support(self) -> tuple[SemValue, ...]:
        return (self.payload,)

    payloads = support

    def sort_key(self) -> tuple:
        return (2, self.count, value_key(self.payload))

    def show(self) -> str:
        return f"<{self.count} names: {show_value(self.payload)}>"


MonadicValue = Union[Dist, PSet, NameVal]
Kleisli = Callable[[SemValue], MonadicValue]


# ── Models ─────────────────────────────────────────────────────────

class EffectModel(ABC):
    model_id: ModelId

    def __init__(self) -> None:
        self.effects: dict[str, Callable[[], MonadicValue]] = {
            name: getattr(self, f"prim_{name}") for name in effect_primitives(self.model_id.value)
        }

    def provides(self, op: str) -> bool:
        spec = PRIMITIVES.get(op)
        return spec is not None and (spec.model is None or spec.model == self.model_id.value)

    def primitive(self, op: str) -> MonadicValue:
        try:
            return self.effects[op]()
        except KeyError:
            raise PrimUnknown(f"primitive '{op}' is not provided by the {self.model_id.value} model") from None

    @abstractmethod
    def unit(self, value: SemValue) -> MonadicValue: ...

    @abstractmethod
    def bind(self, m: MonadicValue, f: Kleisli) -> MonadicValue: ...

    @abstractmethod
    def support(self, m: MonadicValue) -> tuple[SemValue, ...]: ...

    @abstractmethod
    def value_eq(self, a: MonadicValue, b: MonadicValue) -> bool: ...

    def map(self, m: MonadicValue, f: Callable[[SemValue], SemValue]) -> MonadicValue:
        return self.bind(m, lambda v: self.unit(f(v)))

    def pair_product(self, m1: MonadicValue, m2: MonadicValue) -> MonadicValue:
        return self.bind(m1, lambda a: self.bind(m2, lambda b: self.unit(PairV(a, b))))

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.model_id.value}>"


class DistModel(EffectModel):
    model_id = ModelId.DIST

    def unit(self, value: SemValue) -> Dist:
        return Dist.point(value)

    def bind(self, m: Dist, f: Kleisli) -> Dist:
        return Dist.of(
            (value, weight * inner)
            for value0, weight in m.entries
            for value, inner in f(value0).entries
        )

    def pair_product(self, m1: Dist, m2: Dist) -> Dist:
        return Dist.of(
            (PairV(a, b), wa * wb) for a, wa in m1.entries for b, wb in m2.entries
        )

    def support(self, m: Dist) -> tuple[SemValue, ...]:
        return m.support()

    def value_eq(self, a: Dist, b: Dist) -> bool:
        for v in a.support() + b.support():
            ensure_first_order(v)
        return dict(a.entries) == dict(b.entries)

    def prim_coin(self) -> Dist:
        return Dist.of([(TT, HALF), (FF, HALF)])


class PSetModel(EffectModel):
    model_id = ModelId.PSET

    def unit(self, value: SemValue) -> PSet:
        return PSet((value,))

    def bind(self, m: PSet, f: Kleisli) -> PSet:
        return PSet.of(v for value in m.elements for v in f(value).elements)

    def pair_product(self, m1: PSet, m2: PSet) -> PSet:
        return PSet.of(PairV(a, b) for a in m1.elements for b in m2.elements)

    def support(self, m: PSet) -> tuple[SemValue, ...]:
        return m.elements

    def value_eq(self, a: PSet, b: PSet) -> bool:
        for v in a.elements + b.elements:
            ensure_first_order(v)
        return frozenset(a.elements) == frozenset(b.elements)

    def prim_amb(self) -> PSet:
        return PSet.of([TT, FF])


# Nesting depth of open binds. Atoms of a bind are only live while its
# continuation runs, so binds at the same depth never overlap.
_bind_depth: ContextVar[int] = ContextVar("name_bind_depth", default=0)


def _atom(depth: int, i: int) -> int:
    """Negative atom for name i opened at the given depth (Cantor pairing, injective)."""
    return -(1 + (depth + i) * (depth + i + 1) // 2 + i)


class NameModel(EffectModel):
    """Name generation up to injective renaming.

    While a bind runs, the names of the first computation are opened as
    negative atoms so the continuation can neither confuse them with its
    own fresh names nor with names of an enclosing computation.
    """

    model_id = ModelId.NAME

    def unit(self, value: SemValue) -> NameVal:
        return NameVal(0, value)

    def bind(self, m: NameVal, f: Kleisli) -> NameVal:
        depth = _bind_depth.get()
        opened = {i: _atom(depth, i) for i in range(m.count)}
        token = _bind_depth.set(depth + 1)
        try:
            inner = f(rename_names(m.payload, opened))
        finally:
            _bind_depth.reset(token)
        closing = {atom: inner.count + i for i, atom in opened.items()}
        return NameVal(inner.count + m.count, rename_names(inner.payload, closing)).canonical()

    def pair_product(self, m1: NameVal, m2: NameVal) -> NameVal:
        shifted = rename_names(m2.payload, {i: i + m1.count for i in range(m2.count)})
        return NameVal(m1.count + m2.count, PairV(m1.payload, shifted)).canonical()

    def support(self, m: NameVal) -> tuple[SemValue, ...]:
        return (m.payload,)

    def value_eq(self, a: NameVal, b: NameVal) -> bool:
        ensure_first_order(a.payload)
        ensure_first_order(b.payload)
        return a.trimmed() == b.trimmed()

    def prim_fresh(self) -> NameVal:
        return NameVal(1, NameV(0))


_MODELS: dict[ModelId, type[EffectModel]] = {
    ModelId.DIST: DistModel,
    ModelId.PSET: PSetModel,
    ModelId.NAME: NameModel,
}


def get_model(model_id: Union[str, ModelId]) -> EffectModel:
    try:
        return _MODELS[ModelId(model_id)]()
    except ValueError:
        raise UsageError(f"unknown model '{model_id}' (expected dist, pset or name)") from None
