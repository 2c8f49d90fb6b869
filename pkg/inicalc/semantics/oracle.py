"""Exact factorization checks: does a joint computation over pairs equal the
product of its marginals?"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from inicalc.checker.checker import check_i, check_ini
from inicalc.errors import NotAPairSupport, UnsupportedType, UsageError
from inicalc.semantics.evaluator import eval_erased, eval_i, eval_ini
from inicalc.semantics.models import (
    Dist, EffectModel, ModelId, MonadicValue, NameVal, PSet,
)
from inicalc.semantics.values import MonV, PairV, canonical_order, name_order, rename_names
from inicalc.syntax.ast import Modal, Tensor, Term, TypeExpr, contains_arrow
from inicalc.syntax.printer import show_type

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Witness:
    pair: PairV
    joint: Fraction
    product: Fraction


@dataclass(frozen=True)
class FactorizationReport:
    is_product: bool
    marginal1: MonadicValue
    marginal2: MonadicValue
    witness: Optional[Witness] = None
    # name model only
    name_overlap: frozenset[int] = field(default_factory=frozenset)
    recombination_equal: Optional[bool] = None
    # independent-layer checks only
    joint: Optional[MonadicValue] = None


def _pairs(m: EffectModel, joint: MonadicValue) -> tuple[PairV, ...]:
    support = m.support(joint)
    for v in support:
        if not isinstance(v, PairV):
            raise NotAPairSupport(f"support value {v!r} is not a pair")
    return support


# ── Marginals ──────────────────────────────────────────────────────

def _restrict(component, names: list[int]) -> NameVal:
    """The component as a computation generating only `names`, renumbered from 0."""
    return NameVal(len(names), rename_names(component, {old: new for new, old in enumerate(names)})).canonical()


def _name_marginals(joint: NameVal) -> tuple[NameVal, NameVal]:
    pair = joint.payload
    first = [i for i in name_order(pair.first) if 0 <= i < joint.count]
    second = [i for i in name_order(pair.second) if 0 <= i < joint.count]
    unused = [i for i in range(joint.count) if i not in first and i not in second]
    return _restrict(pair.first, first + unused), _restrict(pair.second, second)


def marginals(m: EffectModel, joint: MonadicValue) -> tuple[MonadicValue, MonadicValue]:
    """Project a joint computation over pairs onto its two components.

    In the name model each marginal generates exactly the names its
    component mentions; a name used by both appears in both marginals, so
    recombining them no longer reproduces the joint.
    """
    pairs = _pairs(m, joint)
    match joint:
        case Dist():
            return (
                Dist.of((p.first, w) for p, w in joint.entries),
                Dist.of((p.second, w) for p, w in joint.entries),
            )
        case PSet():
            return PSet.of(p.first for p in pairs), PSet.of(p.second for p in pairs)
        case NameVal():
            return _name_marginals(joint)
    raise TypeError(f"not a monadic value: {joint!r}")


# ── Factorization ──────────────────────────────────────────────────

def _check_dist(joint: Dist, mu1: Dist, mu2: Dist) -> FactorizationReport:
    # Prefer a pair the joint never produces: it is the clearest witness.
    mismatches = []
    for a, wa in mu1.entries:
        for b, wb in mu2.entries:
            pair = PairV(a, b)
            observed = joint.weight(pair)
            if observed != wa * wb:
                mismatches.append(Witness(pair, observed, wa * wb))
    if not mismatches:
        return FactorizationReport(True, mu1, mu2)
    zero = [w for w in mismatches if w.joint == 0]
    return FactorizationReport(False, mu1, mu2, witness=(zero or mismatches)[0])


def _check_pset(joint: PSet, s1: PSet, s2: PSet) -> FactorizationReport:
    members = frozenset(joint.elements)
    for a in s1.elements:
        for b in s2.elements:
            pair = PairV(a, b)
            if pair not in members:
                return FactorizationReport(False, s1, s2, witness=Witness(pair, Fraction(0), Fraction(1)))
    return FactorizationReport(True, s1, s2)


def _check_name(m: EffectModel, joint: NameVal, n1: NameVal, n2: NameVal) -> FactorizationReport:
    pair = joint.payload
    overlap = frozenset(name_order(pair.first)) & frozenset(name_order(pair.second))
    recombined = m.pair_product(n1, n2)
    equal = m.value_eq(joint, recombined)
    return FactorizationReport(
        not overlap and equal, n1, n2,
        name_overlap=overlap, recombination_equal=equal,
    )


def check_factorization(m: EffectModel, joint: MonadicValue) -> FactorizationReport:
    mu1, mu2 = marginals(m, joint)
    match joint:
        case Dist():
            report = _check_dist(joint, mu1, mu2)
        case PSet():
            report = _check_pset(joint, mu1, mu2)
        case NameVal():
            report = _check_name(m, joint, mu1, mu2)
        case _:
            raise TypeError(f"not a monadic value: {joint!r}")
    if not report.is_product:
        logger.debug("joint does not factorize: %s", report.witness or sorted(report.name_overlap))
    return report


# ── Soundness checks on programs ───────────────────────────────────

def _observable(ty: TypeExpr) -> None:
    if contains_arrow(ty):
        raise UnsupportedType(f"{show_type(ty)} has a function component; factorization is not observable")


def check_tensor_soundness_ini(m: EffectModel, t: Term) -> FactorizationReport:
    result = check_ini({}, t, model=m)
    if not result.ok:
        raise result.error
    if not isinstance(result.type, Tensor):
        raise UsageError(f"not a tensor type: {show_type(result.type)}")
    _observable(result.type)
    return check_factorization(m, eval_ini(m, {}, t))


def check_tensor_soundness_i(m: EffectModel, t: Term) -> FactorizationReport:
    """Compare the erased joint with the product of the two boxes."""
    result = check_i({}, t, model=m)
    if not result.ok:
        raise result.error
    ty = result.type
    if not (isinstance(ty, Tensor) and isinstance(ty.left, Modal) and isinstance(ty.right, Modal)):
        raise UsageError(f"not a tensor of boxes: {show_type(ty)}")
    _observable(ty)

    value = eval_i(m, {}, t)
    assert isinstance(value, PairV) and isinstance(value.first, MonV) and isinstance(value.second, MonV)
    mu1, mu2 = value.first.value, value.second.value
    joint = eval_erased(m, {}, t, ty)
    product = m.pair_product(mu1, mu2)
    equal = m.value_eq(joint, product)

    if m.model_id is ModelId.NAME:
        overlap = frozenset(name_order(joint.payload.first)) & frozenset(name_order(joint.payload.second))
        return FactorizationReport(
            equal and not overlap, mu1, mu2,
            name_overlap=overlap, recombination_equal=equal, joint=joint,
        )
    witness = None if equal else _first_difference(m, joint, product)
    return FactorizationReport(equal, mu1, mu2, witness=witness, joint=joint)


def _first_difference(m: EffectModel, joint: MonadicValue, product: MonadicValue) -> Optional[Witness]:
    match joint, product:
        case Dist(), Dist():
            for v in canonical_order(set(joint.support()) | set(product.support()), key=lambda v: v):
                if joint.weight(v) != product.weight(v):
                    return Witness(v, joint.weight(v), product.weight(v))
        case PSet(), PSet():
            for v in product.elements:
                if v not in joint.elements:
                    return Witness(v, Fraction(0), Fraction(1))
            for v in joint.elements:
                if v not in product.elements:
                    return Witness(v, Fraction(1), Fraction(0))
    return None
