"""Embeddings of the one-level language into the two-level one.

``translate_t`` sends the arrow-free fragment into the sharing layer, where
both products become the sharing product. ``translate_t_prime`` sends the
multiplicative fragment into the independent layer, where every Bool
becomes a box ``M Bool``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional

from inicalc.checker.checker import check_ini
from inicalc.errors import NotInFragment, UnsupportedType
from inicalc.semantics.evaluator import eval_erased, eval_ini, eval_ni
from inicalc.semantics.models import EffectModel, get_model
from inicalc.syntax.ast import (
    BOOL, WILDCARD, App, BoolT, Case, Const, Inj, Lam, Layer, Let, LetTensor,
    Lolli, Modal, PairShared, PairTensor, PrimOp, Prod, Proj, Sample, Tensor,
    Term, TypeExpr, Var, bound_names, children, contains_arrow, free_vars,
    fresh_name, relayer,
)
from inicalc.syntax.printer import show_type

logger = logging.getLogger(__name__)


class FragmentTag(str, Enum):
    ARROW_FREE = "ArrowFree"
    MULTIPLICATIVE = "Multiplicative"


# ── Fragments ──────────────────────────────────────────────────────

def _nodes(t: Term) -> Iterable[Term]:
    yield t
    for child in children(t):
        yield from _nodes(child)


def _type_has_prod(ty: TypeExpr) -> bool:
    match ty:
        case Prod():
            return True
        case Tensor(a, b) | Lolli(a, b):
            return _type_has_prod(a) or _type_has_prod(b)
    return False


def _is_arrow_free(t: Term) -> bool:
    return not any(isinstance(n, (Lam, App)) for n in _nodes(t))


def _is_multiplicative(t: Term) -> bool:
    for n in _nodes(t):
        if isinstance(n, (PairShared, Proj)):
            return False
        if isinstance(n, Lam) and _type_has_prod(n.annotation):
            return False
    return True


def fragments(t: Term) -> tuple[FragmentTag, ...]:
    """Every fragment ``t`` belongs to, preferred one first."""
    if any(isinstance(n, (Inj, Case, Sample)) for n in _nodes(t)):
        return ()
    out = []
    if _is_arrow_free(t):
        out.append(FragmentTag.ARROW_FREE)
    if _is_multiplicative(t):
        out.append(FragmentTag.MULTIPLICATIVE)
    return tuple(out)


def classify_fragment(t: Term) -> Optional[FragmentTag]:
    """The preferred fragment of ``t``, or None when it is in neither."""
    tags = fragments(t)
    return tags[0] if tags else None


def _require(t: Term, tag: FragmentTag) -> None:
    if tag not in fragments(t):
        raise NotInFragment(f"term is not in the {tag.value} fragment")


# ── Types ──────────────────────────────────────────────────────────

def translate_type_t(ty: TypeExpr) -> TypeExpr:
    match ty:
        case BoolT():
            return BOOL
        case Prod(a, b) | Tensor(a, b):
            return Prod(translate_type_t(a), translate_type_t(b))
    raise NotInFragment(f"{show_type(ty)} is not an arrow-free type")


def translate_type_t_prime(ty: TypeExpr) -> TypeExpr:
    match ty:
        case BoolT():
            return Modal(BOOL)
        case Tensor(a, b):
            return Tensor(translate_type_t_prime(a), translate_type_t_prime(b))
        case Lolli(a, b):
            return Lolli(translate_type_t_prime(a), translate_type_t_prime(b))
    raise NotInFragment(f"{show_type(ty)} is not a multiplicative type")


# ── Terms ──────────────────────────────────────────────────────────

def _t(t: Term) -> Term:
    match t:
        case Var() | Const() | PrimOp():
            return t
        case PairShared(a, b) | PairTensor(a, b):
            return PairShared(_t(a), _t(b), span=t.span)
        case Proj(index, body):
            return Proj(index, _t(body), span=t.span)
        case Let(x, bound, body):
            return Let(x, _t(bound), _t(body), span=t.span)
        case LetTensor(x, y, bound, body):
            # let x (x) y = s in u  ~>  let p = s in let x = fst p in let y = snd p in u
            inner = _t(body)
            p = fresh_name("p", free_vars(inner) | bound_names(inner) | {x, y})
            if y != WILDCARD:
                inner = Let(y, Proj(2, Var(p)), inner)
            if x != WILDCARD:
                inner = Let(x, Proj(1, Var(p)), inner)
            return Let(p, _t(bound), inner, span=t.span)
    raise NotInFragment(f"{type(t).__name__} has no sharing-layer image")


def _t_prime(t: Term) -> Term:
    match t:
        case Var():
            return t
        case Const() | PrimOp():
            return Sample((), (), relayer(t, Layer.NI), span=t.span)
        case PairTensor(a, b):
            return PairTensor(_t_prime(a), _t_prime(b), span=t.span)
        case LetTensor(x, y, bound, body):
            return LetTensor(x, y, _t_prime(bound), _t_prime(body), span=t.span)
        case Lam(x, annotation, body):
            return Lam(x, translate_type_t_prime(annotation), _t_prime(body), span=t.span)
        case App(fn, arg):
            return App(_t_prime(fn), _t_prime(arg), span=t.span)
        case Let(x, bound, body):
            return Let(x, _t_prime(bound), _t_prime(body), span=t.span)
    raise NotInFragment(f"{type(t).__name__} has no independent-layer image")


def translate_t(t: Term, ty: TypeExpr) -> tuple[Term, TypeExpr]:
    _require(t, FragmentTag.ARROW_FREE)
    return relayer(_t(t), Layer.NI), translate_type_t(ty)


def translate_t_prime(t: Term, ty: TypeExpr) -> tuple[Term, TypeExpr]:
    _require(t, FragmentTag.MULTIPLICATIVE)
    return relayer(_t_prime(t), Layer.I), translate_type_t_prime(ty)


def translate(t: Term, ty: TypeExpr, which: FragmentTag) -> tuple[Term, TypeExpr]:
    if which is FragmentTag.ARROW_FREE:
        return translate_t(t, ty)
    return translate_t_prime(t, ty)


def translate_context(ctx: dict[str, TypeExpr], which: FragmentTag) -> dict[str, TypeExpr]:
    convert = translate_type_t if which is FragmentTag.ARROW_FREE else translate_type_t_prime
    return {name: convert(ty) for name, ty in ctx.items()}


# ── Full abstraction ───────────────────────────────────────────────

@dataclass(frozen=True)
class PairVerdict:
    source_equal: bool
    target_equal: bool

    @property
    def holds(self) -> bool:
        return self.source_equal == self.target_equal


def _source_type(t: Term, model: EffectModel) -> TypeExpr:
    result = check_ini({}, t, model=model)
    if not result.ok:
        raise result.error
    return result.type


def target_meaning(model: EffectModel, t: Term, ty: TypeExpr, which: FragmentTag):
    """Meaning of the translation of a closed source term."""
    image, image_ty = translate(t, ty, which)
    if which is FragmentTag.ARROW_FREE:
        return eval_ni(model, {}, image)
    return eval_erased(model, {}, image, image_ty)


def check_full_abstraction(
    pairs: Iterable[tuple[Term, Term]],
    which: FragmentTag,
    model: EffectModel | None = None,
) -> list[PairVerdict]:
    """Source equality against target equality, one verdict per pair."""
    model = model or get_model("dist")
    verdicts = []
    for left, right in pairs:
        ty = _source_type(left, model)
        if _source_type(right, model) != ty:
            raise UnsupportedType("both terms of a pair need the same type")
        if contains_arrow(ty):
            raise UnsupportedType(f"{show_type(ty)} is not observable")
        source_equal = model.value_eq(eval_ini(model, {}, left), eval_ini(model, {}, right))
        target_equal = model.value_eq(
            target_meaning(model, left, ty, which),
            target_meaning(model, right, ty, which),
        )
        verdict = PairVerdict(source_equal, target_equal)
        if not verdict.holds:
            logger.warning("full abstraction violated (source %s, target %s)", source_equal, target_equal)
        verdicts.append(verdict)
    return verdicts
