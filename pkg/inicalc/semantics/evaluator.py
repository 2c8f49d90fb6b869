"""Denotational evaluators.

``eval_ini`` and ``eval_ni`` compute Kleisli meanings: a closed term denotes
one monadic value. ``eval_i`` is the two-level semantics of the independent
layer, where only boxes are monadic and a tensor pair is a plain pair of
values. ``eval_erased`` collapses the independent layer back into a single
monadic computation so the two can be compared.
"""

from __future__ import annotations

import logging
from typing import Mapping

from inicalc.errors import IncomparableValue, UnsupportedType, UsageError
from inicalc.primitives import PRIMITIVES
from inicalc.semantics.models import EffectModel, MonadicValue
from inicalc.semantics.values import (
    BoolV, ClosV, MonV, PairV, SemValue, TagV, contains_closure,
)
from inicalc.syntax.ast import (
    WILDCARD, App, Case, Const, Inj, Lam, Layer, Let, LetTensor, PairShared,
    PairTensor, PrimOp, Proj, Sample, Term, Var, contains_arrow, free_vars,
)

logger = logging.getLogger(__name__)

Env = Mapping[str, SemValue]


def _extend(env: Env, *bindings: tuple[str, SemValue]) -> dict[str, SemValue]:
    out = dict(env)
    for name, value in bindings:
        if name != WILDCARD:
            out[name] = value
    return out


def _closure(param: str, body: Term, env: Env, layer: Layer) -> ClosV:
    wanted = free_vars(body) - {param}
    return ClosV(param, body, tuple((n, v) for n, v in env.items() if n in wanted), layer)


def _branch(scrutinee: SemValue) -> tuple[int, SemValue]:
    """Which case branch runs and what its binder sees (Bool is 1 + 1)."""
    match scrutinee:
        case TagV(index, value):
            return index, value
        case BoolV(b):
            return (1 if b else 2), scrutinee
    raise TypeError(f"case on a non-sum value {scrutinee!r}")


# ── Kleisli semantics (one-level language and sharing layer) ───────

def _kleisli(model: EffectModel, env: Env, t: Term) -> MonadicValue:
    match t:
        case Var(name):
            return model.unit(env[name])
        case Const(b):
            return model.unit(BoolV(b))
        case PrimOp(op, args):
            if not args:
                return model.primitive(op)
            apply = PRIMITIVES[op].apply
            return model.bind(_kleisli(model, env, args[0]), lambda v: model.unit(apply(v)))
        case PairShared(a, b) | PairTensor(a, b):
            return model.bind(
                _kleisli(model, env, a),
                lambda va: model.bind(_kleisli(model, env, b), lambda vb: model.unit(PairV(va, vb))),
            )
        case Proj(index, body):
            return model.map(_kleisli(model, env, body), lambda p: p.first if index == 1 else p.second)
        case LetTensor(x, y, bound, body):
            return model.bind(
                _kleisli(model, env, bound),
                lambda p: _kleisli(model, _extend(env, (x, p.first), (y, p.second)), body),
            )
        case Inj(index, body):
            return model.map(_kleisli(model, env, body), lambda v: TagV(index, v))
        case Case(scrutinee, x, left, y, right):
            def choose(v: SemValue) -> MonadicValue:
                index, inner = _branch(v)
                if index == 1:
                    return _kleisli(model, _extend(env, (x, inner)), left)
                return _kleisli(model, _extend(env, (y, inner)), right)

            return model.bind(_kleisli(model, env, scrutinee), choose)
        case Lam(x, _, body):
            return model.unit(_closure(x, body, env, t.layer))
        case App(fn, arg):
            return model.bind(
                _kleisli(model, env, fn),
                lambda f: model.bind(
                    _kleisli(model, env, arg),
                    lambda a: _kleisli(model, _extend(f.environment(), (f.param, a)), f.body),
                ),
            )
        case Let(x, bound, body):
            return model.bind(
                _kleisli(model, env, bound),
                lambda v: _kleisli(model, _extend(env, (x, v)), body),
            )
        case Sample():
            raise UnsupportedType("sample has no one-level meaning")
    raise TypeError(f"not a term: {t!r}")


def eval_ini(model: EffectModel, env: Mapping[str, MonadicValue], t: Term) -> MonadicValue:
    """Meaning of ``t`` where every free variable is bound to a computation.

    The environment is sampled first, in context order, and the body is then
    evaluated against the sampled values.
    """
    names = list(env)

    def sample_from(k: int, sampled: dict[str, SemValue]) -> MonadicValue:
        if k == len(names):
            return _kleisli(model, sampled, t)
        name = names[k]
        return model.bind(env[name], lambda v: sample_from(k + 1, {**sampled, name: v}))

    return sample_from(0, {})


def eval_ni(model: EffectModel, env: Env, t: Term) -> MonadicValue:
    return _kleisli(model, env, t)


# ── Two-level semantics (independent layer) ────────────────────────

def _unnest(value: SemValue, n: int) -> list[SemValue]:
    """Split a left-nested tuple ``((v1, v2), v3)`` into ``[v1, v2, v3]``."""
    out: list[SemValue] = []
    for _ in range(n - 1):
        out.append(value.second)
        value = value.first
    out.append(value)
    return out[::-1]


def _sample(model: EffectModel, boxes: list[MonadicValue], names: tuple[str, ...], body: Term) -> MonadicValue:
    if not boxes:
        return _kleisli(model, {}, body)
    joint = boxes[0]
    for box in boxes[1:]:
        joint = model.pair_product(joint, box)
    n = len(boxes)
    return model.bind(joint, lambda v: _kleisli(model, _extend({}, *zip(names, _unnest(v, n))), body))


def eval_i(model: EffectModel, env: Env, t: Term) -> SemValue:
    match t:
        case Var(name):
            return env[name]
        case PairTensor(a, b):
            return PairV(eval_i(model, env, a), eval_i(model, env, b))
        case LetTensor(x, y, bound, body):
            p = eval_i(model, env, bound)
            return eval_i(model, _extend(env, (x, p.first), (y, p.second)), body)
        case Inj(index, body):
            return TagV(index, eval_i(model, env, body))
        case Case(scrutinee, x, left, y, right):
            index, inner = _branch(eval_i(model, env, scrutinee))
            if index == 1:
                return eval_i(model, _extend(env, (x, inner)), left)
            return eval_i(model, _extend(env, (y, inner)), right)
        case Lam(x, _, body):
            return _closure(x, body, env, Layer.I)
        case App(fn, arg):
            f = eval_i(model, env, fn)
            a = eval_i(model, env, arg)
            return eval_i(model, _extend(f.environment(), (f.param, a)), f.body)
        case Let(x, bound, body):
            return eval_i(model, _extend(env, (x, eval_i(model, env, bound))), body)
        case Sample(args, names, body):
            boxes = [eval_i(model, env, a).value for a in args]
            return MonV(_sample(model, boxes, names, body))
        case Const() | PrimOp() | PairShared() | Proj():
            raise UnsupportedType("sharing-layer term outside a sample body")
    raise TypeError(f"not a term: {t!r}")


# ── Erasure ────────────────────────────────────────────────────────

def _erased(model: EffectModel, env: Env, t: Term) -> MonadicValue:
    match t:
        case Var(name):
            return model.unit(env[name])
        case PairTensor(a, b):
            return model.pair_product(_erased(model, env, a), _erased(model, env, b))
        case LetTensor(x, y, bound, body):
            return model.bind(
                _erased(model, env, bound),
                lambda p: _erased(model, _extend(env, (x, p.first), (y, p.second)), body),
            )
        case Inj(index, body):
            return model.map(_erased(model, env, body), lambda v: TagV(index, v))
        case Case(scrutinee, x, left, y, right):
            def choose(v: SemValue) -> MonadicValue:
                index, inner = _branch(v)
                if index == 1:
                    return _erased(model, _extend(env, (x, inner)), left)
                return _erased(model, _extend(env, (y, inner)), right)

            return model.bind(_erased(model, env, scrutinee), choose)
        case Lam(x, _, body):
            return model.unit(_closure(x, body, env, Layer.I))
        case App(fn, arg):
            return model.bind(
                _erased(model, env, fn),
                lambda f: model.bind(
                    _erased(model, env, arg),
                    lambda a: _erased(model, _extend(f.environment(), (f.param, a)), f.body),
                ),
            )
        case Let(x, bound, body):
            return model.bind(
                _erased(model, env, bound),
                lambda v: _erased(model, _extend(env, (x, v)), body),
            )
        case Sample(args, names, body):
            def run(k: int, bound: dict[str, SemValue]) -> MonadicValue:
                if k == len(args):
                    return _kleisli(model, bound, body)
                return model.bind(
                    _erased(model, env, args[k]),
                    lambda v: run(k + 1, _extend(bound, (names[k], v))),
                )

            return run(0, {})
        case Const() | PrimOp() | PairShared() | Proj():
            raise UnsupportedType("sharing-layer term outside a sample body")
    raise TypeError(f"not a term: {t!r}")


def eval_erased(model: EffectModel, env: Env, t: Term, observed=None) -> MonadicValue:
    """One joint computation for an independent-layer term.

    ``env`` binds erased values, i.e. the payloads boxes would contain.
    ``observed`` is the static type of ``t`` when known; arrows are refused.
    """
    if observed is not None and contains_arrow(observed):
        raise UnsupportedType("erased evaluation needs a first-order result type")
    result = _erased(model, env, t)
    if any(contains_closure(v) for v in model.support(result)):
        raise UnsupportedType("erased result contains a function")
    return result


# ── Programs and value comparison ──────────────────────────────────

def evaluate_program(source, model: EffectModel, erased: bool = False):
    """Evaluate declarations in order, then the main term.

    One-level and sharing-layer declarations denote computations that are
    sampled before the main term runs; independent-layer declarations
    denote plain values (or, erased, computations as well).
    """
    layer = source.layer
    for decl in source.declarations:
        if decl.term is None:
            raise UsageError(f"'{decl.name}' is an abstract parameter and has no value")

    if layer is Layer.I and not erased:
        env: dict[str, SemValue] = {}
        for decl in source.declarations:
            env[decl.name] = eval_i(model, env, decl.term)
        return eval_i(model, env, source.main)

    evaluate = _erased if layer is Layer.I else _kleisli
    names = [d.name for d in source.declarations]

    def run(k: int, env: dict[str, SemValue]) -> MonadicValue:
        if k == len(names):
            result = evaluate(model, env, source.main)
            if erased and any(contains_closure(v) for v in model.support(result)):
                raise UnsupportedType("erased result contains a function")
            return result
        decl = source.declarations[k]
        return model.bind(evaluate(model, env, decl.term), lambda v: run(k + 1, {**env, names[k]: v}))

    logger.debug("evaluating %s program in the %s model", layer.value, model.model_id.value)
    return run(0, {})


def values_equal(model: EffectModel, a: SemValue, b: SemValue) -> bool:
    """Structural equality of independent-layer values, boxes up to value_eq."""
    match a, b:
        case MonV(m1), MonV(m2):
            return model.value_eq(m1, m2)
        case PairV(a1, a2), PairV(b1, b2):
            return values_equal(model, a1, b1) and values_equal(model, a2, b2)
        case TagV(i, v), TagV(j, w):
            return i == j and values_equal(model, v, w)
        case (ClosV(), _) | (_, ClosV()):
            raise IncomparableValue("cannot compare functions")
    return a == b