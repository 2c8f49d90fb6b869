"""Brute-force declarative checker used as an oracle for the algorithmic one.

Instead of threading usage, every multiplicative rule enumerates the ways
of dividing the context between its premises. Variables needed by only one
premise go to that premise (weakening makes any other placement pointless);
every variable needed by several premises is tried on each side in turn.
Exponential, so only meant for small terms.
"""

from __future__ import annotations

import itertools
from typing import Callable, Mapping, Optional

from inicalc.checker.checker import Checker, TypeErrorKind, _error
from inicalc.checker.context import UsageContext
from inicalc.errors import TypeCheckError
from inicalc.syntax.ast import (
    BOOL, WILDCARD, App, Case, Const, Inj, Lam, Layer, Let, LetTensor, Lolli,
    Modal, PairShared, PairTensor, PrimOp, Prod, Proj, Sample, Sum, Tensor,
    Term, TypeExpr, Var, free_vars,
)
from inicalc.syntax.printer import show_type

Env = dict[str, TypeExpr]


def _with(env: Env, *bindings: tuple[str, TypeExpr]) -> Env:
    out = dict(env)
    for name, ty in bindings:
        if name != WILDCARD:
            out[name] = ty
    return out


def splits(env: Env, parts: list[frozenset[str]]) -> list[list[Env]]:
    """Every division of ``env`` among premises with the given free variables."""
    wanted = [p & env.keys() for p in parts]
    contested = sorted(
        name for name in env
        if sum(name in p for p in wanted) > 1
    )
    out = []
    for owners in itertools.product(range(len(parts)), repeat=len(contested)):
        owner = dict(zip(contested, owners))
        out.append([
            {
                name: ty for name, ty in env.items()
                if name in wanted[k] and owner.get(name, k) == k
            }
            for k in range(len(parts))
        ])
    return out


class _Declarative(Checker):

    def _split(self, env: Env, premises: list[Term], check: Callable[[list[Env]], TypeExpr]) -> TypeExpr:
        last: Optional[TypeCheckError] = None
        candidates = splits(env, [free_vars(p) for p in premises])
        for parts in candidates:
            try:
                return check(parts)
            except TypeCheckError as e:
                last = e
        assert last is not None
        raise last

    # ── one-level language ─────────────────────────────────────────

    def ini(self, env: Env, t: Term, expected: TypeExpr | None = None) -> tuple[TypeExpr, Env]:
        match t:
            case Var(name):
                if name not in env:
                    raise _error(TypeErrorKind.UNBOUND_VAR, t, f"'{name}' is not available here")
                ty = env[name]
            case Const():
                ty = BOOL
            case PrimOp():
                self.check_primitive(t, Layer.INI)
                ty = BOOL
            case PairShared(a, b):
                ea, eb = (expected.left, expected.right) if isinstance(expected, Prod) else (None, None)
                ty = Prod(self.ini(env, a, ea)[0], self.ini(env, b, eb)[0])
            case Proj(index, body):
                tb = self.ini(env, body)[0]
                if not isinstance(tb, Prod):
                    raise _error(TypeErrorKind.MISMATCH, body, f"projection from {show_type(tb)}")
                ty = tb.left if index == 1 else tb.right
            case PairTensor(a, b):
                ea, eb = (expected.left, expected.right) if isinstance(expected, Tensor) else (None, None)
                ty = self._split(env, [a, b], lambda p: Tensor(self.ini(p[0], a, ea)[0], self.ini(p[1], b, eb)[0]))
            case LetTensor(x, y, bound, body):
                def premises(p: list[Env]) -> TypeExpr:
                    tb = self.ini(p[0], bound)[0]
                    if not isinstance(tb, Tensor):
                        raise _error(TypeErrorKind.MISMATCH, bound, f"let (x) needs a tensor, found {show_type(tb)}")
                    return self.ini(_with(p[1], (x, tb.left), (y, tb.right)), body, expected)[0]

                ty = self._split(env, [bound, _scoped(body, x, y)], premises)
            case Lam(x, annotation, body):
                self.check_annotation(t, annotation, Layer.INI)
                tr = self.ini(_with(env, (x, annotation)), body, expected.result if isinstance(expected, Lolli) else None)[0]
                ty = Lolli(annotation, tr)
            case App(fn, arg):
                def premises(p: list[Env]) -> TypeExpr:
                    tf = self.ini(p[0], fn)[0]
                    if not isinstance(tf, Lolli):
                        raise _error(TypeErrorKind.NON_FUNCTION_APPLIED, fn, f"applying {show_type(tf)}")
                    self.ini(p[1], arg, tf.param)
                    return tf.result

                ty = self._split(env, [fn, arg], premises)
            case Let(x, bound, body):
                def premises(p: list[Env]) -> TypeExpr:
                    tb = self.ini(p[0], bound)[0]
                    return self.ini(_with(p[1], (x, tb)), body, expected)[0]

                ty = self._split(env, [bound, _scoped(body, x)], premises)
            case Inj() | Case() | Sample():
                raise _error(TypeErrorKind.LAYER_MISMATCH, t, "not part of the one-level language")
            case _:
                raise TypeError(f"not a term: {t!r}")
        return self.expect(t, ty, expected), env

    # ── independent layer ──────────────────────────────────────────

    def i(self, env: Env, t: Term, expected: TypeExpr | None = None) -> tuple[TypeExpr, Env]:
        match t:
            case Var(name):
                if name not in env:
                    raise _error(TypeErrorKind.UNBOUND_VAR, t, f"'{name}' is not available here")
                ty = env[name]
            case PairTensor(a, b):
                ea, eb = (expected.left, expected.right) if isinstance(expected, Tensor) else (None, None)
                ty = self._split(env, [a, b], lambda p: Tensor(self.i(p[0], a, ea)[0], self.i(p[1], b, eb)[0]))
            case LetTensor(x, y, bound, body):
                def premises(p: list[Env]) -> TypeExpr:
                    tb = self.i(p[0], bound)[0]
                    if not isinstance(tb, Tensor):
                        raise _error(TypeErrorKind.MISMATCH, bound, f"let (x) needs a tensor, found {show_type(tb)}")
                    return self.i(_with(p[1], (x, tb.left), (y, tb.right)), body, expected)[0]

                ty = self._split(env, [bound, _scoped(body, x, y)], premises)
            case Inj(index, body, other):
                ty, _ = self._inj(env, t, index, body, other, expected, Layer.I)
            case Case(scrutinee, x, left, y, right):
                def premises(p: list[Env]) -> TypeExpr:
                    ts = self.i(p[0], scrutinee)[0]
                    if isinstance(ts, Modal):
                        raise _error(TypeErrorKind.LAYER_MISMATCH, scrutinee, "case analysis on a boxed computation")
                    if not isinstance(ts, Sum):
                        raise _error(TypeErrorKind.MISMATCH, scrutinee, f"case on {show_type(ts)}")
                    tl = self.i(_with(p[1], (x, ts.left)), left, expected)[0]
                    self.i(_with(p[1], (y, ts.right)), right, tl)
                    return tl

                branches = PairShared(_scoped(left, x), _scoped(right, y))
                ty = self._split(env, [scrutinee, branches], premises)
            case Lam(x, annotation, body):
                self.check_annotation(t, annotation, Layer.I)
                tr = self.i(_with(env, (x, annotation)), body, expected.result if isinstance(expected, Lolli) else None)[0]
                ty = Lolli(annotation, tr)
            case App(fn, arg):
                def premises(p: list[Env]) -> TypeExpr:
                    tf = self.i(p[0], fn)[0]
                    if not isinstance(tf, Lolli):
                        raise _error(TypeErrorKind.NON_FUNCTION_APPLIED, fn, f"applying {show_type(tf)}")
                    self.i(p[1], arg, tf.param)
                    return tf.result

                ty = self._split(env, [fn, arg], premises)
            case Let(x, bound, body):
                def premises(p: list[Env]) -> TypeExpr:
                    tb = self.i(p[0], bound)[0]
                    return self.i(_with(p[1], (x, tb)), body, expected)[0]

                ty = self._split(env, [bound, _scoped(body, x)], premises)
            case Sample(args, names, body):
                if len(args) != len(names):
                    raise _error(TypeErrorKind.BAD_SAMPLE_ARITY, t, "binder count differs from argument count")

                def premises(p: list[Env]) -> TypeExpr:
                    inner = []
                    for part, arg in zip(p, args):
                        ta = self.i(part, arg)[0]
                        if not isinstance(ta, Modal):
                            raise _error(TypeErrorKind.MISMATCH, arg, f"sample needs a boxed computation, found {show_type(ta)}")
                        inner.append(ta.inner)
                    body_ctx = UsageContext.of((n, ty) for n, ty in zip(names, inner) if n != WILDCARD)
                    inner_expected = expected.inner if isinstance(expected, Modal) else None
                    return Modal(self.ni(body_ctx, body, inner_expected))

                ty = self._split(env, list(args), premises) if args else premises([])
            case Const() | PrimOp() | PairShared() | Proj():
                raise _error(TypeErrorKind.LAYER_MISMATCH, t, "a sharing-layer term in independent position")
            case _:
                raise TypeError(f"not a term: {t!r}")
        return self.expect(t, ty, expected), env


def _scoped(body: Term, *names: str) -> Term:
    """A stand-in whose free variables are those of ``body`` minus ``names``."""
    return Lam(names[0], BOOL, body) if len(names) == 1 else LetTensor(names[0], names[1], Const(True), body)


def declarative_type(
    ctx: Mapping[str, TypeExpr] | None,
    t: Term,
    layer: Layer,
    expected: TypeExpr | None = None,
    model=None,
) -> TypeExpr | None:
    """The type of ``t`` found by split enumeration, or None if untypable."""
    checker = _Declarative(model)
    env: Env = dict(ctx or {})
    try:
        if layer is Layer.NI:
            return checker.ni(UsageContext.of(env), t, expected)
        if layer is Layer.I:
            return checker.i(env, t, expected)[0]
        return checker.ini(env, t, expected)[0]
    except TypeCheckError:
        return None
