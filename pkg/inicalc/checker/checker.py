"""Syntax-directed typecheckers for the one-level language and both layers of
the two-level language.

Affine judgments thread a UsageContext through the premises: every rule
receives the context left over by the premise before it, so a variable
consumed on the left of a tensor or an application is no longer available
on the right. Additive rules check their premises against the same input
and merge the residuals.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterator, Mapping, Optional, Union

from inicalc.checker.context import UsageContext, Usage
from inicalc.errors import TypeCheckError
from inicalc.primitives import INI_PRIMITIVES, PRIMITIVES
from inicalc.syntax.ast import (
    BOOL, WILDCARD, App, Case, Const, Inj, Lam, Layer, Let, LetTensor, Lolli,
    Modal, PairShared, PairTensor, PrimOp, Prod, Proj, Sample, Span, Sum,
    Tensor, Term, TypeExpr, Var, bound_names, free_vars, fresh_name,
    is_i_type, is_ini_type, is_ni_type, mentions_name, rename,
)
from inicalc.syntax.printer import show_type

logger = logging.getLogger(__name__)

ContextLike = Union[UsageContext, Mapping[str, TypeExpr], None]


class TypeErrorKind(str, Enum):
    UNBOUND_VAR = "UnboundVar"
    REUSED_VAR = "ReusedVar"
    SHARED_ACROSS_TENSOR = "SharedAcrossTensor"
    LAYER_MISMATCH = "LayerMismatch"
    MISMATCH = "Mismatch"
    NON_FUNCTION_APPLIED = "NonFunctionApplied"
    BAD_SAMPLE_ARITY = "BadSampleArity"
    PRIM_UNKNOWN = "PrimUnknown"


# ── Rule names ─────────────────────────────────────────────────────

INI_RULES = frozenset({
    "Const", "Coin", "Var", "Prod-Intro", "Prod-Elim1", "Prod-Elim2",
    "Tensor-Intro", "Tensor-Elim", "Abstraction", "Application",
})
NI_RULES = frozenset({
    "Const", "Primitive", "Var", "Let", "Prod-Intro", "Prod-Elim1",
    "Prod-Elim2", "Sum-Intro1", "Sum-Intro2", "Sum-Elim",
})
I_RULES = frozenset({
    "Var", "Operations", "Abstraction", "Application", "Tensor-Intro",
    "Tensor-Elim", "Sum-Intro1", "Sum-Intro2", "Sum-Elim", "Sample",
})
RULES = {Layer.INI: INI_RULES, Layer.NI: NI_RULES, Layer.I: I_RULES}


@dataclass(frozen=True)
class RuleUse:
    rule: str
    layer: Layer
    span: Span

    def to_dict(self) -> dict:
        return {"rule": self.rule, "layer": self.layer.value, "span": self.span.to_dict()}


@dataclass(frozen=True)
class TypingResult:
    type: Optional[TypeExpr]
    trace: tuple[RuleUse, ...] = ()
    error: Optional[TypeCheckError] = None
    context: Optional[UsageContext] = None  # residual context on success

    @property
    def ok(self) -> bool:
        return self.error is None


def _error(kind: TypeErrorKind, t: Term, explanation: str, **extra) -> TypeCheckError:
    return TypeCheckError(kind.value, t.span, explanation, **extra)


# ── Checker ────────────────────────────────────────────────────────

class Checker:
    """One checking run; collects the derivation trace in visiting order."""

    def __init__(self, model=None) -> None:
        self.model = model
        self.trace: list[RuleUse] = []

    def _rule(self, name: str, t: Term, layer: Layer) -> None:
        self.trace.append(RuleUse(name, layer, t.span))

    # ── shared helpers ─────────────────────────────────────────────

    def expect(self, t: Term, ty: TypeExpr, expected: TypeExpr | None) -> TypeExpr:
        if expected is not None and ty != expected:
            raise _error(
                TypeErrorKind.MISMATCH, t,
                f"expected {show_type(expected)} but found {show_type(ty)}",
            )
        return ty

    def check_annotation(self, t: Term, ty: TypeExpr, layer: Layer) -> None:
        valid = {Layer.INI: is_ini_type, Layer.NI: is_ni_type, Layer.I: is_i_type}[layer]
        if not valid(ty):
            raise _error(
                TypeErrorKind.LAYER_MISMATCH, t,
                f"{show_type(ty)} is not a type of the {layer.value} layer",
            )
        self.check_names_allowed(t, ty)

    def check_names_allowed(self, t: Term, ty: TypeExpr) -> None:
        if self.model is not None and mentions_name(ty) and not self.model.provides("fresh"):
            raise _error(
                TypeErrorKind.MISMATCH, t,
                f"type Name needs the name model, not {self.model.model_id.value}",
            )

    def check_primitive(self, t: PrimOp, layer: Layer):
        spec = PRIMITIVES.get(t.op)
        if spec is None:
            raise _error(TypeErrorKind.PRIM_UNKNOWN, t, f"unknown primitive '{t.op}'")
        if layer is Layer.I:
            raise _error(
                TypeErrorKind.LAYER_MISMATCH, t,
                f"'{t.op}' belongs to the sharing layer; box it with sample",
            )
        if layer is Layer.INI and t.op not in INI_PRIMITIVES:
            raise _error(TypeErrorKind.LAYER_MISMATCH, t, f"'{t.op}' is not part of the one-level language")
        if self.model is not None and not self.model.provides(t.op):
            raise _error(
                TypeErrorKind.PRIM_UNKNOWN, t,
                f"primitive '{t.op}' is not provided by the {self.model.model_id.value} model",
            )
        arity = 0 if spec.arg is None else 1
        if len(t.args) != arity:
            raise _error(TypeErrorKind.MISMATCH, t, f"'{t.op}' takes {arity} argument(s)")
        return spec

    def bind(self, ctx: UsageContext, name: str, ty: TypeExpr, body: Term) -> tuple[UsageContext, str, Term]:
        """Enter a binder; a name already in scope is freshened in ``body``."""
        if name == WILDCARD:
            return ctx, name, body
        if name in ctx:
            new = fresh_name(name, ctx.names() | free_vars(body) | bound_names(body))
            body = rename(body, name, new)
            name = new
        return ctx.extend(name, ty), name, body

    @staticmethod
    def leave(ctx: UsageContext, *names: str) -> UsageContext:
        for name in names:
            if name != WILDCARD:
                ctx = ctx.drop(name)
        return ctx

    def use(self, ctx: UsageContext, t: Var) -> tuple[TypeExpr, UsageContext]:
        entry = ctx.lookup(t.name)
        if entry is None:
            raise _error(TypeErrorKind.UNBOUND_VAR, t, f"unbound variable '{t.name}'")
        if entry.state is Usage.CONSUMED:
            raise _error(
                TypeErrorKind.REUSED_VAR, t,
                f"'{t.name}' is used again here after its use at {entry.site}",
                variable=t.name, sites=(entry.site, t.span),
            )
        return entry.type, ctx.consume(t.name, t.span)

    def then(
        self,
        before: UsageContext,
        mid: UsageContext,
        check: Callable[[UsageContext], tuple[TypeExpr, UsageContext]],
    ) -> tuple[TypeExpr, UsageContext]:
        """Check the second premise of a multiplicative rule."""
        try:
            return check(mid)
        except TypeCheckError as e:
            name = e.variable
            if (
                e.kind == TypeErrorKind.REUSED_VAR.value
                and name is not None
                and before.is_fresh(name)
                and not mid.is_fresh(name)
            ):
                raise TypeCheckError(
                    TypeErrorKind.SHARED_ACROSS_TENSOR.value, e.span,
                    f"'{name}' is needed by both premises of a separating rule "
                    f"(first use at {e.sites[0]})",
                    variable=name, sites=e.sites,
                ) from None
            raise

    # ── one-level language ─────────────────────────────────────────

    def ini(self, ctx: UsageContext, t: Term, expected: TypeExpr | None = None) -> tuple[TypeExpr, UsageContext]:
        L = Layer.INI
        match t:
            case Var():
                self._rule("Var", t, L)
                ty, ctx = self.use(ctx, t)
            case Const():
                self._rule("Const", t, L)
                ty = BOOL
            case PrimOp():
                self.check_primitive(t, L)
                self._rule("Coin", t, L)
                ty = BOOL
            case PairShared(a, b):
                self._rule("Prod-Intro", t, L)
                ea, eb = (expected.left, expected.right) if isinstance(expected, Prod) else (None, None)
                ta, c1 = self.ini(ctx, a, ea)
                tb, c2 = self.ini(ctx, b, eb)
                ty, ctx = Prod(ta, tb), c1.merge(c2)
            case Proj(index, body):
                self._rule(f"Prod-Elim{index}", t, L)
                tb, ctx = self.ini(ctx, body)
                if not isinstance(tb, Prod):
                    raise _error(TypeErrorKind.MISMATCH, body, f"projection from {show_type(tb)}, not a product")
                ty = tb.left if index == 1 else tb.right
            case PairTensor(a, b):
                self._rule("Tensor-Intro", t, L)
                ea, eb = (expected.left, expected.right) if isinstance(expected, Tensor) else (None, None)
                ta, mid = self.ini(ctx, a, ea)
                tb, out = self.then(ctx, mid, lambda c: self.ini(c, b, eb))
                ty, ctx = Tensor(ta, tb), out
            case LetTensor(x, y, bound, body):
                self._rule("Tensor-Elim", t, L)
                tb, mid = self.ini(ctx, bound)
                if not isinstance(tb, Tensor):
                    raise _error(TypeErrorKind.MISMATCH, bound, f"let (x) needs a tensor, found {show_type(tb)}")

                def rest(c: UsageContext) -> tuple[TypeExpr, UsageContext]:
                    c, x2, inner = self.bind(c, x, tb.left, body)
                    c, y2, inner = self.bind(c, y, tb.right, inner)
                    ty, out = self.ini(c, inner, expected)
                    return ty, self.leave(out, x2, y2)

                ty, ctx = self.then(ctx, mid, rest)
            case Lam(x, annotation, body):
                self._rule("Abstraction", t, L)
                self.check_annotation(t, annotation, L)
                c, x2, inner = self.bind(ctx, x, annotation, body)
                tr, out = self.ini(c, inner, expected.result if isinstance(expected, Lolli) else None)
                ty, ctx = Lolli(annotation, tr), self.leave(out, x2)
            case App(fn, arg):
                self._rule("Application", t, L)
                tf, mid = self.ini(ctx, fn)
                if not isinstance(tf, Lolli):
                    raise _error(TypeErrorKind.NON_FUNCTION_APPLIED, fn, f"applying a value of type {show_type(tf)}")
                _, ctx = self.then(ctx, mid, lambda c: self.ini(c, arg, tf.param))
                ty = tf.result
            case Let(x, bound, body):
                # let x = t in u is (fn x => u) t
                self._rule("Application", t, L)
                self._rule("Abstraction", t, L)
                tb, mid = self.ini(ctx, bound)

                def rest(c: UsageContext) -> tuple[TypeExpr, UsageContext]:
                    c, x2, inner = self.bind(c, x, tb, body)
                    ty, out = self.ini(c, inner, expected)
                    return ty, self.leave(out, x2)

                ty, ctx = self.then(ctx, mid, rest)
            case Inj() | Case() | Sample():
                raise _error(TypeErrorKind.LAYER_MISMATCH, t, "this construct does not exist in the one-level language")
            case _:
                raise TypeError(f"not a term: {t!r}")
        return self.expect(t, ty, expected), ctx

    # ── sharing layer ──────────────────────────────────────────────

    def ni(self, ctx: UsageContext, t: Term, expected: TypeExpr | None = None) -> TypeExpr:
        L = Layer.NI
        match t:
            case Var(name):
                self._rule("Var", t, L)
                entry = ctx.lookup(name)
                if entry is None:
                    raise _error(TypeErrorKind.UNBOUND_VAR, t, f"unbound variable '{name}'")
                ty = entry.type
            case Const():
                self._rule("Const", t, L)
                ty = BOOL
            case PrimOp(_, args):
                spec = self.check_primitive(t, L)
                self._rule("Primitive", t, L)
                if args:
                    self.ni(ctx, args[0], spec.arg)
                ty = spec.result
            case PairShared(a, b):
                self._rule("Prod-Intro", t, L)
                ea, eb = (expected.left, expected.right) if isinstance(expected, Prod) else (None, None)
                ty = Prod(self.ni(ctx, a, ea), self.ni(ctx, b, eb))
            case Proj(index, body):
                self._rule(f"Prod-Elim{index}", t, L)
                tb = self.ni(ctx, body)
                if not isinstance(tb, Prod):
                    raise _error(TypeErrorKind.MISMATCH, body, f"projection from {show_type(tb)}, not a product")
                ty = tb.left if index == 1 else tb.right
            case Inj(index, body, other):
                self._rule(f"Sum-Intro{index}", t, L)
                ty, _ = self._inj(ctx, t, index, body, other, expected, L)
            case Case(scrutinee, x, left, y, right):
                self._rule("Sum-Elim", t, L)
                ts = self.ni(ctx, scrutinee)
                if isinstance(ts, Sum):
                    ta, tb = ts.left, ts.right
                elif ts == BOOL:
                    ta, tb = BOOL, BOOL
                else:
                    raise _error(TypeErrorKind.MISMATCH, scrutinee, f"case on {show_type(ts)}, not a sum")
                cl, _, left = self.bind(ctx, x, ta, left)
                tl = self.ni(cl, left, expected)
                cr, _, right = self.bind(ctx, y, tb, right)
                tr = self.ni(cr, right, tl)
                ty = tl
                del tr
            case Let(x, bound, body):
                self._rule("Let", t, L)
                tb = self.ni(ctx, bound)
                c, _, inner = self.bind(ctx, x, tb, body)
                ty = self.ni(c, inner, expected)
            case PairTensor() | LetTensor() | Lam() | App() | Sample():
                raise _error(
                    TypeErrorKind.LAYER_MISMATCH, t,
                    "this construct belongs to the independent layer, not the sharing layer",
                )
            case _:
                raise TypeError(f"not a term: {t!r}")
        return self.expect(t, ty, expected)

    def _inj(self, ctx, t: Inj, index: int, body: Term, other, expected, layer: Layer):
        if other is not None:
            self.check_annotation(t, other, layer)
        elif isinstance(expected, Sum):
            other = expected.right if index == 1 else expected.left
        else:
            raise _error(
                TypeErrorKind.MISMATCH, t,
                f"cannot infer the other summand; write {'inl' if index == 1 else 'inr'}[T]",
            )
        inner_expected = None
        if isinstance(expected, Sum):
            inner_expected = expected.left if index == 1 else expected.right
        if layer is Layer.NI:
            inner = self.ni(ctx, body, inner_expected)
            return (Sum(inner, other) if index == 1 else Sum(other, inner)), None
        inner, out = self.i(ctx, body, inner_expected)
        return (Sum(inner, other) if index == 1 else Sum(other, inner)), out

    # ── independent layer ──────────────────────────────────────────

    def i(self, ctx: UsageContext, t: Term, expected: TypeExpr | None = None) -> tuple[TypeExpr, UsageContext]:
        L = Layer.I
        match t:
            case Var():
                self._rule("Var", t, L)
                ty, ctx = self.use(ctx, t)
            case PairTensor(a, b):
                self._rule("Tensor-Intro", t, L)
                ea, eb = (expected.left, expected.right) if isinstance(expected, Tensor) else (None, None)
                ta, mid = self.i(ctx, a, ea)
                tb, ctx = self.then(ctx, mid, lambda c: self.i(c, b, eb))
                ty = Tensor(ta, tb)
            case LetTensor(x, y, bound, body):
                self._rule("Tensor-Elim", t, L)
                tb, mid = self.i(ctx, bound)
                if not isinstance(tb, Tensor):
                    raise _error(TypeErrorKind.MISMATCH, bound, f"let (x) needs a tensor, found {show_type(tb)}")

                def rest(c: UsageContext) -> tuple[TypeExpr, UsageContext]:
                    c, x2, inner = self.bind(c, x, tb.left, body)
                    c, y2, inner = self.bind(c, y, tb.right, inner)
                    ty, out = self.i(c, inner, expected)
                    return ty, self.leave(out, x2, y2)

                ty, ctx = self.then(ctx, mid, rest)
            case Inj(index, body, other):
                self._rule(f"Sum-Intro{index}", t, L)
                ty, ctx = self._inj(ctx, t, index, body, other, expected, L)
            case Case(scrutinee, x, left, y, right):
                self._rule("Sum-Elim", t, L)
                ts, mid = self.i(ctx, scrutinee)
                if isinstance(ts, Modal):
                    raise _error(
                        TypeErrorKind.LAYER_MISMATCH, scrutinee,
                        f"case analysis on the boxed {show_type(ts)}; its result is only reachable through sample",
                    )
                if not isinstance(ts, Sum):
                    raise _error(TypeErrorKind.MISMATCH, scrutinee, f"case on {show_type(ts)}, not a sum")

                def branch(c: UsageContext, name: str, ty_in: TypeExpr, body: Term, exp):
                    c, name2, inner = self.bind(c, name, ty_in, body)
                    ty_out, out = self.i(c, inner, exp)
                    return ty_out, self.leave(out, name2)

                tl, c1 = self.then(ctx, mid, lambda c: branch(c, x, ts.left, left, expected))
                tr, c2 = self.then(ctx, mid, lambda c: branch(c, y, ts.right, right, tl))
                ty, ctx = tl, c1.merge(c2)
                del tr
            case Lam(x, annotation, body):
                self._rule("Abstraction", t, L)
                self.check_annotation(t, annotation, L)
                c, x2, inner = self.bind(ctx, x, annotation, body)
                tr, out = self.i(c, inner, expected.result if isinstance(expected, Lolli) else None)
                ty, ctx = Lolli(annotation, tr), self.leave(out, x2)
            case App(fn, arg):
                self._rule("Application", t, L)
                tf, mid = self.i(ctx, fn)
                if not isinstance(tf, Lolli):
                    raise _error(TypeErrorKind.NON_FUNCTION_APPLIED, fn, f"applying a value of type {show_type(tf)}")
                _, ctx = self.then(ctx, mid, lambda c: self.i(c, arg, tf.param))
                ty = tf.result
            case Let(x, bound, body):
                self._rule("Application", t, L)
                self._rule("Abstraction", t, L)
                tb, mid = self.i(ctx, bound)

                def rest(c: UsageContext) -> tuple[TypeExpr, UsageContext]:
                    c, x2, inner = self.bind(c, x, tb, body)
                    ty, out = self.i(c, inner, expected)
                    return ty, self.leave(out, x2)

                ty, ctx = self.then(ctx, mid, rest)
            case Sample(args, names, body):
                self._rule("Sample", t, L)
                if len(args) != len(names):
                    raise _error(
                        TypeErrorKind.BAD_SAMPLE_ARITY, t,
                        f"sample binds {len(names)} name(s) for {len(args)} computation(s)",
                    )
                inner_types = []
                start = ctx
                for k, arg in enumerate(args):
                    if k == 0:
                        ta, ctx = self.i(ctx, arg)
                    else:
                        ta, ctx = self.then(start, ctx, lambda c, arg=arg: self.i(c, arg))
                    if not isinstance(ta, Modal):
                        raise _error(TypeErrorKind.MISMATCH, arg, f"sample needs a boxed computation, found {show_type(ta)}")
                    inner_types.append(ta.inner)
                body_ctx = UsageContext.of(
                    (name, ty_in) for name, ty_in in zip(names, inner_types) if name != WILDCARD
                )
                inner_expected = expected.inner if isinstance(expected, Modal) else None
                ty = Modal(self.ni(body_ctx, body, inner_expected))
            case Const() | PrimOp() | PairShared() | Proj():
                raise _error(
                    TypeErrorKind.LAYER_MISMATCH, t,
                    "a sharing-layer term in independent position; box it with sample",
                )
            case _:
                raise TypeError(f"not a term: {t!r}")
        return self.expect(t, ty, expected), ctx


# ── Public entry points ────────────────────────────────────────────

def _run(layer: Layer, ctx: ContextLike, t: Term, expected: TypeExpr | None, model) -> TypingResult:
    checker = Checker(model)
    context = UsageContext.coerce(ctx)
    try:
        if expected is not None:
            checker.check_names_allowed(t, expected)
        if layer is Layer.NI:
            ty, out = checker.ni(context, t, expected), context
        elif layer is Layer.I:
            ty, out = checker.i(context, t, expected)
        else:
            ty, out = checker.ini(context, t, expected)
    except TypeCheckError as e:
        logger.debug("rejected %s term: %s", layer.value, e)
        return TypingResult(None, error=e)
    return TypingResult(ty, tuple(checker.trace), context=out)


def check_ini(ctx: ContextLike, t: Term, expected: TypeExpr | None = None, model=None) -> TypingResult:
    return _run(Layer.INI, ctx, t, expected, model)


def check_ni(ctx: ContextLike, t: Term, expected: TypeExpr | None = None, model=None) -> TypingResult:
    return _run(Layer.NI, ctx, t, expected, model)


def check_i(ctx: ContextLike, t: Term, expected: TypeExpr | None = None, model=None) -> TypingResult:
    return _run(Layer.I, ctx, t, expected, model)


def check_layer(layer: Layer, ctx: ContextLike, t: Term, expected: TypeExpr | None = None, model=None) -> TypingResult:
    return _run(layer, ctx, t, expected, model)


def check_program(source, model=None) -> TypingResult:
    """Check every declaration body, then the main term under the declarations."""
    layer = source.layer
    checker = Checker(model)
    bindings = []
    for decl in source.declarations:
        probe = decl.term if decl.term is not None else source.main
        try:
            checker.check_annotation(probe, decl.type, layer)
        except TypeCheckError as e:
            return TypingResult(None, error=e)
        if decl.term is not None:
            result = check_layer(layer, {}, decl.term, decl.type, model)
            if not result.ok:
                return result
        bindings.append((decl.name, decl.type))
    return check_layer(layer, bindings, source.main, None, model)


# ── Derivation replay ──────────────────────────────────────────────

def _expected_rules(t: Term, layer: Layer) -> tuple[str, ...]:
    match t:
        case Var():
            return ("Var",)
        case Const():
            return ("Const",)
        case PrimOp():
            return ("Coin",) if layer is Layer.INI else ("Primitive",)
        case PairShared():
            return ("Prod-Intro",)
        case Proj(index, _):
            return (f"Prod-Elim{index}",)
        case PairTensor():
            return ("Tensor-Intro",)
        case LetTensor():
            return ("Tensor-Elim",)
        case Inj(index, _):
            return (f"Sum-Intro{index}",)
        case Case():
            return ("Sum-Elim",)
        case Lam():
            return ("Abstraction",)
        case App():
            return ("Application",)
        case Let():
            return ("Let",) if layer is Layer.NI else ("Application", "Abstraction")
        case Sample():
            return ("Sample",)
    raise TypeError(f"not a term: {t!r}")


def _premises(t: Term, layer: Layer) -> list[tuple[Term, Layer]]:
    match t:
        case Sample(args, _, body):
            return [(a, layer) for a in args] + [(body, Layer.NI)]
        case PrimOp(_, args):
            return [(a, layer) for a in args]
        case Var() | Const():
            return []
        case PairShared(a, b) | PairTensor(a, b) | App(a, b):
            return [(a, layer), (b, layer)]
        case Proj(_, body) | Inj(_, body) | Lam(_, _, body):
            return [(body, layer)]
        case LetTensor(_, _, bound, body) | Let(_, bound, body):
            return [(bound, layer), (body, layer)]
        case Case(s, _, left, _, right):
            return [(s, layer), (left, layer), (right, layer)]
    raise TypeError(f"not a term: {t!r}")


def replay_trace(t: Term, trace: tuple[RuleUse, ...], layer: Layer) -> bool:
    """True iff ``trace`` is the pre-order derivation of ``t`` built from
    rules of the right layer, each admissible for its node."""
    entries: Iterator[RuleUse] = iter(trace)

    def walk(node: Term, node_layer: Layer) -> bool:
        for rule in _expected_rules(node, node_layer):
            use = next(entries, None)
            if use is None or use.rule != rule or use.layer is not node_layer:
                return False
            if rule not in RULES[node_layer]:
                return False
        return all(walk(child, child_layer) for child, child_layer in _premises(node, node_layer))

    return walk(t, layer) and next(entries, None) is None
