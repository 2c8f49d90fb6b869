"""Type-directed random generation of well-typed terms.

Generation mirrors the typing rules: every former is only proposed at a type
it can produce, and in the affine layers a usage context is threaded through
the premises exactly as the checker threads it. Dead ends (a depth that is
too small, no variable of the wanted type) backtrack into the next weighted
alternative. Every finished term is run through the checker anyway.
"""

from __future__ import annotations

import itertools
import logging
import random
from typing import Callable, Mapping, Optional, TypeVar

from inicalc.checker.checker import check_layer
from inicalc.checker.context import UsageContext
from inicalc.config import REUSE_PROBABILITY
from inicalc.errors import GenExhausted
from inicalc.harness.models import GenConfig
from inicalc.semantics.models import EffectModel, get_model
from inicalc.syntax.ast import (
    BOOL, NAME, NO_SPAN, WILDCARD, App, BoolT, Case, Const, Inj, Lam, Layer,
    Let, LetTensor, Lolli, Modal, NameT, PairShared, PairTensor, PrimOp, Prod,
    Proj, Sample, Sum, Tensor, Term, TypeExpr, Var, relayer,
    term_depth,
)
from inicalc.syntax.parser import parse_type
from inicalc.syntax.printer import show_term, show_type
from inicalc.translator import FragmentTag

logger = logging.getLogger(__name__)

T = TypeVar("T")

UNREACHABLE = 10**6

_BOOL_OPS = ("and", "or", "xor", "eqb")


class DeadEnd(Exception):
    """No term fits here; try the next alternative."""


class _OutOfBudget(DeadEnd):
    pass


class TermGenerator:
    def __init__(self, cfg: GenConfig, model: EffectModel | None = None) -> None:
        self.cfg = cfg
        self.model = model or get_model(cfg.model)
        self.rng = random.Random(cfg.seed)
        self.weights = cfg.weights.model_dump()
        self.fragment = cfg.fragment
        self.relaxed = cfg.relaxed
        self._steps = 0
        self._names = itertools.count()

    # ── Public API ─────────────────────────────────────────────────

    def term(
        self,
        layer: Layer,
        ty: TypeExpr,
        ctx: Mapping[str, TypeExpr] | None = None,
        depth: int | None = None,
    ) -> Term:
        """One term of type ``ty``, closed unless a context is given."""
        depth = depth or self.cfg.max_depth
        context = dict(ctx or {})
        for _ in range(self.cfg.max_attempts):
            self._steps = 0
            self._names = itertools.count()
            try:
                t = self._layer(layer, context, ty, depth)
            except DeadEnd:
                continue
            t = relayer(t, layer)
            if not self.relaxed:
                self._verify(layer, context, t, ty, depth)
            return t
        logger.warning("no %s term of type %s within depth %d", layer.value, show_type(ty), depth)
        raise GenExhausted(f"no {layer.value} term of type {show_type(ty)} within depth {depth}")

    def random_type(self, layer: Layer, size: int = 2, arrows: bool = True) -> TypeExpr:
        if layer is Layer.NI:
            return self._ni_type(size)
        if layer is Layer.I:
            return self._i_type(size, arrows)
        return self._ini_type(size, arrows)

    def observable_tensor(self, layer: Layer) -> TypeExpr:
        """A tensor type whose components can be compared after evaluation."""
        if layer is Layer.I:
            return Tensor(Modal(self._ni_type(self.rng.randint(1, 2))), Modal(self._ni_type(self.rng.randint(1, 2))))
        return Tensor(self._ini_type(self.rng.randint(1, 2), False), self._ini_type(self.rng.randint(1, 2), False))

    def shuffle(self, items: list[T]) -> list[T]:
        items = list(items)
        self.rng.shuffle(items)
        return items

    def coin_flip(self, p: float = 0.5) -> bool:
        return self.rng.random() < p

    # ── Types ──────────────────────────────────────────────────────

    def _names_allowed(self) -> bool:
        return self.model.provides("fresh")

    def _ini_type(self, size: int, arrows: bool = True) -> TypeExpr:
        if size <= 1:
            return BOOL
        kinds = ["bool", "tensor"]
        if self.fragment is not FragmentTag.MULTIPLICATIVE:
            kinds.append("prod")
        if arrows and self.fragment is not FragmentTag.ARROW_FREE:
            kinds.append("lolli")
        kind = self.rng.choice(kinds)
        if kind == "bool":
            return BOOL
        a, b = self._ini_type(size - 1, arrows), self._ini_type(size - 1, arrows)
        return {"tensor": Tensor, "prod": Prod, "lolli": Lolli}[kind](a, b)

    def _ni_type(self, size: int) -> TypeExpr:
        leaves = [BOOL, BOOL, NAME] if self._names_allowed() else [BOOL]
        if size <= 1:
            return self.rng.choice(leaves)
        kind = self.rng.choice(["leaf", "prod", "sum"])
        if kind == "leaf":
            return self.rng.choice(leaves)
        a, b = self._ni_type(size - 1), self._ni_type(size - 1)
        return Prod(a, b) if kind == "prod" else Sum(a, b)

    def _i_type(self, size: int, arrows: bool = True) -> TypeExpr:
        if size <= 1:
            return Modal(self._ni_type(self.rng.randint(1, 2)))
        kinds = ["modal", "tensor", "sum"] + (["lolli"] if arrows else [])
        kind = self.rng.choice(kinds)
        if kind == "modal":
            return Modal(self._ni_type(self.rng.randint(1, 2)))
        a, b = self._i_type(size - 1, arrows), self._i_type(size - 1, arrows)
        return {"tensor": Tensor, "sum": Sum, "lolli": Lolli}[kind](a, b)

    def min_depth(self, layer: Layer, ty: TypeExpr) -> int:
        """Smallest depth of a closed term of type ``ty``."""
        match layer, ty:
            case Layer.INI, BoolT():
                return 1
            case Layer.INI, Prod(a, b) | Tensor(a, b):
                return 1 + max(self.min_depth(layer, a), self.min_depth(layer, b))
            case Layer.INI, Lolli(_, b):
                return 1 + self.min_depth(layer, b)
            case Layer.NI, BoolT():
                return 1
            case Layer.NI, NameT():
                return 1 if self._names_allowed() else UNREACHABLE
            case Layer.NI, Prod(a, b):
                return 1 + max(self.min_depth(layer, a), self.min_depth(layer, b))
            case Layer.NI, Sum(a, b):
                return 1 + min(self.min_depth(layer, a), self.min_depth(layer, b))
            case Layer.I, Modal(inner):
                return 1 + self.min_depth(Layer.NI, inner)
            case Layer.I, Tensor(a, b):
                return 1 + max(self.min_depth(layer, a), self.min_depth(layer, b))
            case Layer.I, Sum(a, b):
                return 1 + min(self.min_depth(layer, a), self.min_depth(layer, b))
            case Layer.I, Lolli(_, b):
                return 1 + self.min_depth(layer, b)
        return UNREACHABLE

    def fitting_type(self, layer: Layer, depth: int, size: int = 2, arrows: bool = True) -> TypeExpr:
        """A random type of at most ``size`` that still fits in ``depth``."""
        for _ in range(8):
            ty = self.random_type(layer, self.rng.randint(1, size), arrows)
            if self.min_depth(layer, ty) <= depth:
                return ty
        raise DeadEnd

    # ── Search plumbing ────────────────────────────────────────────

    def _step(self) -> None:
        self._steps += 1
        if self._steps > self.cfg.budget:
            raise _OutOfBudget

    def _fresh(self, taken) -> str:
        while True:
            name = f"x{next(self._names)}"
            if name not in taken:
                return name

    def _choose(self, options: list[tuple[str, Callable[[], T]]]) -> T:
        """Try weighted alternatives in random order until one succeeds."""
        pool = [(self.weights[kind], build) for kind, build in options if self.weights[kind] > 0]
        while pool:
            total = sum(w for w, _ in pool)
            r = self.rng.random() * total
            index = len(pool) - 1
            for i, (w, _) in enumerate(pool):
                r -= w
                if r < 0:
                    index = i
                    break
            _, build = pool.pop(index)
            try:
                return build()
            except _OutOfBudget:
                raise
            except DeadEnd:
                continue
        raise DeadEnd

    def _layer(self, layer: Layer, ctx: dict[str, TypeExpr], ty: TypeExpr, depth: int) -> Term:
        if layer is Layer.NI:
            return self._ni(ctx, ty, depth)
        usage = UsageContext.of(ctx)
        if layer is Layer.I:
            return self._i(usage, ty, depth)[0]
        return self._ini(usage, ty, depth)[0]

    def _verify(self, layer: Layer, ctx: dict[str, TypeExpr], t: Term, ty: TypeExpr, depth: int) -> None:
        result = check_layer(layer, ctx, t, ty, self.model)
        if not result.ok:
            raise RuntimeError(f"generated an ill-typed term {show_term(t)}: {result.error}")
        if term_depth(t) > depth:
            raise RuntimeError(f"generated a term deeper than {depth}: {show_term(t)}")

    def _use(self, ctx: UsageContext, name: str) -> UsageContext:
        if self.relaxed and self.coin_flip(REUSE_PROBABILITY):
            return ctx
        return ctx.consume(name, NO_SPAN)

    def _available(self, ctx: UsageContext, ty: TypeExpr) -> list[str]:
        return [e.name for e in ctx.entries if e.type == ty and ctx.is_fresh(e.name)]

    def _var(self, ctx: UsageContext, ty: TypeExpr) -> tuple[Term, UsageContext]:
        names = self._available(ctx, ty)
        if not names:
            raise DeadEnd
        name = self.rng.choice(names)
        return Var(name), self._use(ctx, name)

    def _bind(self, ctx: UsageContext, ty: TypeExpr) -> tuple[str, UsageContext]:
        name = self._fresh(ctx.names())
        return name, ctx.extend(name, ty)

    # ── One-level language ─────────────────────────────────────────

    def _ini(self, ctx: UsageContext, ty: TypeExpr, d: int) -> tuple[Term, UsageContext]:
        self._step()
        if self.min_depth(Layer.INI, ty) > d and not self._available(ctx, ty):
            raise DeadEnd
        arrows = self.fragment is not FragmentTag.ARROW_FREE
        shared = self.fragment is not FragmentTag.MULTIPLICATIVE
        options: list[tuple[str, Callable]] = [("var", lambda: self._var(ctx, ty))]

        if ty == BOOL:
            options.append(("leaf", lambda: (Const(self.coin_flip()), ctx)))
            if self.model.provides("coin"):
                options.append(("prim", lambda: (PrimOp("coin"), ctx)))

        if d >= 2:
            match ty:
                case Prod(a, b) if shared:
                    def pair():
                        left, c1 = self._ini(ctx, a, d - 1)
                        right, c2 = self._ini(ctx, b, d - 1)
                        return PairShared(left, right), c1.merge(c2)
                    options.append(("intro", pair))
                case Tensor(a, b):
                    def tensor():
                        left, c1 = self._ini(ctx, a, d - 1)
                        right, c2 = self._ini(c1, b, d - 1)
                        return PairTensor(left, right), c2
                    options.append(("intro", tensor))
                case Lolli(a, b) if arrows:
                    def lam():
                        x, inner = self._bind(ctx, a)
                        body, out = self._ini(inner, b, d - 1)
                        return Lam(x, a, body), out.drop(x)
                    options.append(("intro", lam))

            def let():
                sigma = self.fitting_type(Layer.INI, d - 1)
                bound, c1 = self._ini(ctx, sigma, d - 1)
                x, inner = self._bind(c1, sigma)
                body, out = self._ini(inner, ty, d - 1)
                return Let(x, bound, body), out.drop(x)

            def let_tensor():
                sigma = Tensor(self.fitting_type(Layer.INI, d - 2), self.fitting_type(Layer.INI, d - 2))
                bound, c1 = self._ini(ctx, sigma, d - 1)
                x, inner = self._bind(c1, sigma.left)
                y, inner = self._bind(inner, sigma.right)
                body, out = self._ini(inner, ty, d - 1)
                return LetTensor(x, y, bound, body), out.drop(x).drop(y)

            options += [("let", let), ("let_tensor", let_tensor)]

            if shared:
                def proj():
                    sigma = self.fitting_type(Layer.INI, d - 2)
                    index = self.rng.choice((1, 2))
                    pair_ty = Prod(ty, sigma) if index == 1 else Prod(sigma, ty)
                    body, out = self._ini(ctx, pair_ty, d - 1)
                    return Proj(index, body), out
                options.append(("proj", proj))

            if arrows:
                def app():
                    sigma = self.fitting_type(Layer.INI, d - 1)
                    fn, c1 = self._ini(ctx, Lolli(sigma, ty), d - 1)
                    arg, c2 = self._ini(c1, sigma, d - 1)
                    return App(fn, arg), c2
                options.append(("app", app))

        return self._choose(options)

    # ── Sharing layer ──────────────────────────────────────────────

    def _ni(self, ctx: dict[str, TypeExpr], ty: TypeExpr, d: int) -> Term:
        self._step()
        matching = [name for name, t in ctx.items() if t == ty]
        if self.min_depth(Layer.NI, ty) > d and not matching:
            raise DeadEnd
        options: list[tuple[str, Callable]] = []
        if matching:
            options.append(("var", lambda: Var(self.rng.choice(matching))))

        if ty == BOOL:
            options.append(("leaf", lambda: Const(self.coin_flip())))
            for op in ("coin", "amb"):
                if self.model.provides(op):
                    options.append(("prim", lambda op=op: PrimOp(op)))
            if d >= 2:
                options.append(("prim", lambda: PrimOp("not", (self._ni(ctx, BOOL, d - 1),))))
                options.append(("prim", lambda: PrimOp(self.rng.choice(_BOOL_OPS), (self._ni(ctx, Prod(BOOL, BOOL), d - 1),))))
                if self._names_allowed():
                    options.append(("prim", lambda: PrimOp("eqn", (self._ni(ctx, Prod(NAME, NAME), d - 1),))))
        elif ty == NAME and self._names_allowed():
            options.append(("prim", lambda: PrimOp("fresh")))

        if d >= 2:
            match ty:
                case Prod(a, b):
                    options.append(("intro", lambda: PairShared(self._ni(ctx, a, d - 1), self._ni(ctx, b, d - 1))))
                case Sum(a, b):
                    options.append(("intro", lambda: Inj(1, self._ni(ctx, a, d - 1), other=b)))
                    options.append(("intro", lambda: Inj(2, self._ni(ctx, b, d - 1), other=a)))

            def let():
                sigma = self.fitting_type(Layer.NI, d - 1)
                bound = self._ni(ctx, sigma, d - 1)
                x = self._fresh(ctx)
                return Let(x, bound, self._ni({**ctx, x: sigma}, ty, d - 1))

            def proj():
                sigma = self.fitting_type(Layer.NI, d - 2)
                index = self.rng.choice((1, 2))
                pair_ty = Prod(ty, sigma) if index == 1 else Prod(sigma, ty)
                return Proj(index, self._ni(ctx, pair_ty, d - 1))

            def case():
                if self.coin_flip(0.4):
                    scrutinee = self._ni(ctx, BOOL, d - 1)
                    if self.coin_flip():
                        return Case(scrutinee, WILDCARD, self._ni(ctx, ty, d - 1), WILDCARD, self._ni(ctx, ty, d - 1))
                    left_ty = right_ty = BOOL
                else:
                    sigma = Sum(self.fitting_type(Layer.NI, d - 2), self.fitting_type(Layer.NI, d - 2))
                    scrutinee = self._ni(ctx, sigma, d - 1)
                    left_ty, right_ty = sigma.left, sigma.right
                x = self._fresh(ctx)
                y = self._fresh({**ctx, x: left_ty})
                left = self._ni({**ctx, x: left_ty}, ty, d - 1)
                right = self._ni({**ctx, y: right_ty}, ty, d - 1)
                return Case(scrutinee, x, left, y, right)

            options += [("let", let), ("proj", proj), ("case", case)]

        return self._choose(options)

    # ── Independent layer ──────────────────────────────────────────

    def _i(self, ctx: UsageContext, ty: TypeExpr, d: int) -> tuple[Term, UsageContext]:
        self._step()
        if self.min_depth(Layer.I, ty) > d and not self._available(ctx, ty):
            raise DeadEnd
        options: list[tuple[str, Callable]] = [("var", lambda: self._var(ctx, ty))]

        if d >= 2:
            match ty:
                case Modal(inner):
                    options.append(("sample", lambda: self._sample(ctx, inner, d)))
                case Tensor(a, b):
                    def tensor():
                        left, c1 = self._i(ctx, a, d - 1)
                        right, c2 = self._i(c1, b, d - 1)
                        return PairTensor(left, right), c2
                    options.append(("intro", tensor))
                case Sum(a, b):
                    def inl():
                        body, out = self._i(ctx, a, d - 1)
                        return Inj(1, body, other=b), out

                    def inr():
                        body, out = self._i(ctx, b, d - 1)
                        return Inj(2, body, other=a), out
                    options += [("intro", inl), ("intro", inr)]
                case Lolli(a, b):
                    def lam():
                        x, inner = self._bind(ctx, a)
                        body, out = self._i(inner, b, d - 1)
                        return Lam(x, a, body), out.drop(x)
                    options.append(("intro", lam))

            def let():
                sigma = self.fitting_type(Layer.I, d - 1)
                bound, c1 = self._i(ctx, sigma, d - 1)
                x, inner = self._bind(c1, sigma)
                body, out = self._i(inner, ty, d - 1)
                return Let(x, bound, body), out.drop(x)

            def let_tensor():
                sigma = Tensor(self.fitting_type(Layer.I, d - 2), self.fitting_type(Layer.I, d - 2))
                bound, c1 = self._i(ctx, sigma, d - 1)
                x, inner = self._bind(c1, sigma.left)
                y, inner = self._bind(inner, sigma.right)
                body, out = self._i(inner, ty, d - 1)
                return LetTensor(x, y, bound, body), out.drop(x).drop(y)

            def case():
                sigma = Sum(self.fitting_type(Layer.I, d - 2), self.fitting_type(Layer.I, d - 2))
                scrutinee, mid = self._i(ctx, sigma, d - 1)
                x, cl = self._bind(mid, sigma.left)
                left, c1 = self._i(cl, ty, d - 1)
                y, cr = self._bind(mid, sigma.right)
                right, c2 = self._i(cr, ty, d - 1)
                return Case(scrutinee, x, left, y, right), c1.drop(x).merge(c2.drop(y))

            def app():
                sigma = self.fitting_type(Layer.I, d - 1)
                fn, c1 = self._i(ctx, Lolli(sigma, ty), d - 1)
                arg, c2 = self._i(c1, sigma, d - 1)
                return App(fn, arg), c2

            options += [("let", let), ("let_tensor", let_tensor), ("case", case), ("app", app)]

        return self._choose(options)

    def _sample(self, ctx: UsageContext, inner: TypeExpr, d: int) -> tuple[Term, UsageContext]:
        n = self.rng.choice((0, 1, 1, 2, 2, 3))
        args, names, body_ctx = [], [], {}
        for _ in range(n):
            sigma = self._ni_type(self.rng.randint(1, 2))
            arg, ctx = self._i(ctx, Modal(sigma), d - 1)
            name = self._fresh(body_ctx)
            args.append(arg)
            names.append(name)
            body_ctx[name] = sigma
        body = self._ni(body_ctx, inner, d - 1)
        return Sample(tuple(args), tuple(names), body), ctx


# ── Corpora ────────────────────────────────────────────────────────

def target_type(cfg: GenConfig) -> Optional[TypeExpr]:
    return parse_type(cfg.target_type) if cfg.target_type else None


def generate_terms(cfg: GenConfig, model: EffectModel | None = None) -> list[Term]:
    """``cfg.count`` closed terms; a fixed config always yields the same list."""
    gen = TermGenerator(cfg, model)
    fixed = target_type(cfg)
    out = []
    for _ in range(cfg.count):
        try:
            ty = fixed or gen.fitting_type(cfg.layer, cfg.max_depth, size=3)
        except DeadEnd:
            ty = gen.random_type(cfg.layer, 1)
        out.append(gen.term(cfg.layer, ty))
    logger.info("generated %d %s terms (seed %d)", len(out), cfg.layer.value, cfg.seed)
    return out
