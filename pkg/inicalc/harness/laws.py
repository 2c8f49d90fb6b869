"""The equational theory as instantiable law schemas.

Each schema knows how to build one random instance (both sides plus the
type they share) from a generator. Laws are checked semantically: both
sides are evaluated exactly and compared in the effect model.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable

from inicalc.checker.checker import check_layer
from inicalc.errors import GenExhausted
from inicalc.harness.generator import DeadEnd, TermGenerator
from inicalc.harness.models import LawFailure, LawResult
from inicalc.semantics.evaluator import eval_i, eval_ni, values_equal
from inicalc.semantics.models import EffectModel
from inicalc.semantics.values import show_value
from inicalc.syntax.ast import (
    BOOL, App, BoolT, Case, Const, Inj, Lam, Layer, Let, LetTensor, Modal,
    PairShared, PairTensor, Prod, Proj, Sample, Sum, Term, TypeExpr, Var,
    mentions_name, relayer, substitute,
)
from inicalc.syntax.printer import show_term

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Instance:
    lhs: Term
    rhs: Term
    type: TypeExpr


@dataclass(frozen=True)
class LawSchema:
    name: str
    layer: Layer
    lhs: str
    rhs: str
    build: Callable[[TermGenerator, int], Instance]
    # needs the effect model to be commutative; checked in every model
    commutative: bool = False


# ── Metavariables ──────────────────────────────────────────────────

def _depth(g: TermGenerator) -> int:
    return max(2, g.cfg.max_depth - 1)


def _ni_type(g: TermGenerator) -> TypeExpr:
    return g.fitting_type(Layer.NI, _depth(g), size=2)


def _i_type(g: TermGenerator) -> TypeExpr:
    return g.fitting_type(Layer.I, _depth(g), size=2, arrows=False)


def _box(g: TermGenerator) -> TypeExpr:
    return Modal(g.fitting_type(Layer.NI, _depth(g) - 1, size=2))


def _ni(g: TermGenerator, ty: TypeExpr, **ctx: TypeExpr) -> Term:
    return g.term(Layer.NI, ty, ctx, _depth(g))


def _i(g: TermGenerator, ty: TypeExpr, **ctx: TypeExpr) -> Term:
    return g.term(Layer.I, ty, ctx, _depth(g))


def _value(g: TermGenerator, ty: TypeExpr) -> Term:
    """A syntactic value of a name-free sharing-layer type."""
    match ty:
        case BoolT():
            return Const(g.coin_flip())
        case Prod(a, b):
            return PairShared(_value(g, a), _value(g, b))
        case Sum(a, b):
            if g.coin_flip():
                return Inj(1, _value(g, a), other=b)
            return Inj(2, _value(g, b), other=a)
    raise DeadEnd


# ── Sharing-layer laws ─────────────────────────────────────────────

def _case_inl(g: TermGenerator, k: int) -> Instance:
    s1, s2, tau = _ni_type(g), _ni_type(g), _ni_type(g)
    m = _ni(g, s1)
    n1, n2 = _ni(g, tau, x=s1), _ni(g, tau, y=s2)
    return Instance(Case(Inj(1, m, other=s2), "x", n1, "y", n2), Let("x", m, n1), tau)


def _case_inr(g: TermGenerator, k: int) -> Instance:
    s1, s2, tau = _ni_type(g), _ni_type(g), _ni_type(g)
    m = _ni(g, s2)
    n1, n2 = _ni(g, tau, x=s1), _ni(g, tau, y=s2)
    return Instance(Case(Inj(2, m, other=s1), "x", n1, "y", n2), Let("y", m, n2), tau)


def _let_id_body(g: TermGenerator, k: int) -> Instance:
    tau = _ni_type(g)
    m = _ni(g, tau)
    return Instance(Let("x", m, Var("x")), m, tau)


def _let_id_subject(g: TermGenerator, k: int) -> Instance:
    sigma, tau = _ni_type(g), _ni_type(g)
    if k % 2 == 0:
        m = _ni(g, sigma)
        n = _ni(g, tau, x=sigma)
        lhs = Let("z", m, Let("x", Var("z"), n))
        return Instance(lhs, Let("z", m, substitute(n, "x", Var("z"))), tau)
    if mentions_name(sigma):
        sigma = BOOL
    v = _value(g, sigma)
    n = _ni(g, tau, x=sigma)
    return Instance(Let("x", v, n), substitute(n, "x", v), tau)


def _let_assoc(g: TermGenerator, k: int) -> Instance:
    sigma, rho, tau = _ni_type(g), _ni_type(g), _ni_type(g)
    m = _ni(g, sigma)
    n = _ni(g, rho, x=sigma)
    p = _ni(g, tau, y=rho)
    lhs = Let("y", Let("x", m, n), p)
    return Instance(lhs, Let("x", m, Let("y", n, p)), tau)


# ── Independent-layer laws ─────────────────────────────────────────

def _beta_app(g: TermGenerator, k: int) -> Instance:
    sigma, tau = _i_type(g), _i_type(g)
    u = _i(g, sigma)
    n = _i(g, tau, x=sigma)
    return Instance(App(Lam("x", sigma, n), u), substitute(n, "x", u), tau)


def _let_tensor_beta(g: TermGenerator, k: int) -> Instance:
    s1, s2, tau = _i_type(g), _i_type(g), _i_type(g)
    u1, u2 = _i(g, s1), _i(g, s2)
    n = _i(g, tau, x=s1, y=s2)
    lhs = LetTensor("x", "y", PairTensor(u1, u2), n)
    return Instance(lhs, substitute(substitute(n, "x", u1), "y", u2), tau)


def _i_case_inl(g: TermGenerator, k: int) -> Instance:
    s1, s2, tau = _i_type(g), _i_type(g), _i_type(g)
    u = _i(g, s1)
    n1, n2 = _i(g, tau, x=s1), _i(g, tau, y=s2)
    return Instance(Case(Inj(1, u, other=s2), "x", n1, "y", n2), substitute(n1, "x", u), tau)


def _i_case_inr(g: TermGenerator, k: int) -> Instance:
    s1, s2, tau = _i_type(g), _i_type(g), _i_type(g)
    u = _i(g, s2)
    n1, n2 = _i(g, tau, x=s1), _i(g, tau, y=s2)
    return Instance(Case(Inj(2, u, other=s1), "x", n1, "y", n2), substitute(n2, "y", u), tau)


# ── Sample laws ────────────────────────────────────────────────────

def _sample_id(g: TermGenerator, k: int) -> Instance:
    box = _box(g)
    t = _i(g, box)
    return Instance(Sample((t,), ("x",), Var("x")), t, box)


def _sample_fusion(g: TermGenerator, k: int) -> Instance:
    box = _box(g)
    rho, tau = _ni_type(g), _ni_type(g)
    t = _i(g, box)
    m = _ni(g, rho, x=box.inner)
    n = _ni(g, tau, y=rho)
    lhs = Sample((Sample((t,), ("x",), m),), ("y",), n)
    return Instance(lhs, Sample((t,), ("x",), Let("y", m, n)), Modal(tau))


def _sample_assoc(g: TermGenerator, k: int) -> Instance:
    b1, b2, b3 = _box(g), _box(g), _box(g)
    t1, t2, t3 = _i(g, b1), _i(g, b2), _i(g, b3)
    lhs = Sample(
        (Sample((t1, t2), ("a", "b"), PairShared(Var("a"), Var("b"))), t3),
        ("p", "c"),
        PairShared(Proj(1, Var("p")), PairShared(Proj(2, Var("p")), Var("c"))),
    )
    rhs = Sample(
        (t1, Sample((t2, t3), ("b", "c"), PairShared(Var("b"), Var("c")))),
        ("a", "q"),
        PairShared(Var("a"), PairShared(Proj(1, Var("q")), Proj(2, Var("q")))),
    )
    return Instance(lhs, rhs, Modal(Prod(b1.inner, Prod(b2.inner, b3.inner))))


def _unit_box() -> Term:
    return Sample((), (), Const(True))


def _sample_unit_left(g: TermGenerator, k: int) -> Instance:
    box = _box(g)
    t = _i(g, box)
    lhs = Sample((_unit_box(), t), ("u", "x"), PairShared(Var("u"), Var("x")))
    rhs = Sample((t,), ("x",), PairShared(Const(True), Var("x")))
    return Instance(lhs, rhs, Modal(Prod(BOOL, box.inner)))


def _sample_unit_right(g: TermGenerator, k: int) -> Instance:
    box = _box(g)
    t = _i(g, box)
    lhs = Sample((t, _unit_box()), ("x", "u"), PairShared(Var("x"), Var("u")))
    rhs = Sample((t,), ("x",), PairShared(Var("x"), Const(True)))
    return Instance(lhs, rhs, Modal(Prod(box.inner, BOOL)))


NI, I = Layer.NI, Layer.I

SCHEMAS: tuple[LawSchema, ...] = (
    LawSchema("case-inl", NI, "case inl M of inl x => N1 | inr y => N2", "let x = M in N1", _case_inl),
    LawSchema("case-inr", NI, "case inr M of inl x => N1 | inr y => N2", "let y = M in N2", _case_inr),
    LawSchema("let-id-body", NI, "let x = M in x", "M", _let_id_body),
    LawSchema("let-id-subject", NI, "let z = M in let x = z in N  |  let x = V in N", "let z = M in N[z/x]  |  N[V/x]", _let_id_subject),
    LawSchema("let-assoc", NI, "let y = (let x = M in N) in P", "let x = M in let y = N in P", _let_assoc),
    LawSchema("beta-app", I, "(fn x : S => t) u", "t[u/x]", _beta_app),
    LawSchema("let-tensor-beta", I, "let x (x) y = u1 (x) u2 in t", "t[u1/x][u2/y]", _let_tensor_beta),
    LawSchema("i-case-inl", I, "case inl u of inl x => t1 | inr y => t2", "t1[u/x]", _i_case_inl),
    LawSchema("i-case-inr", I, "case inr u of inl x => t1 | inr y => t2", "t2[u/y]", _i_case_inr),
    LawSchema("sample-id", I, "sample t as x in x", "t", _sample_id, commutative=True),
    LawSchema(
        "sample-fusion", I,
        "sample (sample t as x in M) as y in N", "sample t as x in (let y = M in N)",
        _sample_fusion, commutative=True,
    ),
    LawSchema(
        "sample-assoc", I,
        "sample (sample t1, t2 as a, b in (a, b)), t3 as p, c in (fst p, (snd p, c))",
        "sample t1, (sample t2, t3 as b, c in (b, c)) as a, q in (a, (fst q, snd q))",
        _sample_assoc, commutative=True,
    ),
    LawSchema(
        "sample-unit-left", I,
        "sample (sample as in true), t as u, x in (u, x)", "sample t as x in (true, x)",
        _sample_unit_left, commutative=True,
    ),
    LawSchema(
        "sample-unit-right", I,
        "sample t, (sample as in true) as x, u in (x, u)", "sample t as x in (x, true)",
        _sample_unit_right, commutative=True,
    ),
)


def schema_by_name(name: str) -> LawSchema:
    for schema in SCHEMAS:
        if schema.name == name:
            return schema
    raise KeyError(name)


# ── Checking ───────────────────────────────────────────────────────

def _meaning(model: EffectModel, layer: Layer, t: Term):
    if layer is Layer.NI:
        return eval_ni(model, {}, t)
    return eval_i(model, {}, t)


def _show(layer: Layer, value) -> str:
    return value.show() if layer is Layer.NI else show_value(value)


def _build(schema: LawSchema, g: TermGenerator, k: int) -> Instance:
    for _ in range(g.cfg.max_attempts):
        try:
            inst = schema.build(g, k)
        except (DeadEnd, GenExhausted):
            continue
        return Instance(relayer(inst.lhs, schema.layer), relayer(inst.rhs, schema.layer), inst.type)
    raise RuntimeError(f"could not instantiate {schema.name}")


def check_instance(schema: LawSchema, model: EffectModel, inst: Instance, index: int = 0) -> LawFailure | None:
    """None when both sides typecheck and mean the same."""
    for side in (inst.lhs, inst.rhs):
        result = check_layer(schema.layer, {}, side, inst.type, model)
        if not result.ok:
            return LawFailure(
                index=index, lhs=show_term(inst.lhs), rhs=show_term(inst.rhs),
                left_value=f"ill-typed: {result.error}", right_value="",
            )
    left = _meaning(model, schema.layer, inst.lhs)
    right = _meaning(model, schema.layer, inst.rhs)
    equal = model.value_eq(left, right) if schema.layer is Layer.NI else values_equal(model, left, right)
    if equal:
        return None
    return LawFailure(
        index=index, lhs=show_term(inst.lhs), rhs=show_term(inst.rhs),
        left_value=_show(schema.layer, left), right_value=_show(schema.layer, right),
    )


def check_law(schema: LawSchema, gen: TermGenerator) -> LawResult:
    """Check ``gen.cfg.count`` random instances of one schema."""
    result = LawResult(schema_name=schema.name, layer=schema.layer, model=gen.model.model_id)
    for k in range(gen.cfg.count):
        failure = check_instance(schema, gen.model, _build(schema, gen, k), k)
        result.checked += 1
        if failure is not None:
            logger.warning("%s fails in %s: %s vs %s", schema.name, gen.model.model_id.value, failure.lhs, failure.rhs)
            result.failures.append(failure)
    logger.info("%s: %d instances in %s, %d failures", schema.name, result.checked, gen.model.model_id.value, len(result.failures))
    return result
