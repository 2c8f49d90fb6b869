"""Suite runners: equations, tensor soundness, full abstraction, splitting.

Every runner is a pure function of its GenConfig. Sub-corpora get their own
seed derived from the suite seed and a label, so adding a schema or a model
never changes the terms drawn for the others.
"""

from __future__ import annotations

import hashlib
import logging
from dataclasses import fields, replace
from typing import Iterable, get_args

from inicalc.checker.checker import check_layer
from inicalc.checker.declarative import declarative_type
from inicalc.errors import IniError
from inicalc.harness.events import Event, EventBus, EventType, event_bus
from inicalc.harness.generator import DeadEnd, TermGenerator
from inicalc.harness.laws import SCHEMAS, LawSchema, check_law
from inicalc.harness.models import (
    GenConfig, LawReport, SoundnessFailure, SoundnessReport,
    SplittingDisagreement, SplittingReport, TranslationFailure,
    TranslationReport,
)
from inicalc.semantics.evaluator import eval_erased, eval_ini, eval_ni
from inicalc.semantics.models import ModelId, get_model
from inicalc.semantics.oracle import (
    FactorizationReport, check_factorization, check_tensor_soundness_i,
    check_tensor_soundness_ini,
)
from inicalc.semantics.values import show_value
from inicalc.syntax.ast import (
    BOOL, App, Const, Lam, Layer, Let, Modal, PairShared, PrimOp, Tensor,
    Term, TypeExpr, Var, children, is_ini_type, relayer,
)
from inicalc.syntax.parser import parse_type
from inicalc.syntax.printer import show_term, show_type
from inicalc.translator import FragmentTag, check_full_abstraction, translate

logger = logging.getLogger(__name__)

_TERMS = get_args(Term)

# Correlated pair per model: one effect, observed twice.
_CONTROL_PRIMITIVE = {ModelId.DIST: "coin", ModelId.PSET: "amb", ModelId.NAME: "fresh"}


def derive_seed(seed: int, *labels: object) -> int:
    text = ":".join([str(seed), *map(str, labels)])
    return int.from_bytes(hashlib.blake2b(text.encode(), digest_size=8).digest(), "big")


def _generator(cfg: GenConfig, *labels: object, **update) -> TermGenerator:
    return TermGenerator(cfg.model_copy(update={"seed": derive_seed(cfg.seed, *labels), **update}))


def _describe(report: FactorizationReport) -> str:
    if report.witness is not None:
        w = report.witness
        return f"{show_value(w.pair)}: joint {w.joint}, product {w.product}"
    if report.name_overlap:
        return f"names shared by both components: {sorted(report.name_overlap)}"
    return "joint differs from the product of its marginals"


# ── Equations ──────────────────────────────────────────────────────

def run_equations_suite(
    cfg: GenConfig,
    schemas: Iterable[LawSchema] = SCHEMAS,
    bus: EventBus = event_bus,
) -> LawReport:
    """Check every schema; commutativity-sensitive ones in every model."""
    report = LawReport(seed=cfg.seed, count=cfg.count, depth=cfg.max_depth)
    bus.emit(Event(EventType.SUITE_STARTED, "equations", {"seed": cfg.seed, "count": cfg.count}))

    for schema in schemas:
        models = list(ModelId) if schema.commutative else [cfg.model]
        for model_id in models:
            gen = _generator(cfg, "law", schema.name, model_id.value, model=model_id, layer=schema.layer)
            result = check_law(schema, gen)
            report.results.append(result)
            bus.emit(Event(EventType.SCHEMA_CHECKED, "equations", {
                "schema": schema.name, "model": model_id.value,
                "checked": result.checked, "failures": len(result.failures),
            }))
            for failure in result.failures:
                bus.emit(Event(EventType.FAILURE, "equations", {"schema": schema.name, "lhs": failure.lhs}))

    bus.emit(Event(EventType.SUITE_COMPLETED, "equations", {"failures": report.failure_count}))
    return report


# ── Tensor soundness ───────────────────────────────────────────────

def _tensor_type(gen: TermGenerator, layer: Layer, fixed: TypeExpr | None) -> TypeExpr:
    if fixed is not None:
        return fixed
    for _ in range(8):
        ty = gen.observable_tensor(layer)
        if gen.min_depth(layer, ty) <= gen.cfg.max_depth:
            return ty
    return Tensor(Modal(BOOL), Modal(BOOL)) if layer is Layer.I else Tensor(BOOL, BOOL)


def negative_control(model_id: ModelId) -> FactorizationReport:
    """A correlated pair pushed through the oracle directly; must be flagged."""
    m = get_model(model_id)
    correlated = relayer(
        Let("x", PrimOp(_CONTROL_PRIMITIVE[model_id]), PairShared(Var("x"), Var("x"))),
        Layer.NI,
    )
    return check_factorization(m, eval_ni(m, {}, correlated))


def run_soundness_suite(cfg: GenConfig, bus: EventBus = event_bus) -> SoundnessReport:
    """Every generated tensor-typed term must denote a product.

    The one-level corpus only runs in the probabilistic model, where its
    single effect lives; the independent-layer corpus runs in ``cfg.model``.
    """
    m = get_model(cfg.model)
    fixed = parse_type(cfg.target_type) if cfg.target_type else None
    ini_fixed = fixed if isinstance(fixed, Tensor) and is_ini_type(fixed) else None
    i_fixed = fixed if _is_box_tensor(fixed) else None
    report = SoundnessReport(seed=cfg.seed, count=cfg.count, depth=cfg.max_depth, model=cfg.model)
    bus.emit(Event(EventType.SUITE_STARTED, "soundness", {"model": cfg.model.value}))

    # ── Stage 1: one-level corpus ──────────────────────────────────
    if cfg.model is ModelId.DIST:
        gen = _generator(cfg, "soundness", "ini", layer=Layer.INI)
        for _ in range(cfg.count):
            t = gen.term(Layer.INI, _tensor_type(gen, Layer.INI, ini_fixed))
            result = check_tensor_soundness_ini(m, t)
            report.ini_checked += 1
            if not result.is_product:
                logger.warning("one-level term does not factorize: %s", show_term(t))
                report.failures.append(SoundnessFailure(layer=Layer.INI, model=cfg.model, term=show_term(t), reason=_describe(result)))
        bus.emit(Event(EventType.CORPUS_CHECKED, "soundness", {"layer": "INI", "checked": report.ini_checked}))

    # ── Stage 2: independent-layer corpus ──────────────────────────
    gen = _generator(cfg, "soundness", "i", cfg.model.value, layer=Layer.I)
    disjoint = True
    for _ in range(cfg.count):
        t = gen.term(Layer.I, _tensor_type(gen, Layer.I, i_fixed))
        result = check_tensor_soundness_i(m, t)
        report.i_checked += 1
        disjoint = disjoint and not result.name_overlap
        if not result.is_product:
            logger.warning("independent-layer term does not factorize: %s", show_term(t))
            report.failures.append(SoundnessFailure(layer=Layer.I, model=cfg.model, term=show_term(t), reason=_describe(result)))
    if cfg.model is ModelId.NAME:
        report.names_disjoint = disjoint
    bus.emit(Event(EventType.CORPUS_CHECKED, "soundness", {"layer": "I", "checked": report.i_checked}))

    # ── Stage 3: negative control ──────────────────────────────────
    control = negative_control(cfg.model)
    report.negative_control_flagged = not control.is_product
    report.negative_control_witness = _describe(control)
    if control.is_product:
        logger.warning("negative control was not flagged; the oracle is vacuous")
        bus.emit(Event(EventType.FAILURE, "soundness", {"negative_control": True}))

    for failure in report.failures:
        bus.emit(Event(EventType.FAILURE, "soundness", {"term": failure.term, "reason": failure.reason}))
    bus.emit(Event(EventType.SUITE_COMPLETED, "soundness", {"failures": report.failure_count}))
    return report


def _is_box_tensor(ty: TypeExpr) -> bool:
    return isinstance(ty, Tensor) and isinstance(ty.left, Modal) and isinstance(ty.right, Modal)


# ── Full abstraction ───────────────────────────────────────────────

def _rebuild(t: Term, f) -> Term:
    """Apply ``f`` to every direct subterm of ``t``."""
    changes = {}
    for fld in fields(t):
        value = getattr(t, fld.name)
        if isinstance(value, _TERMS):
            changes[fld.name] = f(value)
        elif isinstance(value, tuple) and value and isinstance(value[0], _TERMS):
            changes[fld.name] = tuple(f(v) for v in value)
    return replace(t, **changes)


def _is_leaf(t: Term) -> bool:
    return isinstance(t, Const) or (isinstance(t, PrimOp) and not t.args)


def _leaf_count(t: Term) -> int:
    return 1 if _is_leaf(t) else sum(_leaf_count(c) for c in children(t))


def perturb(t: Term, gen: TermGenerator) -> Term:
    """``t`` with one constant or primitive leaf replaced."""
    n = _leaf_count(t)
    if n == 0:
        return t
    target = gen.rng.randrange(n)
    seen = 0

    def walk(u: Term) -> Term:
        nonlocal seen
        if _is_leaf(u):
            seen += 1
            if seen - 1 != target:
                return u
            if isinstance(u, Const):
                return replace(u, value=not u.value)
            return Const(gen.coin_flip(), layer=u.layer)
        return _rebuild(u, walk)

    return walk(t)


def _pair(gen: TermGenerator, fragment: FragmentTag, t: Term, ty: TypeExpr, k: int) -> tuple[Term, Term]:
    match k % 4:
        case 0:
            return t, t
        case 1 if fragment is FragmentTag.MULTIPLICATIVE:
            return relayer(App(Lam("x", ty, Var("x")), t), Layer.INI), t
        case 1:
            return relayer(Let("x", t, Var("x")), Layer.INI), t
        case 2:
            return t, perturb(t, gen)
    return t, gen.term(Layer.INI, ty)


def run_translation_suite(cfg: GenConfig, bus: EventBus = event_bus) -> TranslationReport:
    """Typing preservation, semantic preservation and full abstraction."""
    m = get_model(ModelId.DIST)
    report = TranslationReport(seed=cfg.seed, count=cfg.count)
    bus.emit(Event(EventType.SUITE_STARTED, "fullabstraction", {"seed": cfg.seed}))

    for fragment in FragmentTag:
        gen = _generator(cfg, "translation", fragment.value, layer=Layer.INI, model=ModelId.DIST, fragment=fragment)
        target_layer = Layer.NI if fragment is FragmentTag.ARROW_FREE else Layer.I

        def fail(check: str, t: Term, detail: str) -> None:
            logger.warning("translation %s check failed on %s: %s", check, show_term(t), detail)
            report.failures.append(TranslationFailure(check=check, fragment=fragment, term=show_term(t), detail=detail))

        for k in range(cfg.count):
            try:
                ty = gen.fitting_type(Layer.INI, cfg.max_depth, size=2, arrows=False)
            except DeadEnd:
                ty = BOOL
            t = gen.term(Layer.INI, ty)
            image, image_ty = translate(t, ty, fragment)

            # ── typing preservation ──
            typed = check_layer(target_layer, {}, image, image_ty, m)
            report.typing_checked += 1
            if not typed.ok:
                fail("typing", t, str(typed.error))
                continue

            # ── semantic preservation ──
            source = eval_ini(m, {}, t)
            if fragment is FragmentTag.ARROW_FREE:
                target = eval_ni(m, {}, image)
            else:
                target = eval_erased(m, {}, image, image_ty)
            report.semantics_checked += 1
            if not m.value_eq(source, target):
                fail("semantics", t, f"source {source.show()} but image {target.show()}")

            # ── full abstraction on a pair ──
            left, right = _pair(gen, fragment, t, ty, k)
            try:
                verdict = check_full_abstraction([(left, right)], fragment, m)[0]
            except IniError as e:
                fail("abstraction", left, str(e))
                continue
            report.pairs_checked += 1
            report.pairs_equal += verdict.source_equal
            if not verdict.holds:
                fail("abstraction", left, f"paired with {show_term(right)}: source equal {verdict.source_equal}, target equal {verdict.target_equal}")

        bus.emit(Event(EventType.CORPUS_CHECKED, "fullabstraction", {"fragment": fragment.value}))

    for failure in report.failures:
        bus.emit(Event(EventType.FAILURE, "fullabstraction", {"check": failure.check, "term": failure.term}))
    bus.emit(Event(EventType.SUITE_COMPLETED, "fullabstraction", {"failures": report.failure_count}))
    return report


# ── Splitting agreement ────────────────────────────────────────────

def _open_context(gen: TermGenerator, layer: Layer) -> dict[str, TypeExpr]:
    size = gen.rng.randint(0, 4)
    return {f"v{i}": gen.random_type(layer, gen.rng.randint(1, 2)) for i in range(size)}


def run_splitting_suite(cfg: GenConfig, bus: EventBus = event_bus) -> SplittingReport:
    """Algorithmic threading against brute-force split enumeration.

    Terms are generated relaxed, so some reuse a variable and should be
    rejected by both checkers.
    """
    m = get_model(cfg.model)
    report = SplittingReport(seed=cfg.seed, count=cfg.count)
    bus.emit(Event(EventType.SUITE_STARTED, "splitting", {"seed": cfg.seed}))
    depth = min(cfg.max_depth, 3)

    for layer in (Layer.INI, Layer.I):
        gen = _generator(cfg, "splitting", layer.value, layer=layer, relaxed=True, max_depth=depth)
        for _ in range(cfg.count):
            ctx = _open_context(gen, layer)
            try:
                ty = gen.fitting_type(layer, depth, size=2)
            except DeadEnd:
                ty = gen.random_type(layer, 1)
            t = gen.term(layer, ty, ctx)
            algorithmic = check_layer(layer, ctx, t, ty, m)
            declarative = declarative_type(ctx, t, layer, ty, m)
            report.checked += 1
            report.accepted += algorithmic.ok
            found = algorithmic.type if algorithmic.ok else None
            if found != declarative:
                logger.warning("checkers disagree on %s", show_term(t))
                report.disagreements.append(SplittingDisagreement(
                    layer=layer,
                    context={name: show_type(ty_) for name, ty_ in ctx.items()},
                    term=show_term(t),
                    algorithmic=show_type(found) if found is not None else None,
                    declarative=show_type(declarative) if declarative is not None else None,
                ))
        bus.emit(Event(EventType.CORPUS_CHECKED, "splitting", {"layer": layer.value, "checked": report.checked}))

    for d in report.disagreements:
        bus.emit(Event(EventType.FAILURE, "splitting", {"term": d.term}))
    bus.emit(Event(EventType.SUITE_COMPLETED, "splitting", {"failures": report.failure_count}))
    return report
