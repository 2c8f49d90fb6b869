"""Command implementations shared by the command line and the HTTP surface.

Each command takes source text (not a path) plus options and returns a
RunRecord; user-facing failures become exit code 1, a failed suite or a
non-factorizing program exit code 2.
"""

from __future__ import annotations

import logging
from typing import Any, Callable, Optional

from pydantic import BaseModel, Field

from inicalc.checker.checker import check_program
from inicalc.cli.render import serialize_monadic, serialize_value, show_result
from inicalc.errors import IniError, UsageError
from inicalc.harness.events import EventBus, event_bus
from inicalc.harness.generator import generate_terms
from inicalc.harness.models import GenConfig
from inicalc.harness.suites import (
    run_equations_suite, run_soundness_suite, run_splitting_suite,
    run_translation_suite,
)
from inicalc.semantics.evaluator import evaluate_program
from inicalc.semantics.models import ModelId, get_model
from inicalc.semantics.oracle import check_tensor_soundness_i, check_tensor_soundness_ini
from inicalc.semantics.values import show_value
from inicalc.syntax.ast import Layer, Let, Term, relayer
from inicalc.syntax.parser import SourceFile, parse, print_source
from inicalc.syntax.printer import show_term, show_type
from inicalc.translator import FragmentTag, translate

logger = logging.getLogger(__name__)


class RunRecord(BaseModel):
    command: str
    input: str
    model: Optional[ModelId] = None
    outcome: dict[str, Any] = Field(default_factory=dict)
    exit_code: int = 0


def _guarded(command: str, name: str, model: ModelId | None, body: Callable[[], tuple[dict, int]]) -> RunRecord:
    try:
        outcome, code = body()
    except IniError as e:
        logger.info("%s on %s failed: %s", command, name, e)
        return RunRecord(command=command, input=name, model=model, outcome={"error": e.to_dict()}, exit_code=1)
    return RunRecord(command=command, input=name, model=model, outcome=outcome, exit_code=code)


def _checked(source: SourceFile, model=None):
    result = check_program(source, model)
    if not result.ok:
        raise result.error
    return result


def inline_declarations(source: SourceFile) -> Term:
    """The main term with every declaration bound around it by ``let``."""
    main = source.main
    for decl in reversed(source.declarations):
        if decl.term is None:
            raise UsageError(f"'{decl.name}' is an abstract parameter and has no value")
        main = Let(decl.name, decl.term, main)
    return relayer(main, source.layer)


# ── Commands ───────────────────────────────────────────────────────

def run_check(text: str, name: str = "<input>", model: ModelId | None = None) -> RunRecord:
    def body():
        source = parse(text)
        result = _checked(source, get_model(model) if model else None)
        return {
            "type": show_type(result.type),
            "layer": source.layer.value,
            "rules": [use.rule for use in result.trace],
        }, 0

    return _guarded("check", name, model, body)


def run_eval(text: str, name: str = "<input>", model: ModelId = ModelId.DIST, erased: bool = False) -> RunRecord:
    def body():
        source = parse(text)
        if erased and source.layer is not Layer.I:
            raise UsageError("--erased needs an independent-layer program")
        m = get_model(model)
        _checked(source, m)
        value = evaluate_program(source, m, erased=erased)
        return {"value": serialize_value(value), "text": show_result(value)}, 0

    return _guarded("eval", name, model, body)


def run_independence(text: str, name: str = "<input>", model: ModelId = ModelId.DIST) -> RunRecord:
    def body():
        source = parse(text)
        m = get_model(model)
        _checked(source, m)
        term = inline_declarations(source)
        if source.layer is Layer.INI:
            report = check_tensor_soundness_ini(m, term)
        elif source.layer is Layer.I:
            report = check_tensor_soundness_i(m, term)
        else:
            raise UsageError("the sharing layer has no tensor type")
        w = report.witness
        outcome = {
            "is_product": report.is_product,
            "marginal1": serialize_monadic(report.marginal1),
            "marginal2": serialize_monadic(report.marginal2),
            "witness": f"{show_value(w.pair)} joint {w.joint} product {w.product}" if w else None,
            "name_overlap": sorted(report.name_overlap),
            "recombination_equal": report.recombination_equal,
            "joint": serialize_monadic(report.joint) if report.joint is not None else None,
        }
        return outcome, 0 if report.is_product else 2

    return _guarded("independence", name, model, body)


def run_translate(text: str, name: str = "<input>", fragment: FragmentTag = FragmentTag.ARROW_FREE) -> RunRecord:
    def body():
        source = parse(text)
        if source.layer is not Layer.INI:
            raise UsageError("only one-level (#lang ini1) programs can be translated")
        result = _checked(source)
        image, image_ty = translate(inline_declarations(source), result.type, fragment)
        layer = Layer.NI if fragment is FragmentTag.ARROW_FREE else Layer.I
        program = print_source(SourceFile("ini2", layer, (), image))
        return {
            "fragment": fragment.value,
            "source_type": show_type(result.type),
            "type": show_type(image_ty),
            "program": program,
        }, 0

    return _guarded("translate", name, None, body)


SUITES = {
    "equations": run_equations_suite,
    "soundness": run_soundness_suite,
    "fullabstraction": run_translation_suite,
    "splitting": run_splitting_suite,
}


def run_suite(kind: str, cfg: GenConfig, bus: EventBus = event_bus) -> RunRecord:
    name = f"seed={cfg.seed} count={cfg.count} depth={cfg.max_depth}"

    def body():
        runner = SUITES.get(kind)
        if runner is None:
            raise UsageError(f"unknown suite '{kind}' (choose from {', '.join(SUITES)})")
        report = runner(cfg, bus=bus)
        outcome = report.model_dump(mode="json")
        outcome["failure_count"] = report.failure_count
        logger.info("suite %s finished with %d failures", kind, report.failure_count)
        return outcome, 0 if report.failure_count == 0 else 2

    return _guarded(f"suite {kind}", name, cfg.model, body)


def run_gen(cfg: GenConfig) -> RunRecord:
    name = f"seed={cfg.seed} count={cfg.count} depth={cfg.max_depth}"

    def body():
        terms = generate_terms(cfg)
        return {
            "layer": cfg.layer.value,
            "type": cfg.target_type,
            "terms": [show_term(t) for t in terms],
        }, 0

    return _guarded("gen", name, cfg.model, body)
