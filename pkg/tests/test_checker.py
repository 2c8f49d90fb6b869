from __future__ import annotations

from dataclasses import replace

import pytest

from inicalc.checker.checker import (
    TypeErrorKind, check_i, check_ini, check_layer, check_ni, check_program,
    replay_trace,
)
from inicalc.checker.context import Usage, UsageContext
from inicalc.checker.declarative import declarative_type, splits
from inicalc.syntax.ast import BOOL, NAME, NO_SPAN, Layer, Lolli, Modal, Prod, Sum, Tensor
from inicalc.syntax.parser import parse, parse_term
from tests.helpers import ind, ini, ni

BB = Tensor(BOOL, BOOL)
MB = Modal(BOOL)


# ── One-level language ─────────────────────────────────────────────

def test_correlated_pair_is_a_product():
    result = check_ini({}, ini("let x = coin in (x, x)"))
    assert result.ok
    assert result.type == Prod(BOOL, BOOL)


def test_sharing_a_variable_across_an_application_is_rejected():
    result = check_ini({}, ini("let x = coin in (fn y: Bool => x (x) y) x"))
    assert result.error.kind == TypeErrorKind.SHARED_ACROSS_TENSOR.value
    assert result.error.variable == "x"
    assert len(result.error.sites) == 2


def test_sharing_a_variable_across_a_tensor_is_rejected():
    result = check_ini({"x": BOOL}, ini("x (x) x"))
    assert result.error.kind == "SharedAcrossTensor"


def test_tensor_forgets_to_product():
    result = check_ini({}, ini("fn z: Bool (x) Bool => let a (x) b = z in (a, b)"))
    assert result.type == Lolli(BB, Prod(BOOL, BOOL))


def test_unused_variables_are_fine():
    assert check_ini({"x": BOOL, "y": BOOL}, ini("true")).ok
    assert check_ini({}, ini("fn x: Bool => true")).type == Lolli(BOOL, BOOL)


def test_shadowing_binders():
    assert check_ini({}, ini("fn x: Bool => fn x: Bool => x")).type == Lolli(BOOL, Lolli(BOOL, BOOL))


def test_reuse_in_sequence_is_reported():
    result = check_ini({"f": Lolli(BOOL, BOOL), "x": BOOL}, ini("let y = f x in f y"))
    assert result.error.kind == "SharedAcrossTensor"
    assert result.error.variable == "f"


def test_unbound_and_mismatch():
    assert check_ini({}, ini("x")).error.kind == "UnboundVar"
    assert check_ini({}, ini("fst true")).error.kind == "Mismatch"
    assert check_ini({}, ini("true true")).error.kind == "NonFunctionApplied"
    assert check_ini({}, ini("true"), expected=BB).error.kind == "Mismatch"


def test_one_level_language_has_only_coin(pset):
    assert check_ini({}, ini("coin (x) coin"), model=pset).error.kind == "PrimUnknown"
    assert check_ini({}, ini("not true")).error.kind == "LayerMismatch"


def test_residual_context_records_consumption():
    result = check_ini({"x": BOOL, "y": BOOL}, ini("x"))
    assert result.context.lookup("x").state is Usage.CONSUMED
    assert result.context.is_fresh("y")


# ── Sharing layer ──────────────────────────────────────────────────

def test_sharing_layer_shares_freely():
    assert check_ni({"x": BOOL}, ni("(x, x)")).type == Prod(BOOL, BOOL)
    t = ni("let x = fst m in let y = snd m in eqb (x, y)")
    assert check_ni({"m": Prod(BOOL, BOOL)}, t).type == BOOL


def test_case_on_bool():
    assert check_ni({}, ni("case coin of inl x => true | inr y => false")).type == BOOL


def test_injections_need_the_other_summand():
    assert check_ni({}, ni("inl true")).error.kind == "Mismatch"
    assert check_ni({}, ni("inl[Bool] true")).ok


def test_names_need_the_name_model(dist, name):
    assert check_ni({}, ni("eqn (fresh, fresh)"), model=name).type == BOOL
    assert check_ni({}, ni("fresh"), model=dist).error.kind == "PrimUnknown"
    assert check_ni({"a": NAME}, ni("a"), model=dist).ok
    assert check_ni({}, ni("fst (fresh, true)"), expected=NAME, model=dist).error.kind == "Mismatch"


def test_tensor_is_not_in_the_sharing_layer():
    assert check_ni({}, ni("true (x) true")).error.kind == "LayerMismatch"


# ── Independent layer ──────────────────────────────────────────────

def test_branching_on_a_box_is_rejected(programs):
    result = check_program(parse((programs / "layer_mismatch.ini").read_text()))
    assert result.error.kind == "LayerMismatch"


def test_branching_inside_the_box_is_accepted(programs):
    result = check_program(parse((programs / "sample_if.ini").read_text()))
    assert result.type == Modal(Prod(BOOL, BOOL))


def test_swapping_tensor_of_boxes():
    t = ind("fn p: M Bool (x) M Bool => let a (x) b = p in a (x) b")
    box_pair = Tensor(MB, MB)
    assert check_i({}, t).type == Lolli(box_pair, box_pair)


def test_sample_checks_each_box_in_its_own_slice():
    result = check_i({"d": MB}, ind("sample d, d as x, y in (x, y)"))
    assert result.error.kind == "SharedAcrossTensor"
    assert check_i({"d": MB, "e": MB}, ind("sample d, e as x, y in (x, y)")).type == Modal(Prod(BOOL, BOOL))


def test_sample_body_sees_only_its_binders():
    assert check_i({"d": MB, "b": MB}, ind("sample d as x in b")).error.kind == "UnboundVar"


def test_bad_sample_arity():
    assert check_i({"d": MB}, ind("sample d as x, y in x")).error.kind == "BadSampleArity"


def test_sharing_terms_must_be_boxed():
    assert check_i({}, ind("coin")).error.kind == "LayerMismatch"
    assert check_i({}, ind("sample as in coin")).type == MB
    assert check_i({}, ind("sample true as x in x")).error.kind == "LayerMismatch"


def test_case_branches_may_use_the_same_variable():
    t = ind("case s of inl a => d | inr b => d")
    ctx = {"s": Sum(MB, MB), "d": MB}
    assert check_i(ctx, t).type == MB


def test_layer_annotations_are_checked():
    assert check_i({}, ind("fn x: Bool => x")).error.kind == "LayerMismatch"
    assert check_ini({}, ini("fn x: M Bool => x")).error.kind == "LayerMismatch"


def test_declarations_are_checked_closed():
    source = parse("#lang ini2 layer=I\ndef d : M Bool = e;\nd")
    assert check_program(source).error.kind == "UnboundVar"


def test_abstract_declarations_are_context():
    source = parse("#lang ini2 layer=I\ndef d : M Bool;\ndef e : M Bool;\nd (x) e")
    assert check_program(source).type == Tensor(MB, MB)


# ── Traces and the declarative oracle ──────────────────────────────

@pytest.mark.parametrize("layer, ctx, text", [
    (Layer.INI, {}, "let x = coin in (x, x)"),
    (Layer.INI, {}, "fn z: Bool (x) Bool => let a (x) b = z in (a, b)"),
    (Layer.NI, {"m": Prod(BOOL, BOOL)}, "let x = fst m in if x then m else (true, x)"),
    (Layer.I, {"d": MB}, "sample d as x in (if x then (true, true) else (false, false))"),
])
def test_traces_replay(layer, ctx, text):
    t = parse_term(text, layer)
    result = check_layer(layer, ctx, t)
    assert result.ok
    assert replay_trace(t, result.trace, layer)
    assert not replay_trace(t, result.trace[:-1], layer)
    tampered = (replace(result.trace[0], rule="Coin"),) + result.trace[1:]
    assert not replay_trace(t, tampered, layer)


def test_declarative_checker_agrees_on_examples():
    accepted = ini("fn z: Bool (x) Bool => let a (x) b = z in (a, b)")
    rejected = ini("let x = coin in (fn y: Bool => x (x) y) x")
    assert declarative_type({}, accepted, Layer.INI) == check_ini({}, accepted).type
    assert declarative_type({}, rejected, Layer.INI) is None
    assert declarative_type({"d": MB}, ind("sample d, d as x, y in x"), Layer.I) is None


def test_splits_only_enumerate_contested_variables():
    env = {"a": BOOL, "b": BOOL, "c": BOOL}
    out = splits(env, [frozenset({"a", "c"}), frozenset({"b", "c"})])
    assert len(out) == 2
    assert {"a": BOOL, "c": BOOL} in [parts[0] for parts in out]


def test_usage_context():
    ctx = UsageContext.of({"x": BOOL})
    with pytest.raises(ValueError):
        ctx.extend("x", BOOL)
    consumed = ctx.consume("x", NO_SPAN)
    assert consumed.consumed() == {"x"}
    assert ctx.merge(consumed).consumed() == {"x"}
