from __future__ import annotations

import pytest
from hypothesis import given, settings

from inicalc.errors import ParseError
from inicalc.syntax.ast import (
    BOOL, Case, Const, Lam, Layer, Let, Lolli, Modal, PairShared, PairTensor,
    PrimOp, Prod, Sample, Sum, Tensor, Var, WILDCARD, alpha_eq,
)
from inicalc.syntax.parser import SourceFile, parse, parse_term, parse_type, print_source
from inicalc.syntax.printer import show_term, show_type
from tests.helpers import terms


def test_parse_correlated_pair():
    t = parse_term("let x = coin in (x, x)")
    assert t == Let("x", PrimOp("coin"), PairShared(Var("x"), Var("x")))


def test_parse_annotated_lambda():
    assert parse_term("fn x: Bool -o Bool => x") == Lam("x", Lolli(BOOL, BOOL), Var("x"))


def test_empty_input_is_an_error_at_offset_zero():
    with pytest.raises(ParseError) as exc:
        parse("")
    assert exc.value.span.start == 0
    assert exc.value.span.line == 1


def test_error_position_points_at_offending_token():
    with pytest.raises(ParseError) as exc:
        parse("let x = in x")
    assert exc.value.span.column == 9
    assert exc.value.to_dict()["kind"] == "ParseError"


def test_header_selects_language_and_layer():
    assert parse("true").layer is Layer.INI
    assert parse("#lang ini1\ntrue").layer is Layer.INI
    assert parse("#lang ini2 layer=NI\n(fresh, fresh)").layer is Layer.NI
    assert parse("#lang ini2\nsample as in true").layer is Layer.I


def test_bad_headers():
    with pytest.raises(ParseError):
        parse("#lang ini3\ntrue")
    with pytest.raises(ParseError):
        parse("#lang ini1 layer=I\ntrue")


def test_declarations():
    source = parse("#lang ini2 layer=I\ndef d : M Bool;\ndef e : M Bool = sample as in true;\nd (x) e")
    assert [d.name for d in source.declarations] == ["d", "e"]
    assert source.declarations[0].term is None
    assert source.declarations[1].type == Modal(BOOL)
    assert source.main == PairTensor(Var("d"), Var("e"))


def test_duplicate_declaration_is_rejected():
    with pytest.raises(ParseError):
        parse("def d : Bool = true; def d : Bool = false; d")


def test_let_tensor_binders_must_differ():
    with pytest.raises(ParseError):
        parse("let a (x) a = coin (x) coin in a")


def test_if_is_case_with_wildcards():
    t = parse_term("if coin then true else false", Layer.NI)
    assert t == Case(PrimOp("coin"), WILDCARD, Const(True), WILDCARD, Const(False))


def test_send_is_sample():
    assert parse_term("send d as x in x", Layer.I) == parse_term("sample d as x in x", Layer.I)


def test_sample_keyword_with_no_computations():
    assert parse_term("sample as in coin", Layer.I) == Sample((), (), PrimOp("coin"))
    assert parse_term("send as in coin", Layer.I) == Sample((), (), PrimOp("coin"))


def test_identifiers_may_start_with_a_keyword():
    assert parse_term("samples") == Var("samples")
    assert parse_term("let inside = true in inside") == Let("inside", Const(True), Var("inside"))


@pytest.mark.parametrize("text,column", [
    ("let in = true in in", 5),
    ("fn sample: Bool => true", 4),
    ("let x = coin in as", 17),
])
def test_keywords_are_reserved(text, column):
    with pytest.raises(ParseError) as exc:
        parse(text)
    assert exc.value.span.column == column


def test_sample_arity_mismatch_survives_parsing():
    t = parse_term("sample d as x, y in x", Layer.I)
    assert isinstance(t, Sample)
    assert len(t.args) == 1 and len(t.names) == 2


def test_unicode_operators():
    assert parse_term("coin ⊗ coin") == parse_term("coin (x) coin")
    assert parse_type("Bool ⊗ Bool ⊸ Bool × Bool") == parse_type("Bool (x) Bool -o Bool * Bool")


def test_type_precedence():
    assert parse_type("Bool * Bool (x) Bool") == Tensor(Prod(BOOL, BOOL), BOOL)
    assert parse_type("M Bool (x) M Bool -o M (Bool + Bool)") == Lolli(
        Tensor(Modal(BOOL), Modal(BOOL)), Modal(Sum(BOOL, BOOL)),
    )


def test_spans_cover_nodes():
    t = parse_term("let x = coin in\n  (x, x)")
    assert t.span.line == 1
    assert t.body.span.line == 2
    assert t.body.span.start > t.span.start


def test_comments_are_ignored():
    assert parse_term("-- a coin\ncoin") == PrimOp("coin")


def test_pretty_print():
    assert show_term(PairTensor(Const(True), Const(False))) == "true (x) false"
    assert show_term(Sample((Var("t"),), ("x",), Var("m"))) == "sample t as x in m"
    assert show_term(Sample((), (), PrimOp("coin"))) == "sample as in coin"
    assert show_type(Tensor(Modal(BOOL), Modal(Sum(BOOL, BOOL)))) == "M Bool (x) M (Bool + Bool)"


def test_nested_case_round_trips():
    inner = Case(Var("y"), "a", Var("a"), "b", Var("b"))
    t = Case(Var("x"), "l", inner, "r", inner)
    assert alpha_eq(parse_term(show_term(t), Layer.NI), t)


def test_print_source_round_trips():
    text = "#lang ini2 layer=I\ndef d : M Bool = sample as in coin;\nsample d as x in (x, x)\n"
    source = parse(text)
    assert print_source(source) == text
    assert isinstance(parse(print_source(source)), SourceFile)


@settings(max_examples=200)
@given(terms)
def test_print_then_parse_is_alpha_equivalent(t):
    assert alpha_eq(parse_term(show_term(t)), t)
