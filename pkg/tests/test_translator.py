from __future__ import annotations

import pytest

from inicalc.checker.checker import check_i, check_ni
from inicalc.errors import NotInFragment, UnsupportedType
from inicalc.semantics.evaluator import eval_erased, eval_ini, eval_ni
from inicalc.syntax.ast import BOOL, Lam, Lolli, Modal, PairShared, PairTensor, Prod, Sample, Tensor
from inicalc.syntax.printer import show_term
from inicalc.translator import (
    FragmentTag, check_full_abstraction, classify_fragment, fragments,
    translate_t, translate_t_prime, translate_type_t, translate_type_t_prime,
)
from tests.helpers import ini

ARROW_FREE = FragmentTag.ARROW_FREE
MULT = FragmentTag.MULTIPLICATIVE


@pytest.mark.parametrize("text,expected", [
    ("coin (x) coin", (ARROW_FREE, MULT)),
    ("let x = coin in (x, x)", (ARROW_FREE,)),
    ("fn x: Bool => x", (MULT,)),
    ("let a (x) b = coin (x) true in a (x) b", (ARROW_FREE, MULT)),
    ("fn p: Bool * Bool => fst p", ()),
])
def test_fragments(text, expected):
    assert fragments(ini(text)) == expected


def test_classify_prefers_the_arrow_free_fragment():
    assert classify_fragment(ini("coin (x) coin")) is ARROW_FREE
    assert classify_fragment(ini("fn x: Bool => x")) is MULT
    assert classify_fragment(ini("fn p: Bool * Bool => fst p")) is None


def test_types():
    assert translate_type_t(Tensor(BOOL, Prod(BOOL, BOOL))) == Prod(BOOL, Prod(BOOL, BOOL))
    assert translate_type_t_prime(Tensor(BOOL, BOOL)) == Tensor(Modal(BOOL), Modal(BOOL))
    with pytest.raises(NotInFragment):
        translate_type_t_prime(Prod(BOOL, BOOL))


def test_tensor_becomes_sharing_pair():
    image, ty = translate_t(ini("coin (x) coin"), Tensor(BOOL, BOOL))
    assert isinstance(image, PairShared)
    assert ty == Prod(BOOL, BOOL)
    assert check_ni({}, image).type == ty


def test_constants_are_unchanged():
    image, ty = translate_t(ini("true"), BOOL)
    assert show_term(image) == "true"
    assert ty == BOOL


def test_let_tensor_image_keeps_its_meaning(dist):
    source = ini("let a (x) b = coin (x) true in b (x) a")
    image, ty = translate_t(source, Tensor(BOOL, BOOL))
    assert check_ni({}, image).type == ty
    assert eval_ni(dist, {}, image) == eval_ini(dist, {}, source)


def test_constants_become_boxes():
    image, ty = translate_t_prime(ini("coin"), BOOL)
    assert isinstance(image, Sample)
    assert image.args == () and image.names == ()
    assert show_term(image.body) == "coin"
    assert ty == Modal(BOOL)


def test_lambda_annotation_is_boxed():
    image, ty = translate_t_prime(ini("fn x: Bool => x"), Lolli(BOOL, BOOL))
    assert isinstance(image, Lam)
    assert image.annotation == Modal(BOOL)
    assert check_i({}, image).type == ty


def test_tensor_of_boxes(dist):
    image, ty = translate_t_prime(ini("coin (x) true"), Tensor(BOOL, BOOL))
    assert isinstance(image, PairTensor)
    assert show_term(image) == "(sample as in coin) (x) (sample as in true)"
    assert check_i({}, image).type == ty
    assert eval_erased(dist, {}, image, ty) == eval_ini(dist, {}, ini("coin (x) true"))


def test_outside_the_fragment():
    with pytest.raises(NotInFragment):
        translate_t(ini("fn x: Bool => x"), BOOL)
    with pytest.raises(NotInFragment):
        translate_t_prime(ini("let x = coin in (x, x)"), Prod(BOOL, BOOL))


def test_full_abstraction_on_known_pairs():
    pairs = [
        (ini("let x = coin in (x, x)"), ini("(coin, coin)")),
        (ini("coin (x) coin"), ini("coin (x) coin")),
        (ini("(fn x: Bool => x) coin"), ini("coin")),
    ]
    verdicts = check_full_abstraction(pairs[:2], ARROW_FREE)
    assert [v.source_equal for v in verdicts] == [False, True]
    assert all(v.holds for v in verdicts)

    verdict, = check_full_abstraction(pairs[2:], MULT)
    assert verdict.source_equal and verdict.target_equal


def test_full_abstraction_needs_matching_observable_types():
    with pytest.raises(UnsupportedType):
        check_full_abstraction([(ini("coin"), ini("coin (x) coin"))], ARROW_FREE)
