from __future__ import annotations

from fractions import Fraction

import pytest

from inicalc.errors import NotAPairSupport, TypeCheckError, UnsupportedType, UsageError
from inicalc.semantics.evaluator import eval_ni
from inicalc.semantics.models import Dist, NameVal, PSet
from inicalc.semantics.oracle import (
    check_factorization, check_tensor_soundness_i, check_tensor_soundness_ini,
    marginals,
)
from inicalc.semantics.values import NameV
from tests.helpers import FF, QUARTER, TT, correlated, fair, ind, ini, ni, pair, uniform_pairs


def test_marginals(dist, pset):
    assert marginals(dist, correlated()) == (fair(), fair())
    assert marginals(dist, uniform_pairs()) == (fair(), fair())
    assert marginals(pset, PSet.of([pair(TT, FF)])) == (PSet.of([TT]), PSet.of([FF]))


def test_marginals_need_pairs(dist):
    with pytest.raises(NotAPairSupport):
        marginals(dist, fair())


def test_correlated_pair_is_not_a_product(dist):
    report = check_factorization(dist, correlated())
    assert not report.is_product
    assert report.witness.pair == pair(TT, FF)
    assert report.witness.joint == 0
    assert report.witness.product == QUARTER


def test_products(dist):
    assert check_factorization(dist, Dist.point(pair(TT, FF))).is_product
    assert check_factorization(dist, uniform_pairs()).is_product
    skewed = Dist.of([(pair(a, b), Fraction(wa * wb, 16)) for a, wa in ((TT, 1), (FF, 3)) for b, wb in ((TT, 2), (FF, 2))])
    assert check_factorization(dist, skewed).is_product


def test_pset_factorization(pset):
    report = check_factorization(pset, PSet.of([pair(TT, TT), pair(FF, FF)]))
    assert not report.is_product
    assert report.witness.pair == pair(TT, FF)
    both = PSet.of([pair(a, b) for a in (TT, FF) for b in (TT, FF)])
    assert check_factorization(pset, both).is_product


def test_name_factorization(name):
    shared = eval_ni(name, {}, ni("let a = fresh in (a, a)"))
    report = check_factorization(name, shared)
    assert not report.is_product
    assert report.name_overlap == {0}
    assert report.marginal1 == NameVal(1, NameV(0))
    assert report.marginal2 == NameVal(1, NameV(0))
    assert report.recombination_equal is False

    apart = eval_ni(name, {}, ni("(fresh, fresh)"))
    report = check_factorization(name, apart)
    assert report.is_product
    assert report.marginal1 == NameVal(1, NameV(0))
    assert report.recombination_equal


def test_name_marginals_only_mention_their_own_names(name):
    joint = NameVal(3, pair(NameV(2), pair(NameV(0), NameV(2))))
    left, right = marginals(name, joint)
    assert left == NameVal(2, NameV(0))
    assert right == NameVal(2, pair(NameV(0), NameV(1)))
    for marginal in (left, right):
        assert all(0 <= i < marginal.count for i in marginal.local_names())


def test_one_level_tensor_soundness(dist):
    report = check_tensor_soundness_ini(dist, ini("coin (x) coin"))
    assert report.is_product
    assert report.marginal1 == fair() and report.marginal2 == fair()
    assert check_tensor_soundness_ini(dist, ini("(let x = coin in x) (x) true")).is_product


def test_one_level_soundness_preconditions(dist):
    with pytest.raises(UsageError):
        check_tensor_soundness_ini(dist, ini("let x = coin in (x, x)"))
    with pytest.raises(TypeCheckError):
        check_tensor_soundness_ini(dist, ini("let x = coin in x (x) x"))
    with pytest.raises(UnsupportedType):
        check_tensor_soundness_ini(dist, ini("(fn x: Bool => x) (x) true"))


def test_independent_layer_soundness(dist, pset, name):
    report = check_tensor_soundness_i(dist, ind("(sample as in coin) (x) (sample as in coin)"))
    assert report.is_product
    assert report.joint == uniform_pairs()

    assert check_tensor_soundness_i(pset, ind("(sample as in amb) (x) (sample as in amb)")).is_product

    report = check_tensor_soundness_i(name, ind("(sample as in fresh) (x) (sample as in fresh)"))
    assert report.is_product
    assert report.name_overlap == frozenset()
    assert name.value_eq(report.joint, NameVal(2, pair(NameV(0), NameV(1))))


def test_independent_layer_needs_boxes(dist):
    with pytest.raises(UsageError):
        check_tensor_soundness_i(dist, ind("sample as in (coin, coin)"))


def test_rejected_program_never_reaches_the_oracle(dist):
    t = ind("let d = sample as in coin in if d then (sample as in true) (x) (sample as in true) "
            "else (sample as in false) (x) (sample as in false)")
    with pytest.raises(TypeCheckError) as exc:
        check_tensor_soundness_i(dist, t)
    assert exc.value.kind == "LayerMismatch"
