from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from inicalc.errors import IncomparableValue, PrimUnknown, UsageError
from inicalc.semantics.models import Dist, ModelId, NameVal, PSet, get_model
from inicalc.semantics.values import BoolV, ClosV, NameV, PairV
from inicalc.syntax.ast import Layer, Var
from tests.helpers import FF, HALF, MONADIC, TT, correlated, fair, pair, uniform_pairs


def test_unit(dist, pset, name):
    assert dist.unit(TT) == Dist(((TT, Fraction(1)),))
    assert pset.unit(TT) == PSet((TT,))
    assert name.unit(pair(TT, FF)) == NameVal(0, pair(TT, FF))


def test_dist_bind(dist):
    assert dist.bind(fair(), dist.unit) == fair()
    assert dist.bind(fair(), lambda x: dist.unit(pair(x, x))) == correlated()


def test_pset_bind(pset):
    both = PSet.of([TT, FF])
    assert pset.bind(both, lambda x: PSet.of([x, BoolV(not x.value)])) == both


def test_coin(dist):
    assert dist.primitive("coin") == fair()
    assert dist.pair_product(fair(), fair()) == uniform_pairs()
    assert dist.bind(fair(), lambda a: dist.bind(fair(), lambda b: dist.unit(pair(a, b)))) == uniform_pairs()


def test_amb(pset):
    amb = pset.primitive("amb")
    assert amb == PSet.of([TT, FF])
    assert pset.bind(amb, lambda x: pset.unit(BoolV(not x.value))) == amb
    assert pset.pair_product(amb, pset.unit(TT)) == PSet.of([pair(TT, TT), pair(FF, TT)])


def test_fresh(name):
    fresh = name.primitive("fresh")
    assert fresh == NameVal(1, NameV(0))
    distinct = name.bind(fresh, lambda a: name.bind(name.primitive("fresh"), lambda b: name.unit(BoolV(a == b))))
    assert distinct == NameVal(2, FF)
    same = name.bind(fresh, lambda a: name.unit(BoolV(a == a)))
    assert same == NameVal(1, TT)


def test_name_binds_do_not_depend_on_history(name):
    def three_names():
        fresh = name.primitive("fresh")
        return name.bind(fresh, lambda a: name.bind(fresh, lambda b: name.bind(
            fresh, lambda c: name.unit(PairV(a, PairV(b, c))))))

    first = three_names()
    assert first.count == 3
    assert len({first.payload.first, first.payload.second.first, first.payload.second.second}) == 3

    def boom(_):
        raise RuntimeError("continuation failed")

    with pytest.raises(RuntimeError):
        name.bind(name.primitive("fresh"), boom)
    assert three_names() == first
    assert get_model("name").bind(name.primitive("fresh"), name.unit) == name.bind(name.primitive("fresh"), name.unit)

def test_primitives_belong_to_one_model(dist, pset, name):
    with pytest.raises(PrimUnknown):
        dist.primitive("amb")
    with pytest.raises(PrimUnknown):
        pset.primitive("fresh")
    with pytest.raises(PrimUnknown):
        name.primitive("coin")
    assert name.provides("eqn") and not dist.provides("eqn")
    assert dist.provides("not")


def test_value_eq(dist, name):
    assert dist.value_eq(fair(), Dist(((FF, HALF), (TT, HALF))))
    assert not dist.value_eq(fair(), Dist.of([(TT, Fraction(1, 3)), (FF, Fraction(2, 3))]))
    assert name.value_eq(NameVal(2, pair(NameV(0), NameV(1))), NameVal(2, pair(NameV(1), NameV(0))))
    assert not name.value_eq(NameVal(1, pair(NameV(0), NameV(0))), NameVal(2, pair(NameV(0), NameV(1))))


def test_unobserved_names_do_not_count(name):
    assert name.value_eq(NameVal(1, TT), NameVal(0, TT))


def test_closures_are_incomparable(dist):
    closure = ClosV("x", Var("x"), (), Layer.INI)
    with pytest.raises(IncomparableValue):
        dist.value_eq(Dist.point(closure), Dist.point(closure))


def test_dist_rejects_bad_weights():
    with pytest.raises(ValueError):
        Dist.of([(TT, HALF)])
    with pytest.raises(ValueError):
        Dist.of([(TT, Fraction(3, 2)), (FF, Fraction(-1, 2))])


def test_dist_is_canonically_ordered():
    d = Dist.of([(FF, HALF), (TT, HALF)])
    assert d.support() == (TT, FF)
    assert d.show() == "{tt: 1/2, ff: 1/2}"


def test_name_canonical_form():
    assert NameVal(2, pair(NameV(1), NameV(0))).canonical() == NameVal(2, pair(NameV(0), NameV(1)))
    assert NameVal(3, NameV(2)).trimmed() == NameVal(1, NameV(0))


def test_unknown_model():
    with pytest.raises(UsageError):
        get_model("quantum")


# ── Laws on generated values ───────────────────────────────────────

model_ids = st.sampled_from([m.value for m in ModelId])


def _kleisli(model, m):
    return lambda v: model.map(m, lambda w: PairV(v, w))


@given(st.data(), model_ids)
def test_left_unit(data, model_id):
    model = get_model(model_id)
    f = _kleisli(model, data.draw(MONADIC[model_id]))
    v = data.draw(st.builds(BoolV, st.booleans()))
    assert model.value_eq(model.bind(model.unit(v), f), f(v))


@given(st.data(), model_ids)
def test_right_unit(data, model_id):
    model = get_model(model_id)
    m = data.draw(MONADIC[model_id])
    assert model.value_eq(model.bind(m, model.unit), m)


@given(st.data(), model_ids)
def test_associativity(data, model_id):
    model = get_model(model_id)
    m, a, b = (data.draw(MONADIC[model_id]) for _ in range(3))
    f, g = _kleisli(model, a), _kleisli(model, b)
    left = model.bind(model.bind(m, f), g)
    right = model.bind(m, lambda x: model.bind(f(x), g))
    assert model.value_eq(left, right)


@given(st.data(), model_ids)
def test_commutativity(data, model_id):
    model = get_model(model_id)
    a, b = data.draw(MONADIC[model_id]), data.draw(MONADIC[model_id])
    one = model.bind(a, lambda x: model.bind(b, lambda y: model.unit(PairV(x, y))))
    two = model.bind(b, lambda y: model.bind(a, lambda x: model.unit(PairV(x, y))))
    assert model.value_eq(one, two)
    assert model.value_eq(one, model.pair_product(a, b))


@given(st.data())
def test_dist_stays_normalized(data):
    model = get_model("dist")
    m = data.draw(MONADIC["dist"])
    for _ in range(3):
        m = model.bind(m, _kleisli(model, data.draw(MONADIC["dist"])))
    assert sum(w for _, w in m.entries) == 1
    assert all(w > 0 for _, w in m.entries)
