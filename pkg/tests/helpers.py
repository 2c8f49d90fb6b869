"""Shorthands and hypothesis strategies shared by the test modules."""

from __future__ import annotations

from fractions import Fraction

from hypothesis import strategies as st

from inicalc.semantics.models import Dist, NameVal, PSet
from inicalc.semantics.values import BoolV, NameV, PairV
from inicalc.syntax.ast import (
    BOOL, App, Case, Const, Inj, Lam, Layer, Let, LetTensor, PairShared,
    PairTensor, PrimOp, Proj, Sample, Var,
)
from inicalc.syntax.parser import parse_term

TT, FF = BoolV(True), BoolV(False)
HALF, QUARTER = Fraction(1, 2), Fraction(1, 4)


def ini(text: str):
    return parse_term(text, Layer.INI)


def ni(text: str):
    return parse_term(text, Layer.NI)


def ind(text: str):
    return parse_term(text, Layer.I)


def pair(a, b) -> PairV:
    return PairV(a, b)


def fair() -> Dist:
    return Dist.of([(TT, HALF), (FF, HALF)])


def correlated() -> Dist:
    return Dist.of([(pair(TT, TT), HALF), (pair(FF, FF), HALF)])


def uniform_pairs() -> Dist:
    return Dist.of([(pair(a, b), QUARTER) for a in (TT, FF) for b in (TT, FF)])


# ── Terms ──────────────────────────────────────────────────────────

names = st.sampled_from(["x", "y", "z"])
binder_pairs = st.sampled_from([("x", "y"), ("y", "z"), ("z", "x")])
leaves = st.one_of(
    st.builds(Var, names),
    st.builds(Const, st.booleans()),
    st.just(PrimOp("coin")),
)


def _formers(children):
    return st.one_of(
        st.builds(PairShared, children, children),
        st.builds(PairTensor, children, children),
        st.builds(Proj, st.sampled_from([1, 2]), children),
        st.builds(App, children, children),
        st.builds(Lam, names, st.just(BOOL), children),
        st.builds(Let, names, children, children),
        binder_pairs.flatmap(lambda xy: st.builds(LetTensor, st.just(xy[0]), st.just(xy[1]), children, children)),
        st.builds(Inj, st.sampled_from([1, 2]), children, st.just(BOOL)),
        st.builds(Case, children, names, children, names, children),
        st.builds(lambda c, a, b: Case(c, "_", a, "_", b), children, children, children),
        st.builds(Sample, st.tuples(children), st.tuples(names), children),
        st.builds(lambda body: Sample((), (), body), children),
    )


terms = st.recursive(leaves, _formers, max_leaves=8)
closed_leaves = st.one_of(st.builds(Const, st.booleans()), st.just(PrimOp("coin")))


# ── Monadic values ─────────────────────────────────────────────────

bools = st.builds(BoolV, st.booleans())


@st.composite
def dists(draw):
    raw = draw(st.lists(st.tuples(st.booleans(), st.integers(1, 5)), min_size=1, max_size=3))
    total = sum(w for _, w in raw)
    return Dist.of((BoolV(b), Fraction(w, total)) for b, w in raw)


psets = st.lists(bools, min_size=1, max_size=3).map(PSet.of)


@st.composite
def name_vals(draw):
    count = draw(st.integers(0, 2))
    leaf = bools if count == 0 else st.one_of(bools, st.builds(NameV, st.integers(0, count - 1)))
    payload = draw(st.recursive(leaf, lambda c: st.builds(PairV, c, c), max_leaves=4))
    return NameVal(count, payload)


MONADIC = {"dist": dists(), "pset": psets, "name": name_vals()}
