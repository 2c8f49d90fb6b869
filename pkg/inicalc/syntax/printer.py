"""Pretty printer producing the concrete syntax accepted by the parser."""

from __future__ import annotations

from inicalc.syntax.ast import (
    WILDCARD, App, BoolT, Case, Const, Inj, Lam, Let, LetTensor, Lolli, Modal,
    NameT, PairShared, PairTensor, PrimOp, Prod, Proj, Sample, Sum, Tensor,
    Term, TypeExpr, Var,
)

# ── Types ──────────────────────────────────────────────────────────
# Precedence, loosest first: -o, (+), (x), +, *, atoms.

_LOLLI, _OPLUS, _TENSOR, _PLUS, _TIMES, _ATOM = range(6)


def _is_independent_sum(ty: TypeExpr) -> bool:
    # Every leaf of an I-layer type is boxed, so a sum mentioning M is an I sum.
    match ty:
        case Modal():
            return True
        case Tensor() | Lolli():
            return True
        case Sum(a, b) | Prod(a, b):
            return _is_independent_sum(a) or _is_independent_sum(b)
    return False


def show_type(ty: TypeExpr) -> str:
    return _type(ty, _LOLLI)


def _wrap(text: str, needed: bool) -> str:
    return f"({text})" if needed else text


def _type(ty: TypeExpr, level: int) -> str:
    match ty:
        case BoolT():
            return "Bool"
        case NameT():
            return "Name"
        case Modal(inner):
            return _wrap(f"M {_type(inner, _ATOM)}", level > _TIMES)
        case Lolli(a, b):
            return _wrap(f"{_type(a, _OPLUS)} -o {_type(b, _LOLLI)}", level > _LOLLI)
        case Sum(a, b) if _is_independent_sum(ty):
            return _wrap(f"{_type(a, _OPLUS)} (+) {_type(b, _TENSOR)}", level > _OPLUS)
        case Tensor(a, b):
            return _wrap(f"{_type(a, _TENSOR)} (x) {_type(b, _PLUS)}", level > _TENSOR)
        case Sum(a, b):
            return _wrap(f"{_type(a, _PLUS)} + {_type(b, _TIMES)}", level > _PLUS)
        case Prod(a, b):
            return _wrap(f"{_type(a, _TIMES)} * {_type(b, _ATOM)}", level > _TIMES)
    raise TypeError(f"not a type: {ty!r}")


# ── Terms ──────────────────────────────────────────────────────────
# Binder forms (let, fn, case, if, sample) extend as far right as possible,
# so they are parenthesised everywhere except keyword-delimited positions.

_BINDER, _TENSOR_T, _APP, _ATOM_T = range(4)


def show_term(t: Term) -> str:
    return _term(t, _BINDER)


def _term(t: Term, level: int) -> str:
    match t:
        case Var(name):
            return name
        case Const(value):
            return "true" if value else "false"
        case PrimOp(op, ()):
            return op
        case PrimOp(op, (arg,)):
            return _wrap(f"{op} {_term(arg, _ATOM_T)}", level > _APP)
        case PairShared(a, b):
            return f"({_term(a, _BINDER)}, {_term(b, _BINDER)})"
        case Proj(index, body):
            keyword = "fst" if index == 1 else "snd"
            return _wrap(f"{keyword} {_term(body, _ATOM_T)}", level > _APP)
        case PairTensor(a, b):
            return _wrap(f"{_term(a, _TENSOR_T)} (x) {_term(b, _APP)}", level > _TENSOR_T)
        case Inj(index, body, other):
            keyword = "inl" if index == 1 else "inr"
            if other is not None:
                keyword = f"{keyword}[{show_type(other)}]"
            return _wrap(f"{keyword} {_term(body, _ATOM_T)}", level > _APP)
        case App(fn, arg):
            return _wrap(f"{_term(fn, _APP)} {_term(arg, _ATOM_T)}", level > _APP)
        case Let(name, bound, body):
            text = f"let {name} = {_term(bound, _BINDER)} in {_term(body, _BINDER)}"
        case LetTensor(x, y, bound, body):
            text = f"let {x} (x) {y} = {_term(bound, _BINDER)} in {_term(body, _BINDER)}"
        case Lam(param, annotation, body):
            text = f"fn {param}: {show_type(annotation)} => {_term(body, _BINDER)}"
        case Case(s, x, left, y, right) if x == WILDCARD and y == WILDCARD:
            text = f"if {_term(s, _BINDER)} then {_term(left, _BINDER)} else {_term(right, _BINDER)}"
        case Case(s, x, left, y, right):
            text = (
                f"case {_term(s, _BINDER)} of inl {x} => {_term(left, _BINDER)}"
                f" | inr {y} => {_term(right, _BINDER)}"
            )
        case Sample(args, names, body):
            parts = ["sample"]
            if args:
                parts.append(", ".join(_term(a, _BINDER) for a in args))
            parts.append("as")
            if names:
                parts.append(", ".join(names))
            parts.append(f"in {_term(body, _BINDER)}")
            text = " ".join(parts)
        case _:
            raise TypeError(f"not a term: {t!r}")
    return _wrap(text, level > _BINDER)
