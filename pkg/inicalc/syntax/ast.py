"""Abstract syntax shared by both calculi: types, terms, spans, substitution."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Union

WILDCARD = "_"


# ── Layers and spans ───────────────────────────────────────────────

class Layer(str, Enum):
    INI = "INI"  # one-level affine language
    NI = "NI"    # sharing layer of the two-level language
    I = "I"      # independent layer of the two-level language


@dataclass(frozen=True)
class Span:
    start: int = 0
    end: int = 0
    line: int = 1
    column: int = 1

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"

    def to_dict(self) -> dict:
        return {"start": self.start, "end": self.end, "line": self.line, "column": self.column}


NO_SPAN = Span()


def _meta_span():
    return field(default=NO_SPAN, compare=False, repr=False, kw_only=True)


def _meta_layer():
    return field(default=Layer.INI, compare=False, repr=False, kw_only=True)


# ── Types ──────────────────────────────────────────────────────────

@dataclass(frozen=True)
class BoolT:
    pass


@dataclass(frozen=True)
class NameT:
    pass


@dataclass(frozen=True)
class Prod:
    """Sharing product ``A * B``."""
    left: TypeExpr
    right: TypeExpr


@dataclass(frozen=True)
class Tensor:
    """Separating product ``A (x) B``."""
    left: TypeExpr
    right: TypeExpr


@dataclass(frozen=True)
class Sum:
    """``A + B`` in the sharing layer, ``A (+) B`` in the independent one."""
    left: TypeExpr
    right: TypeExpr


@dataclass(frozen=True)
class Lolli:
    param: TypeExpr
    result: TypeExpr


@dataclass(frozen=True)
class Modal:
    """``M T``: a boxed sharing-layer computation."""
    inner: TypeExpr


TypeExpr = Union[BoolT, NameT, Prod, Tensor, Sum, Lolli, Modal]

BOOL = BoolT()
NAME = NameT()


def is_ini_type(ty: TypeExpr) -> bool:
    match ty:
        case BoolT():
            return True
        case Prod(a, b) | Tensor(a, b):
            return is_ini_type(a) and is_ini_type(b)
        case Lolli(a, b):
            return is_ini_type(a) and is_ini_type(b)
    return False


def is_ni_type(ty: TypeExpr) -> bool:
    match ty:
        case BoolT() | NameT():
            return True
        case Prod(a, b) | Sum(a, b):
            return is_ni_type(a) and is_ni_type(b)
    return False


def is_i_type(ty: TypeExpr) -> bool:
    match ty:
        case Modal(inner):
            return is_ni_type(inner)
        case Tensor(a, b) | Sum(a, b) | Lolli(a, b):
            return is_i_type(a) and is_i_type(b)
    return False


def mentions_name(ty: TypeExpr) -> bool:
    match ty:
        case NameT():
            return True
        case BoolT():
            return False
        case Modal(inner):
            return mentions_name(inner)
        case Lolli(a, b):
            return mentions_name(a) or mentions_name(b)
        case Prod(a, b) | Tensor(a, b) | Sum(a, b):
            return mentions_name(a) or mentions_name(b)
    return False


def contains_arrow(ty: TypeExpr) -> bool:
    match ty:
        case Lolli():
            return True
        case Modal(inner):
            return contains_arrow(inner)
        case Prod(a, b) | Tensor(a, b) | Sum(a, b):
            return contains_arrow(a) or contains_arrow(b)
    return False


# ── Terms ──────────────────────────────────────────────────────────
# Spans and layer tags are metadata: they take no part in equality.

@dataclass(frozen=True)
class Var:
    name: str
    span: Span = _meta_span()
    layer: Layer = _meta_layer()


@dataclass(frozen=True)
class Const:
    value: bool
    span: Span = _meta_span()
    layer: Layer = _meta_layer()


@dataclass(frozen=True)
class PrimOp:
    """A primitive: nullary effects (coin, amb, fresh) or a unary pure op."""
    op: str
    args: tuple[Term, ...] = ()
    span: Span = _meta_span()
    layer: Layer = _meta_layer()


@dataclass(frozen=True)
class PairShared:
    left: Term
    right: Term
    span: Span = _meta_span()
    layer: Layer = _meta_layer()


@dataclass(frozen=True)
class Proj:
    index: int
    body: Term
    span: Span = _meta_span()
    layer: Layer = _meta_layer()


@dataclass(frozen=True)
class PairTensor:
    left: Term
    right: Term
    span: Span = _meta_span()
    layer: Layer = _meta_layer()


@dataclass(frozen=True)
class LetTensor:
    left_name: str
    right_name: str
    bound: Term
    body: Term
    span: Span = _meta_span()
    layer: Layer = _meta_layer()


@dataclass(frozen=True)
class Inj:
    index: int
    body: Term
    other: TypeExpr | None = None
    span: Span = _meta_span()
    layer: Layer = _meta_layer()


@dataclass(frozen=True)
class Case:
    scrutinee: Term
    left_name: str
    left: Term
    right_name: str
    right: Term
    span: Span = _meta_span()
    layer: Layer = _meta_layer()


@dataclass(frozen=True)
class Lam:
    param: str
    annotation: TypeExpr
    body: Term
    span: Span = _meta_span()
    layer: Layer = _meta_layer()


@dataclass(frozen=True)
class App:
    fn: Term
    arg: Term
    span: Span = _meta_span()
    layer: Layer = _meta_layer()


@dataclass(frozen=True)
class Let:
    name: str
    bound: Term
    body: Term
    span: Span = _meta_span()
    layer: Layer = _meta_layer()


@dataclass(frozen=True)
class Sample:
    """``sample t1, ..., tn as x1, ..., xn in M``.

    Arguments and binders are kept as separate tuples so that a length
    mismatch survives parsing and is reported by the checker.
    """
    args: tuple[Term, ...]
    names: tuple[str, ...]
    body: Term
    span: Span = _meta_span()
    layer: Layer = _meta_layer()

    @property
    def bindings(self) -> tuple[tuple[Term, str], ...]:
        return tuple(zip(self.args, self.names))


Term = Union[
    Var, Const, PrimOp, PairShared, Proj, PairTensor, LetTensor,
    Inj, Case, Lam, App, Let, Sample,
]


# ── Free variables ─────────────────────────────────────────────────

def free_vars(t: Term) -> frozenset[str]:
    match t:
        case Var(name):
            return frozenset({name})
        case Const():
            return frozenset()
        case PrimOp(_, args):
            return frozenset().union(*(free_vars(a) for a in args))
        case PairShared(a, b) | PairTensor(a, b) | App(a, b):
            return free_vars(a) | free_vars(b)
        case Proj(_, body) | Inj(_, body):
            return free_vars(body)
        case LetTensor(x, y, bound, body):
            return free_vars(bound) | (free_vars(body) - {x, y})
        case Case(s, x, left, y, right):
            return free_vars(s) | (free_vars(left) - {x}) | (free_vars(right) - {y})
        case Lam(x, _, body):
            return free_vars(body) - {x}
        case Let(x, bound, body):
            return free_vars(bound) | (free_vars(body) - {x})
        case Sample(args, names, body):
            inner = frozenset().union(*(free_vars(a) for a in args))
            return inner | (free_vars(body) - set(names))
    raise TypeError(f"not a term: {t!r}")


def bound_names(t: Term) -> frozenset[str]:
    """Every binder name occurring anywhere in ``t``."""
    match t:
        case Var() | Const():
            return frozenset()
        case PrimOp(_, args):
            return frozenset().union(*(bound_names(a) for a in args))
        case PairShared(a, b) | PairTensor(a, b) | App(a, b):
            return bound_names(a) | bound_names(b)
        case Proj(_, body) | Inj(_, body):
            return bound_names(body)
        case LetTensor(x, y, bound, body):
            return {x, y} | bound_names(bound) | bound_names(body)
        case Case(s, x, left, y, right):
            return {x, y} | bound_names(s) | bound_names(left) | bound_names(right)
        case Lam(x, _, body):
            return {x} | bound_names(body)
        case Let(x, bound, body):
            return {x} | bound_names(bound) | bound_names(body)
        case Sample(args, names, body):
            inner = frozenset().union(*(bound_names(a) for a in args))
            return inner | set(names) | bound_names(body)
    raise TypeError(f"not a term: {t!r}")


def fresh_name(base: str, avoid: set[str] | frozenset[str]) -> str:
    root = base.rstrip("0123456789'") or "v"
    if root == WILDCARD:
        root = "v"
    i = 1
    while f"{root}{i}" in avoid:
        i += 1
    return f"{root}{i}"


# ── Substitution ───────────────────────────────────────────────────

def rename(t: Term, old: str, new: str) -> Term:
    """Rename free occurrences of ``old``; ``new`` must not occur in ``t``."""
    match t:
        case Var(name):
            return replace(t, name=new) if name == old else t
        case Const():
            return t
        case PrimOp(_, args):
            return replace(t, args=tuple(rename(a, old, new) for a in args))
        case PairShared(a, b) | PairTensor(a, b):
            return replace(t, left=rename(a, old, new), right=rename(b, old, new))
        case App(f, a):
            return replace(t, fn=rename(f, old, new), arg=rename(a, old, new))
        case Proj(_, body) | Inj(_, body):
            return replace(t, body=rename(body, old, new))
        case LetTensor(x, y, bound, body):
            body = body if old in (x, y) else rename(body, old, new)
            return replace(t, bound=rename(bound, old, new), body=body)
        case Case(s, x, left, y, right):
            return replace(
                t,
                scrutinee=rename(s, old, new),
                left=left if x == old else rename(left, old, new),
                right=right if y == old else rename(right, old, new),
            )
        case Lam(x, _, body):
            return t if x == old else replace(t, body=rename(body, old, new))
        case Let(x, bound, body):
            body = body if x == old else rename(body, old, new)
            return replace(t, bound=rename(bound, old, new), body=body)
        case Sample(args, names, body):
            body = body if old in names else rename(body, old, new)
            return replace(t, args=tuple(rename(a, old, new) for a in args), body=body)
    raise TypeError(f"not a term: {t!r}")


def substitute(t: Term, x: str, s: Term) -> Term:
    """Capture-avoiding ``t[x := s]``."""
    return _subst(t, x, s, free_vars(s))


def _under(names: tuple[str, ...], body: Term, x: str, s: Term, fv_s: frozenset[str]) -> tuple[tuple[str, ...], Term]:
    if x in names or x not in free_vars(body):
        return names, body
    taken = set(fv_s) | free_vars(body) | bound_names(body) | set(names) | {x}
    renamed: list[str] = []
    for name in names:
        if name in fv_s:
            new = fresh_name(name, taken)
            taken.add(new)
            body = rename(body, name, new)
            name = new
        renamed.append(name)
    return tuple(renamed), _subst(body, x, s, fv_s)


def _subst(t: Term, x: str, s: Term, fv_s: frozenset[str]) -> Term:
    match t:
        case Var(name):
            return s if name == x else t
        case Const():
            return t
        case PrimOp(_, args):
            return replace(t, args=tuple(_subst(a, x, s, fv_s) for a in args))
        case PairShared(a, b) | PairTensor(a, b):
            return replace(t, left=_subst(a, x, s, fv_s), right=_subst(b, x, s, fv_s))
        case App(f, a):
            return replace(t, fn=_subst(f, x, s, fv_s), arg=_subst(a, x, s, fv_s))
        case Proj(_, body) | Inj(_, body):
            return replace(t, body=_subst(body, x, s, fv_s))
        case LetTensor(a, b, bound, body):
            (a, b), body = _under((a, b), body, x, s, fv_s)
            return replace(t, left_name=a, right_name=b, bound=_subst(bound, x, s, fv_s), body=body)
        case Case(scrutinee, a, left, b, right):
            (a,), left = _under((a,), left, x, s, fv_s)
            (b,), right = _under((b,), right, x, s, fv_s)
            return replace(
                t,
                scrutinee=_subst(scrutinee, x, s, fv_s),
                left_name=a, left=left, right_name=b, right=right,
            )
        case Lam(a, _, body):
            (a,), body = _under((a,), body, x, s, fv_s)
            return replace(t, param=a, body=body)
        case Let(a, bound, body):
            (a,), body = _under((a,), body, x, s, fv_s)
            return replace(t, name=a, bound=_subst(bound, x, s, fv_s), body=body)
        case Sample(args, names, body):
            names, body = _under(names, body, x, s, fv_s)
            return replace(t, args=tuple(_subst(a, x, s, fv_s) for a in args), names=names, body=body)
    raise TypeError(f"not a term: {t!r}")


# ── Alpha-equivalence ──────────────────────────────────────────────

def alpha_eq(t: Term, u: Term) -> bool:
    return _alpha(t, u, {}, {}, 0)


def _bind(env: dict[str, int], names: tuple[str, ...], level: int) -> dict[str, int]:
    out = dict(env)
    for i, name in enumerate(names):
        out[name] = level + i
    return out


def _alpha(t: Term, u: Term, left: dict[str, int], right: dict[str, int], level: int) -> bool:
    if type(t) is not type(u):
        return False
    match t, u:
        case Var(a), Var(b):
            la, lb = left.get(a), right.get(b)
            if la is None and lb is None:
                return a == b
            return la == lb
        case Const(a), Const(b):
            return a == b
        case PrimOp(op1, args1), PrimOp(op2, args2):
            return op1 == op2 and len(args1) == len(args2) and all(
                _alpha(a, b, left, right, level) for a, b in zip(args1, args2)
            )
        case (PairShared(a1, b1), PairShared(a2, b2)) | (PairTensor(a1, b1), PairTensor(a2, b2)) | (App(a1, b1), App(a2, b2)):
            return _alpha(a1, a2, left, right, level) and _alpha(b1, b2, left, right, level)
        case Proj(i, b1), Proj(j, b2):
            return i == j and _alpha(b1, b2, left, right, level)
        case Inj(i, b1, o1), Inj(j, b2, o2):
            return i == j and o1 == o2 and _alpha(b1, b2, left, right, level)
        case LetTensor(x1, y1, s1, b1), LetTensor(x2, y2, s2, b2):
            return _alpha(s1, s2, left, right, level) and _alpha(
                b1, b2, _bind(left, (x1, y1), level), _bind(right, (x2, y2), level), level + 2
            )
        case Case(s1, x1, l1, y1, r1), Case(s2, x2, l2, y2, r2):
            return (
                _alpha(s1, s2, left, right, level)
                and _alpha(l1, l2, _bind(left, (x1,), level), _bind(right, (x2,), level), level + 1)
                and _alpha(r1, r2, _bind(left, (y1,), level), _bind(right, (y2,), level), level + 1)
            )
        case Lam(x1, a1, b1), Lam(x2, a2, b2):
            return a1 == a2 and _alpha(b1, b2, _bind(left, (x1,), level), _bind(right, (x2,), level), level + 1)
        case Let(x1, s1, b1), Let(x2, s2, b2):
            return _alpha(s1, s2, left, right, level) and _alpha(
                b1, b2, _bind(left, (x1,), level), _bind(right, (x2,), level), level + 1
            )
        case Sample(args1, names1, b1), Sample(args2, names2, b2):
            if len(args1) != len(args2) or len(names1) != len(names2):
                return False
            if not all(_alpha(a, b, left, right, level) for a, b in zip(args1, args2)):
                return False
            n = len(names1)
            return _alpha(b1, b2, _bind(left, names1, level), _bind(right, names2, level), level + n)
    return False


# ── Layer tags and measures ────────────────────────────────────────

def relayer(t: Term, layer: Layer) -> Term:
    """Tag every node with ``layer``; sample bodies always live in NI."""
    match t:
        case Var() | Const():
            return replace(t, layer=layer)
        case PrimOp(_, args):
            return replace(t, args=tuple(relayer(a, layer) for a in args), layer=layer)
        case PairShared(a, b) | PairTensor(a, b):
            return replace(t, left=relayer(a, layer), right=relayer(b, layer), layer=layer)
        case App(f, a):
            return replace(t, fn=relayer(f, layer), arg=relayer(a, layer), layer=layer)
        case Proj(_, body) | Inj(_, body):
            return replace(t, body=relayer(body, layer), layer=layer)
        case LetTensor(_, _, bound, body) | Let(_, bound, body):
            return replace(t, bound=relayer(bound, layer), body=relayer(body, layer), layer=layer)
        case Case(s, _, left, _, right):
            return replace(
                t, scrutinee=relayer(s, layer), left=relayer(left, layer),
                right=relayer(right, layer), layer=layer,
            )
        case Lam(_, _, body):
            return replace(t, body=relayer(body, layer), layer=layer)
        case Sample(args, _, body):
            return replace(
                t, args=tuple(relayer(a, layer) for a in args),
                body=relayer(body, Layer.NI), layer=layer,
            )
    raise TypeError(f"not a term: {t!r}")


def children(t: Term) -> tuple[Term, ...]:
    match t:
        case Var() | Const():
            return ()
        case PrimOp(_, args):
            return args
        case PairShared(a, b) | PairTensor(a, b) | App(a, b):
            return (a, b)
        case Proj(_, body) | Inj(_, body) | Lam(_, _, body):
            return (body,)
        case LetTensor(_, _, bound, body) | Let(_, bound, body):
            return (bound, body)
        case Case(s, _, left, _, right):
            return (s, left, right)
        case Sample(args, _, body):
            return (*args, body)
    raise TypeError(f"not a term: {t!r}")


def term_depth(t: Term) -> int:
    kids = children(t)
    return 1 + max((term_depth(k) for k in kids), default=0)


def term_size(t: Term) -> int:
    return 1 + sum(term_size(k) for k in children(t))
