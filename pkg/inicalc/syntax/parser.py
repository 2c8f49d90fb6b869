"""Parser for ``.ini`` source files (both calculi) built on a lark LALR grammar."""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass

from lark import Lark, Transformer, v_args
from lark.exceptions import LarkError, UnexpectedCharacters, UnexpectedInput, VisitError

from inicalc.errors import ParseError
from inicalc.syntax.ast import (
    BOOL, NAME, NO_SPAN, WILDCARD, App, Case, Const, Inj, Lam, Layer, Let,
    LetTensor, Lolli, Modal, PairShared, PairTensor, PrimOp, Prod, Proj,
    Sample, Span, Sum, Tensor, Term, TypeExpr, Var, relayer,
)
from inicalc.syntax.printer import show_term, show_type

logger = logging.getLogger(__name__)

GRAMMAR = r"""
start: decl* term

decl: "def" NAME ":" type ["=" term] ";"

?term: "let" binder "=" term "in" term                          -> let
     | "let" binder _TENSOR binder "=" term "in" term           -> let_tensor
     | "fn" binder ":" type "=>" term                           -> lam
     | "case" term "of" "inl" binder "=>" term "|" "inr" binder "=>" term -> case
     | "if" term "then" term "else" term                        -> if_
     | _SAMPLE [term_list] "as" [binder_list] "in" term         -> sample
     | tensor

term_list: term ("," term)*
binder_list: binder ("," binder)*

?tensor: tensor _TENSOR app                                     -> pair_tensor
       | app

?app: app atom                                                  -> apply
    | prefix

?prefix: "fst" atom                                             -> fst
       | "snd" atom                                             -> snd
       | "inl" [ascription] atom                                -> inl
       | "inr" [ascription] atom                                -> inr
       | PRIM1 atom                                             -> prim
       | atom

ascription: "[" type "]"

?atom: NAME                                                     -> var
     | "true"                                                   -> true
     | "false"                                                  -> false
     | PRIM0                                                    -> prim0
     | "(" term ")"
     | "(" term "," term ")"                                    -> pair

binder: NAME | WILDCARD

?type: otype _LOLLI type                                        -> lolli
     | otype
?otype: otype "(+)" ttype                                       -> sum
      | ttype
?ttype: ttype _TENSOR stype                                     -> tensor_t
      | stype
?stype: stype "+" ptype                                         -> sum
      | ptype
?ptype: ptype _TIMES atype                                      -> prod
      | atype
?atype: "Bool"                                                  -> bool_t
      | "Name"                                                  -> name_t
      | "M" atype                                               -> modal
      | "(" type ")"

_SAMPLE.2: /(sample|send)(?![A-Za-z0-9_'])/
_TENSOR: "(x)" | "⊗"
_LOLLI: "-o" | "⊸"
_TIMES: "*" | "×"
PRIM0.2: /(coin|amb|fresh)(?![A-Za-z0-9_'])/
PRIM1.2: /(not|and|or|xor|eqb|eqn)(?![A-Za-z0-9_'])/
NAME: /(?!(?:let|in|fn|case|of|inl|inr|if|then|else|fst|snd|def|true|false|sample|send|as)(?![A-Za-z0-9_']))[a-z][A-Za-z0-9_']*/
WILDCARD: "_"
COMMENT: /--[^\n]*/

%import common.WS
%ignore WS
%ignore COMMENT
"""

_HEADER = re.compile(r"\A(\s*)(#[^\n]*)")
_HEADER_BODY = re.compile(r"#lang\s+(ini1|ini2)(?:\s+layer=(NI|I))?\s*\Z")

_parser = Lark(GRAMMAR, parser="lalr", propagate_positions=True, maybe_placeholders=True)


# ── Source files ───────────────────────────────────────────────────

@dataclass(frozen=True)
class Declaration:
    name: str
    type: TypeExpr
    term: Term | None
    span: Span = NO_SPAN


@dataclass(frozen=True)
class SourceFile:
    language: str
    layer: Layer
    declarations: tuple[Declaration, ...]
    main: Term

    @property
    def header(self) -> str:
        if self.language == "ini1":
            return "#lang ini1"
        return f"#lang ini2 layer={self.layer.value}"


# ── Tree → AST ─────────────────────────────────────────────────────

def _span(meta) -> Span:
    if getattr(meta, "empty", True):
        return NO_SPAN
    return Span(meta.start_pos, meta.end_pos, meta.line, meta.column)


@v_args(meta=True)
class _ToAst(Transformer):
    def start(self, meta, children):
        *decls, main = children
        return list(decls), main

    def decl(self, meta, children):
        name, ty, term = children
        return Declaration(str(name), ty, term, _span(meta))

    # terms
    def let(self, meta, children):
        name, bound, body = children
        return Let(name, bound, body, span=_span(meta))

    def let_tensor(self, meta, children):
        x, y, bound, body = children
        if x == y and x != WILDCARD:
            raise ParseError(_span(meta), (), f"'{x}' is bound twice by one let")
        return LetTensor(x, y, bound, body, span=_span(meta))

    def lam(self, meta, children):
        param, annotation, body = children
        return Lam(param, annotation, body, span=_span(meta))

    def case(self, meta, children):
        scrutinee, x, left, y, right = children
        return Case(scrutinee, x, left, y, right, span=_span(meta))

    def if_(self, meta, children):
        cond, then, other = children
        return Case(cond, WILDCARD, then, WILDCARD, other, span=_span(meta))

    def sample(self, meta, children):
        args, names, body = children
        args = tuple(args or ())
        names = tuple(names or ())
        real = [n for n in names if n != WILDCARD]
        if len(set(real)) != len(real):
            raise ParseError(_span(meta), (), "sample binders must be distinct")
        return Sample(args, names, body, span=_span(meta))

    def term_list(self, meta, children):
        return list(children)

    def binder_list(self, meta, children):
        return list(children)

    def pair_tensor(self, meta, children):
        left, right = children
        return PairTensor(left, right, span=_span(meta))

    def apply(self, meta, children):
        fn, arg = children
        return App(fn, arg, span=_span(meta))

    def fst(self, meta, children):
        return Proj(1, children[0], span=_span(meta))

    def snd(self, meta, children):
        return Proj(2, children[0], span=_span(meta))

    def inl(self, meta, children):
        other, body = children
        return Inj(1, body, other, span=_span(meta))

    def inr(self, meta, children):
        other, body = children
        return Inj(2, body, other, span=_span(meta))

    def prim(self, meta, children):
        op, arg = children
        return PrimOp(str(op), (arg,), span=_span(meta))

    def ascription(self, meta, children):
        return children[0]

    def var(self, meta, children):
        return Var(str(children[0]), span=_span(meta))

    def true(self, meta, children):
        return Const(True, span=_span(meta))

    def false(self, meta, children):
        return Const(False, span=_span(meta))

    def prim0(self, meta, children):
        return PrimOp(str(children[0]), (), span=_span(meta))

    def pair(self, meta, children):
        left, right = children
        return PairShared(left, right, span=_span(meta))

    def binder(self, meta, children):
        return str(children[0])

    # types
    def lolli(self, meta, children):
        return Lolli(*children)

    def sum(self, meta, children):
        return Sum(*children)

    def tensor_t(self, meta, children):
        return Tensor(*children)

    def prod(self, meta, children):
        return Prod(*children)

    def bool_t(self, meta, children):
        return BOOL

    def name_t(self, meta, children):
        return NAME

    def modal(self, meta, children):
        return Modal(children[0])


# ── Entry points ───────────────────────────────────────────────────

def _position(text: str, offset: int) -> Span:
    offset = max(0, min(offset, len(text)))
    line = text.count("\n", 0, offset) + 1
    column = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return Span(offset, offset, line, column)


def _read_header(text: str) -> tuple[str, Layer, str]:
    """Return (language, layer, text with the header blanked out)."""
    match = _HEADER.match(text)
    if match is None:
        return "ini1", Layer.INI, text
    directive = match.group(2)
    body = _HEADER_BODY.match(directive.strip())
    if body is None:
        raise ParseError(_position(text, match.start(2)), {"#lang ini1", "#lang ini2 layer=I|NI"}, f"bad header {directive!r}")
    language, layer = body.group(1), body.group(2)
    if language == "ini1":
        if layer is not None:
            raise ParseError(_position(text, match.start(2)), {"#lang ini1"}, "ini1 files have no layer")
        resolved = Layer.INI
    else:
        resolved = Layer(layer or "I")
    blank = " " * len(directive)
    return language, resolved, text[: match.start(2)] + blank + text[match.end(2):]


def _parse_tree(text: str, start_text: str):
    try:
        return _parser.parse(text)
    except UnexpectedInput as e:
        offset = getattr(e, "pos_in_stream", None)
        if offset is None or offset < 0:
            offset = len(text)
        if isinstance(e, UnexpectedCharacters):
            expected = set(e.allowed or ())
            message = f"unexpected character {text[offset:offset + 1]!r}"
        else:
            expected = set(getattr(e, "expected", None) or ())
            token = getattr(e, "token", None)
            if token is None or token.type == "$END":
                message = "unexpected end of input"
            else:
                message = f"unexpected {str(token)!r}"
        raise ParseError(_position(start_text, offset), expected, message) from None
    except LarkError as e:
        raise ParseError(_position(start_text, 0), (), str(e)) from None


def _transform(tree):
    try:
        return _ToAst().transform(tree)
    except VisitError as e:
        if isinstance(e.orig_exc, ParseError):
            raise e.orig_exc from None
        if isinstance(e.orig_exc, RecursionError):
            raise ParseError(NO_SPAN, (), "term nested too deeply") from None
        raise


def parse(text: str) -> SourceFile:
    language, layer, body = _read_header(text)
    try:
        tree = _parse_tree(body, text)
        decls, main = _transform(tree)
        main = relayer(main, layer)
    except RecursionError:
        raise ParseError(NO_SPAN, (), "term nested too deeply") from None

    seen: set[str] = set()
    declarations = []
    for decl in decls:
        if decl.name in seen:
            raise ParseError(decl.span, (), f"duplicate declaration '{decl.name}'")
        seen.add(decl.name)
        term = relayer(decl.term, layer) if decl.term is not None else None
        declarations.append(Declaration(decl.name, decl.type, term, decl.span))

    logger.debug("parsed %s file with %d declarations", language, len(declarations))
    return SourceFile(language, layer, tuple(declarations), main)


def parse_term(text: str, layer: Layer = Layer.INI) -> Term:
    """Parse a bare term (no header, no declarations)."""
    source = parse(text)
    if source.declarations:
        raise ParseError(source.declarations[0].span, (), "expected a bare term")
    return relayer(source.main, layer)


def parse_type(text: str) -> TypeExpr:
    """Parse a type by wrapping it in an abstract declaration."""
    source = parse(f"def t : {text}; true")
    return source.declarations[0].type


def print_source(source: SourceFile) -> str:
    lines = [source.header]
    for decl in source.declarations:
        head = f"def {decl.name} : {show_type(decl.type)}"
        lines.append(f"{head};" if decl.term is None else f"{head} = {show_term(decl.term)};")
    lines.append(show_term(source.main))
    return "\n".join(lines) + "\n"
