"""Textual assertion language.

Grammar (``!`` binds tighter than ``&``, which binds tighter than ``|``)::

    expr     := term ('|' term)*
    term     := factor ('&' factor)*
    factor   := '!' factor | '(' expr ')' | 'true' | 'false' | atom
    atom     := IDENT 'in' interval
              | IDENT 'in' '{' label (',' label)* '}'
              | IDENT ('=='|'!='|'<'|'<='|'>'|'>=') literal
    interval := ('['|'(') number ',' number (']'|')')

Whitespace is insignificant and ``#`` starts a comment running to the end of
the line.  Numbers accept decimal and scientific notation.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator

from .assertions import BOOLEAN, ENUMERATION, Alphabet, AssertionSet, Interval
from .errors import (
    ContractError,
    DslSyntaxError,
    OutOfDomainLiteral,
    TypeMismatch,
    UnknownVariable,
)

MAX_DEPTH = 200

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\f\v]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<number>[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>==|!=|<=|>=|<|>)
  | (?P<punct>[\[\](){},|&!])
    """,
    re.VERBOSE,
)

_COMPARISONS = ("==", "!=", "<", "<=", ">", ">=")


@dataclass(frozen=True)
class Token:
    kind: str  # number, ident, op, punct, eof
    text: str
    line: int
    column: int


def tokenize(text: str) -> Iterator[Token]:
    pos, line, line_start = 0, 1, 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise DslSyntaxError(
                f"unexpected character {text[pos]!r}", line=line, column=pos - line_start + 1
            )
        kind = m.lastgroup
        col = pos - line_start + 1
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            yield Token(kind, m.group(), line, col)
        pos = m.end()
    yield Token("eof", "", line, pos - line_start + 1)


# -- abstract syntax -----------------------------------------------------------


@dataclass(frozen=True)
class Node:
    line: int
    column: int


@dataclass(frozen=True)
class Or(Node):
    items: tuple


@dataclass(frozen=True)
class And(Node):
    items: tuple


@dataclass(frozen=True)
class Not(Node):
    item: Node


@dataclass(frozen=True)
class Const(Node):
    value: bool


@dataclass(frozen=True)
class InInterval(Node):
    var: str
    lo: float
    hi: float
    lo_closed: bool
    hi_closed: bool


@dataclass(frozen=True)
class InSet(Node):
    var: str
    labels: tuple


@dataclass(frozen=True)
class Compare(Node):
    var: str
    op: str
    literal: object  # float for numbers, str for labels


class _Parser:
    def __init__(self, text: str):
        self.tokens = list(tokenize(text))
        self.i = 0
        self.depth = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        t = self.tokens[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def fail(self, expected, what: str | None = None):
        t = self.tok
        found = "end of input" if t.kind == "eof" else repr(t.text)
        raise DslSyntaxError(what or f"unexpected {found}", line=t.line, column=t.column, expected=frozenset(expected))

    def expect(self, text: str) -> Token:
        if self.tok.text != text or self.tok.kind == "eof":
            self.fail({repr(text)})
        return self.advance()

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "eof":
            self.fail({"'|'", "'&'", "end of input"})
        return node

    def expr(self) -> Node:
        first = self.tok
        items = [self.term()]
        while self.tok.text == "|" and self.tok.kind == "punct":
            self.advance()
            items.append(self.term())
        return items[0] if len(items) == 1 else Or(first.line, first.column, tuple(items))

    def term(self) -> Node:
        first = self.tok
        items = [self.factor()]
        while self.tok.text == "&" and self.tok.kind == "punct":
            self.advance()
            items.append(self.factor())
        return items[0] if len(items) == 1 else And(first.line, first.column, tuple(items))

    def factor(self) -> Node:
        nots = []
        while self.tok.kind == "punct" and self.tok.text == "!":
            nots.append(self.advance())
        t = self.tok
        if t.kind == "punct" and t.text == "(":
            self.advance()
            self.depth += 1
            if self.depth > MAX_DEPTH:
                self.fail(set(), "expression nested too deeply")
            node = self.expr()
            self.depth -= 1
            self.expect(")")
        elif t.kind == "ident" and t.text in ("true", "false"):
            self.advance()
            node = Const(t.line, t.column, t.text == "true")
        elif t.kind == "ident":
            node = self.atom()
        else:
            self.fail({"'!'", "'('", "'true'", "'false'", "identifier"})
        if len(nots) % 2:  # double negation cancels
            node = Not(nots[0].line, nots[0].column, node)
        return node

    def atom(self) -> Node:
        name = self.advance()
        t = self.tok
        if t.kind == "ident" and t.text == "in":
            self.advance()
            t = self.tok
            if t.kind == "punct" and t.text in "[(":
                self.advance()
                lo = self.number()
                self.expect(",")
                hi = self.number()
                close = self.tok
                if close.kind != "punct" or close.text not in ("]", ")"):
                    self.fail({"']'", "')'"})
                self.advance()
                return InInterval(name.line, name.column, name.text, lo, hi, t.text == "[", close.text == "]")
            if t.kind == "punct" and t.text == "{":
                self.advance()
                labels = [self.label()]
                while self.tok.kind == "punct" and self.tok.text == ",":
                    self.advance()
                    labels.append(self.label())
                self.expect("}")
                return InSet(name.line, name.column, name.text, tuple(labels))
            self.fail({"'['", "'('", "'{'"})
        if t.kind == "op":
            op = self.advance().text
            lit = self.tok
            if lit.kind == "number":
                self.advance()
                return Compare(name.line, name.column, name.text, op, float(lit.text))
            if lit.kind == "ident":
                self.advance()
                return Compare(name.line, name.column, name.text, op, lit.text)
            self.fail({"number", "label"})
        self.fail({"'in'", *(repr(o) for o in _COMPARISONS)})

    def number(self) -> float:
        t = self.tok
        if t.kind != "number":
            self.fail({"number"})
        self.advance()
        return float(t.text)

    def label(self) -> str:
        t = self.tok
        if t.kind != "ident":
            self.fail({"label"})
        self.advance()
        return t.text


def _decode(text) -> str:
    if isinstance(text, (bytes, bytearray)):
        try:
            return bytes(text).decode("utf-8")
        except UnicodeDecodeError as exc:
            head = bytes(text[: exc.start]).decode("utf-8", errors="replace")
            line = head.count("\n") + 1
            col = len(head) - (head.rfind("\n") + 1) + 1
            raise DslSyntaxError("input is not valid UTF-8", line=line, column=col) from None
    if not isinstance(text, str):
        raise TypeError(f"expected str or bytes, got {type(text).__name__}")
    return text


def parse_expression(text: str | bytes) -> Node:
    """Syntax only: returns the expression tree without resolving names."""
    return _Parser(_decode(text)).parse()


def referenced_variables(node: Node) -> set[str]:
    if isinstance(node, (Or, And)):
        return set().union(*(referenced_variables(x) for x in node.items))
    if isinstance(node, Not):
        return referenced_variables(node.item)
    if isinstance(node, Const):
        return set()
    return {node.var}


# -- elaboration ---------------------------------------------------------------


def _fmt_literal(x) -> str:
    return _fmt_number(x) if isinstance(x, float) else str(x)


class _Elaborator:
    def __init__(self, alphabet: Alphabet):
        self.alphabet = alphabet

    def err(self, cls, node: Node, message: str):
        return cls(message, line=node.line, column=node.column)

    def var(self, node):
        if node.var not in self.alphabet:
            raise self.err(UnknownVariable, node, f"unknown variable {node.var!r}")
        return self.alphabet[node.var]

    def numeric(self, node, var, x: float):
        if not var.is_numeric:
            raise self.err(TypeMismatch, node, f"variable {var.name} is {var.kind}; numeric literal {_fmt_literal(x)} not allowed")
        lo, hi = var.domain
        if not lo <= x <= hi:
            raise self.err(OutOfDomainLiteral, node, f"literal {_fmt_literal(x)} is outside the domain [{lo}, {hi}] of {var.name}")
        return x

    def label(self, node, var, text: str):
        if var.is_numeric:
            raise self.err(TypeMismatch, node, f"variable {var.name} is {var.kind}; label {text!r} not allowed")
        if var.kind == BOOLEAN:
            if text not in ("true", "false"):
                raise self.err(OutOfDomainLiteral, node, f"{text!r} is not a boolean (use true/false)")
            return text == "true"
        if text not in var.domain:
            raise self.err(OutOfDomainLiteral, node, f"label {text!r} is not in the domain of {var.name}")
        return text

    def run(self, node: Node) -> AssertionSet:
        alpha = self.alphabet
        if isinstance(node, Or):
            out = self.run(node.items[0])
            for x in node.items[1:]:
                out = out | self.run(x)
            return out
        if isinstance(node, And):
            out = self.run(node.items[0])
            for x in node.items[1:]:
                out = out & self.run(x)
            return out
        if isinstance(node, Not):
            return ~self.run(node.item)
        if isinstance(node, Const):
            return AssertionSet.universe(alpha) if node.value else AssertionSet.empty(alpha)
        var = self.var(node)
        if isinstance(node, InInterval):
            lo = self.numeric(node, var, node.lo)
            hi = self.numeric(node, var, node.hi)
            iv = Interval(lo, hi, node.lo_closed, node.hi_closed)
            return AssertionSet.from_box(alpha, {var.name: iv})
        if isinstance(node, InSet):
            labels = frozenset(self.label(node, var, t) for t in node.labels)
            return AssertionSet.from_box(alpha, {var.name: labels})
        # comparison
        op, lit = node.op, node.literal
        if var.kind in (BOOLEAN, ENUMERATION):
            if isinstance(lit, float):
                raise self.err(TypeMismatch, node, f"variable {var.name} is {var.kind}; numeric literal not allowed")
            if op not in ("==", "!="):
                raise self.err(TypeMismatch, node, f"operator {op} is not defined for {var.kind} variable {var.name}")
            point = AssertionSet.from_box(alpha, {var.name: frozenset([self.label(node, var, lit)])})
            return point if op == "==" else ~point
        if not isinstance(lit, float):
            raise self.err(TypeMismatch, node, f"variable {var.name} is {var.kind}; label {lit!r} not allowed")
        x = self.numeric(node, var, lit)
        dlo, dhi = var.domain
        iv = {
            "==": Interval(x, x, True, True),
            "!=": Interval(x, x, True, True),
            "<": Interval(dlo, x, True, False),
            "<=": Interval(dlo, x, True, True),
            ">": Interval(x, dhi, False, True),
            ">=": Interval(x, dhi, True, True),
        }[op]
        out = AssertionSet.from_box(alpha, {var.name: iv})
        return ~out if op == "!=" else out


def elaborate(node: Node, alphabet: Alphabet) -> AssertionSet:
    return _Elaborator(alphabet).run(node)


def parse_assertion(text: str | bytes, alphabet: Alphabet) -> AssertionSet:
    """Parse ``text`` and elaborate it to a union of boxes over ``alphabet``.

    Every rejection is a :class:`ContractError` carrying a 1-based line and
    column.
    """
    node = parse_expression(text)
    try:
        return elaborate(node, alphabet)
    except ContractError as exc:
        if exc.line is None:
            exc.line, exc.column = node.line, node.column
        raise


# -- rendering -------------------------------------------------------------------


def _fmt_number(x) -> str:
    if isinstance(x, int):
        return str(x)
    if x.is_integer() and abs(x) < 1e16:
        return str(int(x))
    return repr(x)


def _render_atom(var, atom) -> str:
    if isinstance(atom, Interval):
        return (
            f"{var.name} in {'[' if atom.lo_closed else '('}{_fmt_number(atom.lo)}, "
            f"{_fmt_number(atom.hi)}{']' if atom.hi_closed else ')'}"
        )
    if var.kind == BOOLEAN:
        labels = [("true" if x else "false") for x in var.domain if x in atom]
    else:
        labels = [x for x in var.domain if x in atom]
    return f"{var.name} in {{{', '.join(labels)}}}"


def render_assertion(e: AssertionSet) -> str:
    """Canonical, re-parseable text for ``e``."""
    if not e.boxes:
        return "false"
    parts = []
    for box in e.boxes:
        if not box.atoms:
            return "true"
        parts.append(" & ".join(_render_atom(e.alphabet[n], a) for n, a in box.atoms))
    return " | ".join(sorted(parts))
