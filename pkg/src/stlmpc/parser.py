"""Recursive-descent parser for the ASCII formula grammar.

Grammar (loosest to tightest binding)::

    formula   := and_expr ('|' and_expr)*
    and_expr  := until_expr ('&' until_expr)*
    until_expr:= unary (('U'|'R') '[' a ',' b ']' unary)*      (left assoc)
    unary     := '!' unary | ('G'|'F') '[' a ',' b ']' unary | atom
    atom      := NAME | '(' formula ')' | '(' affine '>=' affine ')'

Atoms are either ``pN`` (row N of the output map), a name bound in
``PredicateEnv.names``, or an inline affine predicate over state/control
symbols ``x1..xn`` / ``u1..um`` which is compiled to a fresh output row
with the constant folded into e.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .errors import FormulaError
from .formula import And, Always, Eventually, Formula, Not, Or, Pred, Release, Until
from .output_map import OutputMap

__all__ = ["parse", "PredicateEnv"]

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+\.\d*|\.\d+|\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>>=|[!&|()\[\],+\-*]))"
)

_RESERVED = {"G", "F", "U", "R"}


@dataclass
class _Token:
    kind: str  # num | name | op | end
    text: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            bad = len(text) - len(stripped)
            raise FormulaError(f"unexpected character {text[bad]!r}", bad)
        if m.group("num") is not None:
            tokens.append(_Token("num", m.group("num"), m.start("num")))
        elif m.group("name") is not None:
            tokens.append(_Token("name", m.group("name"), m.start("name")))
        else:
            tokens.append(_Token("op", m.group("op"), m.start("op")))
        pos = m.end()
    tokens.append(_Token("end", "", len(text)))
    return tokens


@dataclass
class PredicateEnv:
    """Binding context for predicate atoms.

    ``names`` maps predicate names to 1-based output rows.  ``outputs``
    is extended in place (rebound) when inline affine predicates occur;
    it is required for them and for validating ``pN`` indices.
    """

    names: dict[str, int] = field(default_factory=dict)
    outputs: OutputMap | None = None

    def resolve(self, name: str, pos: int) -> int:
        if name in self.names:
            return self.names[name]
        m = re.fullmatch(r"p(\d+)", name)
        if m:
            idx = int(m.group(1))
            if idx < 1:
                raise FormulaError(f"predicate index must be >= 1: {name}", pos)
            if self.outputs is not None and idx > self.outputs.p:
                raise FormulaError(
                    f"predicate {name} exceeds the {self.outputs.p} output rows", pos
                )
            return idx
        raise FormulaError(f"unknown predicate name {name!r}", pos)


class _Parser:
    def __init__(self, tokens: list[_Token], env: PredicateEnv):
        self.tokens = tokens
        self.i = 0
        self.env = env

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def next(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text: str) -> _Token:
        tok = self.next()
        if tok.text != text:
            raise FormulaError(f"expected {text!r}, found {tok.text or 'end of input'!r}", tok.pos)
        return tok

    def parse_formula(self) -> Formula:
        left = self.parse_and()
        children = [left]
        while self.peek().text == "|":
            self.next()
            children.append(self.parse_and())
        return children[0] if len(children) == 1 else Or(tuple(children))

    def parse_and(self) -> Formula:
        children = [self.parse_until()]
        while self.peek().text == "&":
            self.next()
            children.append(self.parse_until())
        return children[0] if len(children) == 1 else And(tuple(children))

    def parse_until(self) -> Formula:
        node = self.parse_unary()
        while self.peek().kind == "name" and self.peek().text in ("U", "R"):
            op = self.next()
            a, b = self.parse_interval(op)
            right = self.parse_unary()
            node = Until(a, b, node, right) if op.text == "U" else Release(a, b, node, right)
        return node

    def parse_unary(self) -> Formula:
        tok = self.peek()
        if tok.text == "!":
            self.next()
            return Not(self.parse_unary())
        if tok.kind == "name" and tok.text in ("G", "F"):
            op = self.next()
            a, b = self.parse_interval(op)
            child = self.parse_unary()
            return Always(a, b, child) if op.text == "G" else Eventually(a, b, child)
        return self.parse_atom()

    def parse_interval(self, op: _Token) -> tuple[int, int]:
        self.expect("[")
        a = self.parse_int()
        self.expect(",")
        b = self.parse_int()
        self.expect("]")
        if a < 0 or b <= a:
            raise FormulaError(
                f"{op.text} bounds must satisfy 0 <= a < b, got [{a},{b}]", op.pos
            )
        return a, b

    def parse_int(self) -> int:
        tok = self.next()
        if tok.kind != "num" or "." in tok.text:
            raise FormulaError(f"expected integer bound, found {tok.text!r}", tok.pos)
        return int(tok.text)

    def parse_atom(self) -> Formula:
        tok = self.peek()
        if tok.text == "(":
            if self.looks_affine():
                return self.parse_affine_predicate()
            self.next()
            inner = self.parse_formula()
            self.expect(")")
            return inner
        if tok.kind == "name":
            if tok.text in _RESERVED:
                raise FormulaError(f"{tok.text!r} must be followed by an interval", tok.pos)
            self.next()
            return Pred(self.env.resolve(tok.text, tok.pos))
        raise FormulaError(
            f"expected a predicate or '(', found {tok.text or 'end of input'!r}", tok.pos
        )

    def looks_affine(self) -> bool:
        # a '>=' at nesting depth 1 before the matching ')' marks an inline predicate
        depth = 0
        for tok in self.tokens[self.i :]:
            if tok.text == "(":
                depth += 1
            elif tok.text == ")":
                depth -= 1
                if depth == 0:
                    return False
            elif tok.text == ">=" and depth == 1:
                return True
            elif tok.kind == "end":
                return False
        return False

    def parse_affine_predicate(self) -> Formula:
        open_tok = self.expect("(")
        if self.env.outputs is None:
            raise FormulaError(
                "inline affine predicates require system dimensions (no output map bound)",
                open_tok.pos,
            )
        n, m = self.env.outputs.n, self.env.outputs.m
        lc, ld, lconst = self.parse_affine_sum(n, m)
        self.expect(">=")
        rc, rd, rconst = self.parse_affine_sum(n, m)
        self.expect(")")
        # y = lhs - rhs >= 0, constant folded into e
        new = self.env.outputs.append_row(lc - rc, ld - rd, lconst - rconst, self.env.outputs.p + 1)
        self.env.outputs = new
        return Pred(new.p)

    def parse_affine_sum(self, n: int, m: int):
        c = np.zeros(n)
        d = np.zeros(m)
        const = 0.0
        sign = 1.0
        expect_term = True
        while True:
            tok = self.peek()
            if expect_term:
                if tok.text == "-":
                    self.next()
                    sign = -sign
                    continue
                if tok.text == "+":
                    self.next()
                    continue
                coef = 1.0
                if tok.kind == "num":
                    self.next()
                    coef = float(tok.text)
                    if self.peek().text == "*":
                        self.next()
                    if self.peek().kind != "name":
                        const += sign * coef
                        sign = 1.0
                        expect_term = False
                        continue
                name_tok = self.next()
                if name_tok.kind != "name":
                    raise FormulaError(
                        f"expected a variable, found {name_tok.text!r}", name_tok.pos
                    )
                mvar = re.fullmatch(r"([xu])(\d+)", name_tok.text)
                if not mvar:
                    raise FormulaError(
                        f"unknown symbol {name_tok.text!r} in affine predicate "
                        "(use x1..xn and u1..um)",
                        name_tok.pos,
                    )
                idx = int(mvar.group(2)) - 1
                if mvar.group(1) == "x":
                    if idx >= n:
                        raise FormulaError(f"state index out of range: {name_tok.text}", name_tok.pos)
                    c[idx] += sign * coef
                else:
                    if idx >= m:
                        raise FormulaError(f"control index out of range: {name_tok.text}", name_tok.pos)
                    d[idx] += sign * coef
                sign = 1.0
                expect_term = False
            else:
                if tok.text in ("+", "-"):
                    self.next()
                    sign = 1.0 if tok.text == "+" else -1.0
                    expect_term = True
                else:
                    return c, d, const


def parse(text: str, env: PredicateEnv | None = None) -> Formula:
    """Parse formula text into an AST.

    Without an environment only ``pN`` atoms are accepted.  With one,
    named predicates resolve through ``env.names`` and inline affine
    predicates extend ``env.outputs``.
    """
    env = env if env is not None else PredicateEnv()
    parser = _Parser(_tokenize(text), env)
    f = parser.parse_formula()
    tail = parser.peek()
    if tail.kind != "end":
        raise FormulaError(f"unexpected trailing input {tail.text!r}", tail.pos)
    return f
