"""Tiny expression language for test functions of x and y.

Grammar, loosest binding first::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := atom ('^' unary)?          # right-associative
    atom    := NUMBER | 'x' | 'y' | FUNC '(' expr ')' | '(' expr ')'

Evaluation works on floats and numpy arrays alike.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

FUNCTIONS = {
    "sin": np.sin,
    "cos": np.cos,
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "abs": np.abs,
}
VARIABLES = ("x", "y")


class ExpressionSyntaxError(ValueError):
    def __init__(self, offset: int, expected: str, text: str = ""):
        self.offset = offset
        self.expected = expected
        found = repr(text[offset]) if offset < len(text) else "end of input"
        super().__init__(f"at offset {offset}: expected {expected}, found {found}")


class ExpressionDomainError(ValueError):
    pass


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


Node = Union[Num, Var, Neg, BinOp, Call]

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise ExpressionSyntaxError(pos, "a number, name, operator or parenthesis", text)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, expected: str):
        raise ExpressionSyntaxError(self.peek()[2], expected, self.text)

    def expect(self, value: str):
        if self.peek()[1] != value or self.peek()[0] != "op":
            self.fail(repr(value))
        self.take()

    def parse(self) -> Node:
        node = self.expr()
        if self.peek()[0] != "end":
            self.fail("an operator or end of input")
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Node:
        if self.peek()[:2] == ("op", "-"):
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Node:
        kind, value, pos = self.peek()
        if kind == "num":
            self.take()
            number = float(value)
            if not math.isfinite(number):
                raise ExpressionSyntaxError(pos, "a finite number", self.text)
            return Num(number)
        if kind == "name":
            self.take()
            if value in VARIABLES:
                return Var(value)
            if value in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(value, arg)
            raise ExpressionSyntaxError(pos, "x, y or one of " + ", ".join(FUNCTIONS), self.text)
        if (kind, value) == ("op", "("):
            self.take()
            node = self.expr()
            self.expect(")")
            return node
        self.fail("a number, variable, function call or '('")


def parse_expression(text: str) -> Node:
    return _Parser(text).parse()


def evaluate(node: Node, x, y):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return x if node.name == "x" else y
    if isinstance(node, Neg):
        return -evaluate(node.operand, x, y)
    if isinstance(node, Call):
        arg = evaluate(node.arg, x, y)
        if node.func == "log" and np.any(np.asarray(arg) <= 0):
            raise ExpressionDomainError("log of a non-positive value")
        if node.func == "sqrt" and np.any(np.asarray(arg) < 0):
            raise ExpressionDomainError("sqrt of a negative value")
        return FUNCTIONS[node.func](arg)
    left = evaluate(node.left, x, y)
    right = evaluate(node.right, x, y)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if node.op == "+":
            return np.add(left, right)
        if node.op == "-":
            return np.subtract(left, right)
        if node.op == "*":
            return np.multiply(left, right)
        if node.op == "/":
            return np.divide(left, right)
        return np.power(np.asarray(left, dtype=float), right)


def to_source(node: Node) -> str:
    """Fully parenthesized source text that parses back to the same tree."""
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        return f"(-{to_source(node.operand)})"
    if isinstance(node, Call):
        return f"{node.func}({to_source(node.arg)})"
    return f"({to_source(node.left)} {node.op} {to_source(node.right)})"


class Expression:
    """Parsed expression usable as a bivariate function F(x, y)."""

    def __init__(self, text: str):
        self.text = text
        self.tree = parse_expression(text)

    def __call__(self, x, y):
        value = evaluate(self.tree, x, y)
        return float(value) if np.ndim(value) == 0 else value

    def __repr__(self):
        return f"Expression({self.text!r})"
