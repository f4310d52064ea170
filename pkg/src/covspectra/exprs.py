"""Tiny expression grammar for generator specs.

Grammar: numbers, the variable x, + - * /, unary minus, parentheses,
sqrt(expr) and pow(expr, const). Parsed into picklable AST nodes that
evaluate on scalars or NumPy arrays alike.
"""

import re
from dataclasses import dataclass

import numpy as np

_TOKEN = re.compile(r"\s*(?:(\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?|([A-Za-z_]+)|(.))")


@dataclass(frozen=True)
class Num:
    value: float

    def __call__(self, x):
        return self.value if np.isscalar(x) else np.full(np.shape(x), self.value)


@dataclass(frozen=True)
class Var:
    def __call__(self, x):
        return x


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object

    def __call__(self, x):
        a, b = self.left(x), self.right(x)
        if self.op == "+":
            return a + b
        if self.op == "-":
            return a - b
        if self.op == "*":
            return a * b
        return a / b


@dataclass(frozen=True)
class Neg:
    arg: object

    def __call__(self, x):
        return -self.arg(x)


@dataclass(frozen=True)
class Sqrt:
    arg: object

    def __call__(self, x):
        return np.sqrt(self.arg(x))


@dataclass(frozen=True)
class Pow:
    base: object
    exponent: float

    def __call__(self, x):
        return self.base(x) ** self.exponent


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = self._tokenize(text)
        self.pos = 0

    @staticmethod
    def _tokenize(text):
        tokens = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or not m.group(0).strip():
                if text[pos:].strip():
                    raise ValueError(f"bad generator expression near {text[pos:]!r}")
                break
            pos = m.end()
            if m.group(1) is not None:
                tokens.append(("num", float(m.group(0))))
            elif m.group(2) is not None:
                tokens.append(("name", m.group(2)))
            else:
                tokens.append(("op", m.group(3)))
        return tokens

    def _peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def _next(self):
        tok = self._peek()
        self.pos += 1
        return tok

    def _expect(self, op):
        kind, val = self._next()
        if kind != "op" or val != op:
            raise ValueError(f"expected {op!r} in generator expression {self.text!r}")

    def parse(self):
        node = self._expr()
        if self.pos != len(self.tokens):
            raise ValueError(f"trailing input in generator expression {self.text!r}")
        return node

    def _expr(self):
        node = self._term()
        while self._peek() in (("op", "+"), ("op", "-")):
            _, op = self._next()
            node = BinOp(op, node, self._term())
        return node

    def _term(self):
        node = self._unary()
        while self._peek() in (("op", "*"), ("op", "/")):
            _, op = self._next()
            node = BinOp(op, node, self._unary())
        return node

    def _unary(self):
        if self._peek() == ("op", "-"):
            self._next()
            return Neg(self._unary())
        return self._atom()

    def _atom(self):
        kind, val = self._next()
        if kind == "num":
            return Num(val)
        if kind == "name":
            if val == "x":
                return Var()
            if val == "sqrt":
                self._expect("(")
                arg = self._expr()
                self._expect(")")
                return Sqrt(arg)
            if val == "pow":
                self._expect("(")
                base = self._expr()
                self._expect(",")
                ekind, expo = self._next()
                sign = 1.0
                if (ekind, expo) == ("op", "-"):
                    sign = -1.0
                    ekind, expo = self._next()
                if ekind != "num":
                    raise ValueError("pow exponent must be a constant")
                self._expect(")")
                return Pow(base, sign * expo)
            raise ValueError(f"unknown name {val!r} in generator expression")
        if (kind, val) == ("op", "("):
            node = self._expr()
            self._expect(")")
            return node
        raise ValueError(f"bad generator expression {self.text!r}")


def parse_generator_expr(text: str):
    """Parse an expression into a callable AST; raises ValueError on junk."""
    if not text or not text.strip():
        raise ValueError("empty generator expression")
    return _Parser(text).parse()
