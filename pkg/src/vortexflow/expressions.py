"""Minimal arithmetic expression grammar for scenario files.

Supported: + - * / ^, parentheses, sin, cos, exp, sqrt, abs, the variables
t, x1, x2, and the constant pi.  Expressions compile both to a vectorized
numpy callable and to a numba-jittable scalar callable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from numba import njit

_FUNCTIONS = ("sin", "cos", "exp", "sqrt", "abs")
_VARIABLES = ("t", "x1", "x2")


class ExpressionSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class _Token:
    kind: str       # 'num' | 'name' | 'op'
    text: str
    column: int


def _tokenize(text: str, line: int) -> List[_Token]:
    tokens: List[_Token] = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        col = i + 1
        if c.isdigit() or c == ".":
            j = i
            seen_e = False
            while j < n and (text[j].isdigit() or text[j] == "."
                             or text[j] in "eE"
                             or (seen_e and text[j] in "+-" and text[j - 1] in "eE")):
                if text[j] in "eE":
                    seen_e = True
                j += 1
            lit = text[i:j]
            try:
                float(lit)
            except ValueError:
                raise ExpressionSyntaxError(f"bad number literal {lit!r}", line, col)
            tokens.append(_Token("num", lit, col))
            i = j
        elif c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(_Token("name", text[i:j], col))
            i = j
        elif c in "+-*/^(),":
            tokens.append(_Token("op", c, col))
            i += 1
        else:
            raise ExpressionSyntaxError(f"unexpected character {c!r}", line, col)
    return tokens


# AST nodes: ('num', value) ('var', name) ('pi',) ('neg', a)
# ('bin', op, a, b) ('call', fn, a)


class Expression:
    """Parsed expression over (t, x1, x2)."""

    def __init__(self, source: str, ast):
        self.source = source
        self._ast = ast

    def __repr__(self):
        return f"Expression({self.source!r})"

    def __eq__(self, other):
        return isinstance(other, Expression) and self.source == other.source

    def __hash__(self):
        return hash(self.source)

    def _emit(self, node, names) -> str:
        kind = node[0]
        if kind == "num":
            return repr(node[1])
        if kind == "var":
            return node[1]
        if kind == "pi":
            return names["pi"]
        if kind == "neg":
            return f"(-{self._emit(node[1], names)})"
        if kind == "bin":
            op, a, b = node[1], node[2], node[3]
            ea, eb = self._emit(a, names), self._emit(b, names)
            if op == "^":
                return f"({ea})**({eb})"
            return f"({ea}{op}{eb})"
        if kind == "call":
            fn, a = node[1], node[2]
            return f"{names[fn]}({self._emit(a, names)})"
        raise AssertionError(f"unknown node {node!r}")

    def as_numpy(self):
        """Vectorized callable (t, x1, x2) -> ndarray (broadcasting)."""
        names = {"sin": "np.sin", "cos": "np.cos", "exp": "np.exp",
                 "sqrt": "np.sqrt", "abs": "np.abs", "pi": "np.pi"}
        body = self._emit(self._ast, names)
        src = f"def _f(t, x1, x2):\n    return ({body}) + 0.0*x1\n"
        scope = {"np": np}
        exec(src, scope)
        return scope["_f"]

    def scalar_source(self) -> str:
        names = {"sin": "math.sin", "cos": "math.cos", "exp": "math.exp",
                 "sqrt": "math.sqrt", "abs": "abs", "pi": "math.pi"}
        return self._emit(self._ast, names)


class _Parser:
    def __init__(self, tokens: List[_Token], line: int, source: str):
        self.tokens = tokens
        self.pos = 0
        self.line = line
        self.source = source

    def _peek(self) -> Optional[_Token]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def _next(self) -> _Token:
        tok = self._peek()
        if tok is None:
            col = len(self.source) + 1
            raise ExpressionSyntaxError("unexpected end of expression", self.line, col)
        self.pos += 1
        return tok

    def _expect(self, text: str):
        tok = self._next()
        if tok.kind != "op" or tok.text != text:
            raise ExpressionSyntaxError(f"expected {text!r}, found {tok.text!r}",
                                        self.line, tok.column)

    def parse(self):
        node = self._expr()
        tok = self._peek()
        if tok is not None:
            raise ExpressionSyntaxError(f"unexpected trailing {tok.text!r}",
                                        self.line, tok.column)
        return node

    def _expr(self):
        node = self._term()
        while True:
            tok = self._peek()
            if tok and tok.kind == "op" and tok.text in "+-":
                self._next()
                node = ("bin", tok.text, node, self._term())
            else:
                return node

    def _term(self):
        node = self._unary()
        while True:
            tok = self._peek()
            if tok and tok.kind == "op" and tok.text in "*/":
                self._next()
                node = ("bin", tok.text, node, self._unary())
            else:
                return node

    def _unary(self):
        tok = self._peek()
        if tok and tok.kind == "op" and tok.text == "-":
            self._next()
            return ("neg", self._unary())
        if tok and tok.kind == "op" and tok.text == "+":
            self._next()
            return self._unary()
        return self._power()

    def _power(self):
        base = self._atom()
        tok = self._peek()
        if tok and tok.kind == "op" and tok.text == "^":
            self._next()
            return ("bin", "^", base, self._unary())
        return base

    def _atom(self):
        tok = self._next()
        if tok.kind == "num":
            return ("num", float(tok.text))
        if tok.kind == "name":
            if tok.text == "pi":
                return ("pi",)
            if tok.text in _VARIABLES:
                return ("var", tok.text)
            if tok.text in _FUNCTIONS:
                self._expect("(")
                arg = self._expr()
                self._expect(")")
                return ("call", tok.text, arg)
            raise ExpressionSyntaxError(f"unknown name {tok.text!r}",
                                        self.line, tok.column)
        if tok.kind == "op" and tok.text == "(":
            node = self._expr()
            self._expect(")")
            return node
        raise ExpressionSyntaxError(f"unexpected {tok.text!r}", self.line, tok.column)


def parse_expression(text: str, line: int = 1) -> Expression:
    tokens = _tokenize(text, line)
    if not tokens:
        raise ExpressionSyntaxError("empty expression", line, 1)
    ast = _Parser(tokens, line, text).parse()
    return Expression(text.strip(), ast)


_PAIR_CACHE: dict = {}


def compile_scalar_pair(e1: Expression, e2: Expression):
    """njit (t, x1, x2) -> (float, float) evaluating the two expressions.

    Compiled pairs are cached by source so re-parsing the same scenario
    reuses the dispatcher (and everything compiled against it).
    """
    key = (e1.scalar_source(), e2.scalar_source())
    cached = _PAIR_CACHE.get(key)
    if cached is not None:
        return cached
    src = ("def _pair(t, x1, x2):\n"
           f"    return ({key[0]}) * 1.0 + 0.0 * x1, "
           f"({key[1]}) * 1.0 + 0.0 * x2\n")
    scope = {"math": math}
    exec(src, scope)
    pair = njit(cache=False)(scope["_pair"])
    _PAIR_CACHE[key] = pair
    return pair
