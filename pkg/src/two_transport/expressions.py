"""Tiny expression language for file-defined coefficients.

Real-valued expressions over named coordinates with + - * / ^, sin, cos,
exp, the constant pi, and numeric literals.  A matrix-valued coefficient is
a sum of (expression x named algebra basis element), e.g.

    sin(2*pi*x1)*E1 + 0.5*E2

where E1..Ek refer to the declared algebra's ordered basis.  Parsing is a
small recursive-descent pass; evaluation never calls eval().
"""

from __future__ import annotations

import math
import re

import numpy as np


class ExpressionError(ValueError):
    pass


_TOKEN = re.compile(r"\s*(?:(\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?"
                    r"|\d+(?:[eE][+-]?\d+)?)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*)|([()+\-*/^,]))")

_FUNCTIONS = {"sin": math.sin, "cos": math.cos, "exp": math.exp}


def _tokenize(src: str):
    pos = 0
    out = []
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if not m or m.end() == pos:
            if src[pos:].strip() == "":
                break
            raise ExpressionError(f"bad character at column {pos + 1}: {src[pos:]!r}")
        num, name, power, op = m.groups()
        if num is not None:
            out.append(("num", float(num), pos))
        elif name is not None:
            out.append(("name", name, pos))
        elif power is not None:
            out.append(("op", "^", pos))
        else:
            out.append(("op", op, pos))
        pos = m.end()
    out.append(("end", None, len(src)))
    return out


class _Parser:
    def __init__(self, src: str, variables, basis_names):
        self.src = src
        self.tokens = _tokenize(src)
        self.i = 0
        self.variables = {name: k for k, name in enumerate(variables)}
        self.basis_names = set(basis_names)

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, op):
        kind, val, pos = self.take()
        if kind != "op" or val != op:
            raise ExpressionError(f"expected {op!r} at column {pos + 1} in {self.src!r}")

    # node = ("num", v) | ("var", idx) | ("basis", name) | ("call", fn, node)
    #      | (op, left, right) | ("neg", node)
    def parse(self):
        node = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ExpressionError(f"trailing input at column {pos + 1} in {self.src!r}")
        return node

    def expr(self):
        node = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                node = (val, node, self.term())
            else:
                return node

    def term(self):
        node = self.factor()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "*/":
                self.take()
                node = (val, node, self.factor())
            else:
                return node

    def factor(self):
        node = self.unary()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.take()
            return ("^", node, self.factor())
        return node

    def unary(self):
        kind, val, _ = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            node = self.unary()
            return node if val == "+" else ("neg", node)
        return self.atom()

    def atom(self):
        kind, val, pos = self.take()
        if kind == "num":
            return ("num", val)
        if kind == "name":
            if val == "pi":
                return ("num", math.pi)
            if val in _FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return ("call", val, arg)
            if val in self.variables:
                return ("var", self.variables[val])
            if val in self.basis_names:
                return ("basis", val)
            raise ExpressionError(f"unknown name {val!r} at column {pos + 1} in {self.src!r}")
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect(")")
            return node
        raise ExpressionError(f"unexpected token at column {pos + 1} in {self.src!r}")


def _evaluate(node, point, basis):
    op = node[0]
    if op == "num":
        return node[1]
    if op == "var":
        return float(point[node[1]])
    if op == "basis":
        return basis[node[1]]
    if op == "call":
        arg = _evaluate(node[2], point, basis)
        if isinstance(arg, np.ndarray):
            raise ExpressionError(f"{node[1]} expects a scalar argument")
        return _FUNCTIONS[node[1]](arg)
    if op == "neg":
        return -_evaluate(node[1], point, basis)
    a = _evaluate(node[1], point, basis)
    b = _evaluate(node[2], point, basis)
    a_mat, b_mat = isinstance(a, np.ndarray), isinstance(b, np.ndarray)
    if op == "+":
        if a_mat != b_mat:
            raise ExpressionError("cannot add a scalar and a basis element")
        return a + b
    if op == "-":
        if a_mat != b_mat:
            raise ExpressionError("cannot subtract a scalar and a basis element")
        return a - b
    if op == "*":
        if a_mat and b_mat:
            raise ExpressionError("products of basis elements are not allowed")
        return a * b
    if op == "/":
        if b_mat:
            raise ExpressionError("cannot divide by a basis element")
        return a / b
    if op == "^":
        if a_mat or b_mat:
            raise ExpressionError("powers of basis elements are not allowed")
        return a ** b
    raise ExpressionError(f"unknown operator {op!r}")


def compile_expression(src: str, variables, basis=None):
    """Compile to a callable point -> float (basis=None) or point -> matrix.

    variables is the ordered list of coordinate names; basis, when given, is
    the ordered list of algebra basis matrices addressed as E1..Ek.
    """
    basis_map = {}
    if basis is not None:
        basis_map = {f"E{k + 1}": np.asarray(m, dtype=complex) for k, m in enumerate(basis)}
    tree = _Parser(src, variables, basis_map.keys()).parse()

    def fn(point):
        value = _evaluate(tree, point, basis_map)
        if basis is None:
            if isinstance(value, np.ndarray):
                raise ExpressionError("expected a scalar expression")
            return float(value)
        if not isinstance(value, np.ndarray):
            # scalar-only expression over a nontrivial algebra: scalar * first
            # basis element would be ambiguous, demand explicit basis names
            if value == 0.0:
                shape = next(iter(basis_map.values())).shape
                return np.zeros(shape, dtype=complex)
            raise ExpressionError("matrix coefficient must name basis elements E1..Ek")
        return value

    return fn
