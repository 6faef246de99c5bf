"""Scalar expressions over x1..xn with exact forward-mode derivatives.

Grammar (standard precedence, left associative):

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := atom ('^' '-'? integer)?
    atom   := number | 'i' | 'x' digits | func '(' expr ')' | '(' expr ')' | '-' atom
    func   := exp | log | sin | cos | sqrt

Parsed trees are immutable; evaluation goes through truncated Taylor
arithmetic, so values and all partial derivatives up to the requested order
are exact to machine precision.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .taylor import JetDomainError, Taylor

FUNCTIONS = ("exp", "log", "sin", "cos", "sqrt")


class ExprError(ValueError):
    pass


class ExprSyntaxError(ExprError):
    def __init__(self, message, offset):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class ExprDomainError(ExprError):
    pass


@dataclass(frozen=True)
class Var:
    index: int  # 1-based


@dataclass(frozen=True)
class Const:
    value: complex


@dataclass(frozen=True)
class Neg:
    arg: object


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class IntPow:
    base: object
    exponent: int


@dataclass(frozen=True)
class Func:
    name: str
    arg: object


def render_node(node) -> str:
    if isinstance(node, Var):
        return f"x{node.index}"
    if isinstance(node, Const):
        v = node.value
        if v == 1j:
            return "i"
        if v.imag == 0:
            return repr(v.real)
        # programmatic constants only; the parser never builds mixed ones
        return f"({v.real!r} + {v.imag!r}*i)"
    if isinstance(node, Neg):
        return f"(-{render_node(node.arg)})"
    if isinstance(node, BinOp):
        return f"({render_node(node.left)} {node.op} {render_node(node.right)})"
    if isinstance(node, IntPow):
        return f"({render_node(node.base)}^{node.exponent})"
    if isinstance(node, Func):
        return f"{node.name}({render_node(node.arg)})"
    raise TypeError(f"not an expression node: {node!r}")


_NUMBER = re.compile(r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_NAME = re.compile(r"[A-Za-z]+")
_DIGITS = re.compile(r"\d+")


class _Parser:
    def __init__(self, source: str, n: int):
        self.src = source
        self.n = n
        self.pos = 0

    def error(self, message):
        raise ExprSyntaxError(message, self.pos)

    def skip_ws(self):
        while self.pos < len(self.src) and self.src[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip_ws()
        return self.src[self.pos] if self.pos < len(self.src) else ""

    def take(self, ch):
        if self.peek() == ch:
            self.pos += 1
            return True
        return False

    def expect(self, ch):
        if not self.take(ch):
            self.error(f"expected {ch!r}")

    def parse(self):
        node = self.expr()
        self.skip_ws()
        if self.pos != len(self.src):
            self.error(f"unexpected trailing input {self.src[self.pos]!r}")
        return node

    def expr(self):
        node = self.term()
        while True:
            if self.take("+"):
                node = BinOp("+", node, self.term())
            elif self.take("-"):
                node = BinOp("-", node, self.term())
            else:
                return node

    def term(self):
        node = self.factor()
        while True:
            if self.take("*"):
                node = BinOp("*", node, self.factor())
            elif self.take("/"):
                node = BinOp("/", node, self.factor())
            else:
                return node

    def factor(self):
        node = self.atom()
        if self.take("^"):
            self.skip_ws()
            sign = -1 if self.take("-") else 1
            m = _DIGITS.match(self.src, self.pos)
            if not m:
                self.error("expected integer exponent after '^'")
            self.pos = m.end()
            return IntPow(node, sign * int(m.group()))
        return node

    def atom(self):
        ch = self.peek()
        if ch == "-":
            self.pos += 1
            return Neg(self.atom())
        if ch == "(":
            self.pos += 1
            node = self.expr()
            self.expect(")")
            return node
        m = _NUMBER.match(self.src, self.pos)
        if m:
            self.pos = m.end()
            return Const(complex(float(m.group())))
        m = _NAME.match(self.src, self.pos)
        if not m:
            self.error("expected a number, variable, function, or '('")
        name = m.group()
        start = self.pos
        self.pos = m.end()
        if name == "i":
            return Const(1j)
        if name == "x":
            d = _DIGITS.match(self.src, self.pos)
            if not d:
                self.pos = start
                self.error("variable needs an index, e.g. x1")
            self.pos = d.end()
            index = int(d.group())
            if not 1 <= index <= self.n:
                self.pos = start
                self.error(f"variable x{index} out of range for dimension {self.n}")
            return Var(index)
        if name in FUNCTIONS:
            self.expect("(")
            node = self.expr()
            self.expect(")")
            return Func(name, node)
        self.pos = start
        self.error(f"unknown name {name!r}")


@dataclass(frozen=True)
class Jet2:
    """Value, gradient, and (symmetric) Hessian at a point."""

    value: complex
    gradient: tuple
    hessian: tuple


@dataclass(frozen=True)
class ScalarExpr:
    root: object
    n: int

    def render(self) -> str:
        return render_node(self.root)

    def variables(self) -> set:
        out = set()

        def walk(node):
            if isinstance(node, Var):
                out.add(node.index)
            elif isinstance(node, Neg):
                walk(node.arg)
            elif isinstance(node, BinOp):
                walk(node.left)
                walk(node.right)
            elif isinstance(node, IntPow):
                walk(node.base)
            elif isinstance(node, Func):
                walk(node.arg)

        walk(self.root)
        return out

    def taylor(self, p, order: int) -> Taylor:
        if len(p) != self.n:
            raise ExprError(f"point has {len(p)} coordinates, expected {self.n}")
        env = [Taylor.variable(j, p[j], self.n, order) for j in range(self.n)]
        return _eval(self.root, env, self.n, order)

    def eval(self, p) -> complex:
        return self.taylor(p, 0).value

    def jet(self, p) -> Jet2:
        t = self.taylor(p, 2)
        grad = tuple(t.grad(j) for j in range(self.n))
        hess = tuple(tuple(t.second(j, k) for k in range(self.n)) for j in range(self.n))
        return Jet2(t.value, grad, hess)


def parse(source: str, n: int) -> ScalarExpr:
    if not source or not source.strip():
        raise ExprSyntaxError("empty expression", 0)
    if n < 1:
        raise ExprError(f"dimension must be positive, got {n}")
    return ScalarExpr(_Parser(source, n).parse(), n)


def constant_expr(value, n: int) -> ScalarExpr:
    return ScalarExpr(Const(complex(value)), n)


def eval_jet(e: ScalarExpr, p) -> Jet2:
    return e.jet(p)


def _eval(node, env, n, order) -> Taylor:
    if isinstance(node, Var):
        return env[node.index - 1]
    if isinstance(node, Const):
        return Taylor.constant(node.value, n, order)
    if isinstance(node, Neg):
        return -_eval(node.arg, env, n, order)
    try:
        if isinstance(node, BinOp):
            left = _eval(node.left, env, n, order)
            right = _eval(node.right, env, n, order)
            if node.op == "+":
                return left + right
            if node.op == "-":
                return left - right
            if node.op == "*":
                return left * right
            return left / right
        if isinstance(node, IntPow):
            return _eval(node.base, env, n, order).intpow(node.exponent)
        if isinstance(node, Func):
            return getattr(_eval(node.arg, env, n, order), node.name)()
    except JetDomainError as err:
        raise ExprDomainError(f"{err}, in subexpression '{render_node(node)}'") from err
    raise TypeError(f"not an expression node: {node!r}")
