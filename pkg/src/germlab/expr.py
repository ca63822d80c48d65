"""Tiny arithmetic expression language for scalar map components.

Grammar (whitespace insensitive, left associative except '^'):

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := power
    power  := atom ('^' factor)?
    atom   := number | var | func '(' expr (',' expr)* ')' | '(' expr ')'

Functions: abs, sqrt, log, sin, cos (one argument) and min, max (two or
more). Variables: x (alias for x1) and x1..x9. Numbers are decimal
literals. Division, log, sqrt and fractional powers are domain guarded.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GermlabError

UNARY_FUNCS = ("abs", "sqrt", "log", "sin", "cos")
VARIADIC_FUNCS = ("min", "max")
FUNCS = UNARY_FUNCS + VARIADIC_FUNCS


class ParseError(GermlabError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class EvalDomainError(GermlabError):
    """Evaluation left the expression's declared domain (x/0, log(<=0), ...)."""


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    index: int  # 0-based; source form is x / x1..x9


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


Expr = Num | Var | Call | BinOp


@dataclass(frozen=True)
class _Token:
    kind: str  # "num" | "name" | "op" | "end"
    text: str
    offset: int


def _tokenize(src: str) -> list[_Token]:
    tokens = []
    i, n = 0, len(src)
    while i < n:
        ch = src[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and src[i + 1].isdigit()):
            j = i
            while j < n and src[j].isdigit():
                j += 1
            if j < n and src[j] == ".":
                j += 1
                while j < n and src[j].isdigit():
                    j += 1
            tokens.append(_Token("num", src[i:j], i))
            i = j
            continue
        if ch.isalpha():
            j = i
            while j < n and (src[j].isalnum() or src[j] == "_"):
                j += 1
            tokens.append(_Token("name", src[i:j], i))
            i = j
            continue
        if ch in "+-*/^(),":
            tokens.append(_Token("op", ch, i))
            i += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", i)
    tokens.append(_Token("end", "", n))
    return tokens


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.tokens = _tokenize(src)
        self.pos = 0

    @property
    def cur(self) -> _Token:
        return self.tokens[self.pos]

    def eat(self, text: str | None = None) -> _Token:
        tok = self.cur
        if text is not None and (tok.kind != "op" or tok.text != text):
            raise ParseError(f"expected {text!r}", tok.offset)
        self.pos += 1
        return tok

    def parse(self) -> Expr:
        node = self.expr()
        if self.cur.kind != "end":
            raise ParseError(f"unexpected trailing input {self.cur.text!r}",
                             self.cur.offset)
        return node

    def expr(self) -> Expr:
        node = self.term()
        while self.cur.kind == "op" and self.cur.text in "+-":
            op = self.eat().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.factor()
        while self.cur.kind == "op" and self.cur.text in "*/":
            op = self.eat().text
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> Expr:
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.cur.kind == "op" and self.cur.text == "^":
            self.eat()
            return BinOp("^", base, self.factor())  # right associative
        return base

    def atom(self) -> Expr:
        tok = self.cur
        if tok.kind == "num":
            self.eat()
            return Num(float(tok.text))
        if tok.kind == "name":
            self.eat()
            name = tok.text
            if name == "x":
                return Var(0)
            if len(name) == 2 and name[0] == "x" and name[1] in "123456789":
                return Var(int(name[1]) - 1)
            if name in FUNCS:
                self.eat("(")
                args = [self.expr()]
                while self.cur.kind == "op" and self.cur.text == ",":
                    self.eat()
                    args.append(self.expr())
                self.eat(")")
                if name in UNARY_FUNCS and len(args) != 1:
                    raise ParseError(f"{name} takes exactly one argument", tok.offset)
                if name in VARIADIC_FUNCS and len(args) < 2:
                    raise ParseError(f"{name} takes at least two arguments", tok.offset)
                return Call(name, tuple(args))
            raise ParseError(f"unknown identifier {name!r}", tok.offset)
        if tok.kind == "op" and tok.text == "(":
            self.eat()
            node = self.expr()
            self.eat(")")
            return node
        what = "end of input" if tok.kind == "end" else repr(tok.text)
        raise ParseError(f"expected a value, found {what}", tok.offset)


def parse(src: str) -> Expr:
    """Parse source text into an AST; raises ParseError with an offset."""
    if not src or not src.strip():
        raise ParseError("empty expression", 0)
    return _Parser(src).parse()


def free_variables(node: Expr) -> set[int]:
    if isinstance(node, Var):
        return {node.index}
    if isinstance(node, BinOp):
        return free_variables(node.left) | free_variables(node.right)
    if isinstance(node, Call):
        out: set[int] = set()
        for a in node.args:
            out |= free_variables(a)
        return out
    return set()


def evaluate(node: Expr, x: np.ndarray) -> np.ndarray:
    """Evaluate on a batch of points x with shape (k, dim); returns (k,)."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x.reshape(1, -1)
    return _eval(node, x)


def _eval(node: Expr, x: np.ndarray) -> np.ndarray:
    if isinstance(node, Num):
        return np.full(x.shape[0], node.value)
    if isinstance(node, Var):
        if node.index >= x.shape[1]:
            raise EvalDomainError(
                f"variable x{node.index + 1} unbound for dimension {x.shape[1]}")
        return x[:, node.index].copy()
    if isinstance(node, Call):
        args = [_eval(a, x) for a in node.args]
        if node.func == "abs":
            return np.abs(args[0])
        if node.func == "sqrt":
            if np.any(args[0] < 0):
                raise EvalDomainError("sqrt of a negative value")
            return np.sqrt(args[0])
        if node.func == "log":
            if np.any(args[0] <= 0):
                raise EvalDomainError("log of a non-positive value")
            return np.log(args[0])
        if node.func == "sin":
            return np.sin(args[0])
        if node.func == "cos":
            return np.cos(args[0])
        if node.func == "min":
            return np.minimum.reduce(args)
        if node.func == "max":
            return np.maximum.reduce(args)
        raise GermlabError(f"unknown function {node.func!r}")
    if isinstance(node, BinOp):
        a = _eval(node.left, x)
        b = _eval(node.right, x)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            if np.any(b == 0):
                raise EvalDomainError("division by zero")
            return a / b
        if node.op == "^":
            frac = b != np.floor(b)
            if np.any((a < 0) & frac):
                raise EvalDomainError("fractional power of a negative base")
            if np.any((a == 0) & (b < 0)):
                raise EvalDomainError("zero raised to a negative power")
            return np.power(a, b)
    raise GermlabError(f"not an expression node: {node!r}")


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 3}
_ATOM_PREC = 9


def _prec(node: Expr) -> int:
    return _PREC[node.op] if isinstance(node, BinOp) else _ATOM_PREC


def to_source(node: Expr) -> str:
    """Pretty-print with minimal parentheses; parse(to_source(e)) == e."""
    if isinstance(node, Num):
        return repr(node.value) if node.value != int(node.value) else str(int(node.value))
    if isinstance(node, Var):
        return "x" if node.index == 0 else f"x{node.index + 1}"
    if isinstance(node, Call):
        return f"{node.func}({', '.join(to_source(a) for a in node.args)})"
    if isinstance(node, BinOp):
        p = _PREC[node.op]
        left = to_source(node.left)
        right = to_source(node.right)
        if node.op == "^":
            # right associative: parenthesize an operator left child at any precedence
            if _prec(node.left) <= p:
                left = f"({left})"
            if _prec(node.right) < p:
                right = f"({right})"
        else:
            if _prec(node.left) < p:
                left = f"({left})"
            if _prec(node.right) <= p:
                right = f"({right})"
        return f"{left} {node.op} {right}"
    raise GermlabError(f"not an expression node: {node!r}")


def to_map(e: Expr | str, dim_in: int):
    """Wrap an expression as a scalar MapDescriptor on R^dim_in."""
    from .maps import expr_map  # local import to avoid a module cycle

    src = e if isinstance(e, str) else to_source(e)
    return expr_map(src, dim_in)
