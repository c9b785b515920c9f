"""A small expression language for rational sequences.

    expr    := sum [cmp sum]            (comparisons only inside ite)
    sum     := product (("+" | "-") product)*
    product := unary (("*" | "/") unary)*
    unary   := "-" unary | atom
    atom    := NAT | m<k> | zero | one | name "(" args ")" | "(" expr ")"

Functions: pow(x, n) with n a natural, min(...), max(...), abs(x), fact(n),
ite(a < b, x, y) with comparisons <, <= (or the sign ≤) and =, and
approx(c, M) for a builtin constant c in {pi, e, zero, one} at precision M.
Evaluation is exact; errors carry 1-based line and column.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

from .exact_real import BUILTINS, EffectiveSequence


class DSLError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} at line {line}, column {column}")
        self.message = message
        self.line = line
        self.column = column


# ------------------------------------------------------------------ tree


@dataclass(frozen=True)
class Node:
    pos: tuple[int, int] = field(default=(1, 1), compare=False, kw_only=True)


@dataclass(frozen=True)
class Num(Node):
    value: int


@dataclass(frozen=True)
class Var(Node):
    index: int  # 1-based


@dataclass(frozen=True)
class Const(Node):
    name: str  # "zero" or "one"


@dataclass(frozen=True)
class Neg(Node):
    operand: Node


@dataclass(frozen=True)
class BinOp(Node):
    op: str
    left: Node
    right: Node


@dataclass(frozen=True)
class Compare(Node):
    op: str  # "<", "<=", "="
    left: Node
    right: Node


@dataclass(frozen=True)
class Call(Node):
    name: str
    args: tuple[Node, ...]


@dataclass(frozen=True)
class BuiltinRef(Node):
    name: str


FUNCTIONS = {"pow": (2, 2), "min": (1, None), "max": (1, None), "abs": (1, 1), "fact": (1, 1), "ite": (3, 3), "approx": (2, 2)}

# ----------------------------------------------------------------- lexer

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(<=|≤|[-+*/(),<=]))")


@dataclass(frozen=True)
class Token:
    kind: str  # "num", "name", "op", "end"
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[Token]:
    tokens = []
    line_starts = [0] + [i + 1 for i, ch in enumerate(text) if ch == "\n"]

    def where(offset: int) -> tuple[int, int]:
        line = max(i for i, s in enumerate(line_starts) if s <= offset)
        return line + 1, offset - line_starts[line] + 1

    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            tokens.append(Token("end", "", *where(pos)))
            return tokens
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise DSLError(f"unexpected character {text[pos]!r}", *where(pos))
        start = m.start(1) if m.group(1) else m.start(2) if m.group(2) else m.start(3)
        kind = "num" if m.group(1) else "name" if m.group(2) else "op"
        value = m.group(1) or m.group(2) or m.group(3)
        if value == "≤":
            value = "<="
        tokens.append(Token(kind, value, *where(start)))
        pos = m.end()


# ----------------------------------------------------------------- parser


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def take(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        if self.tok.text != text or self.tok.kind == "end":
            found = "end of input" if self.tok.kind == "end" else repr(self.tok.text)
            raise DSLError(f"expected {text!r}, found {found}", self.tok.line, self.tok.column)
        return self.take()

    def parse(self) -> Node:
        node = self.sum()
        if self.tok.kind != "end":
            raise DSLError(f"unexpected {self.tok.text!r}", self.tok.line, self.tok.column)
        return node

    def condition(self) -> Node:
        left = self.sum()
        if self.tok.text in ("<", "<=", "=") and self.tok.kind == "op":
            t = self.take()
            return Compare(t.text, left, self.sum(), pos=(t.line, t.column))
        raise DSLError("expected a comparison <, <= or =", self.tok.line, self.tok.column)

    def sum(self) -> Node:
        node = self.product()
        while self.tok.kind == "op" and self.tok.text in "+-":
            t = self.take()
            node = BinOp(t.text, node, self.product(), pos=(t.line, t.column))
        return node

    def product(self) -> Node:
        node = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            t = self.take()
            node = BinOp(t.text, node, self.unary(), pos=(t.line, t.column))
        return node

    def unary(self) -> Node:
        if self.tok.kind == "op" and self.tok.text == "-":
            t = self.take()
            return Neg(self.unary(), pos=(t.line, t.column))
        return self.atom()

    def atom(self) -> Node:
        t = self.tok
        if t.kind == "num":
            self.take()
            return Num(int(t.text), pos=(t.line, t.column))
        if t.kind == "op" and t.text == "(":
            self.take()
            node = self.sum()
            self.expect(")")
            return node
        if t.kind == "name":
            self.take()
            if self.tok.text == "(" and self.tok.kind == "op":
                return self.call(t)
            m = re.fullmatch(r"m([1-9]\d*)", t.text)
            if m:
                return Var(int(m.group(1)), pos=(t.line, t.column))
            if t.text in ("zero", "one"):
                return Const(t.text, pos=(t.line, t.column))
            if t.text in BUILTINS:
                raise DSLError(f"builtin {t.text!r} is irrational; use approx({t.text}, M)", t.line, t.column)
            raise DSLError(f"unknown identifier {t.text!r}", t.line, t.column)
        found = "end of input" if t.kind == "end" else repr(t.text)
        raise DSLError(f"expected an expression, found {found}", t.line, t.column)

    def call(self, name: Token) -> Node:
        if name.text not in FUNCTIONS:
            raise DSLError(f"unknown function {name.text!r}", name.line, name.column)
        self.expect("(")
        args: list[Node] = []
        if name.text == "ite":
            args.append(self.condition())
        elif name.text == "approx":
            t = self.tok
            if t.kind != "name" or t.text not in BUILTINS:
                raise DSLError(f"approx needs a builtin constant {sorted(BUILTINS)}", t.line, t.column)
            self.take()
            args.append(BuiltinRef(t.text, pos=(t.line, t.column)))
        else:
            args.append(self.sum())
        while self.tok.kind == "op" and self.tok.text == ",":
            self.take()
            args.append(self.sum())
        self.expect(")")
        lo, hi = FUNCTIONS[name.text]
        if len(args) < lo or (hi is not None and len(args) > hi):
            want = str(lo) if lo == hi else f"at least {lo}"
            raise DSLError(f"{name.text} takes {want} arguments, got {len(args)}", name.line, name.column)
        return Call(name.text, tuple(args), pos=(name.line, name.column))


def parse_expr(text: str) -> Node:
    return _Parser(text).parse()


# ----------------------------------------------------------- printing

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def pretty(node: Node) -> str:
    match node:
        case Num(value=v):
            return str(v)
        case Var(index=k):
            return f"m{k}"
        case Const(name=n) | BuiltinRef(name=n):
            return n
        case Neg(operand=x):
            inner = pretty(x)
            return f"-{inner}" if isinstance(x, (Num, Var, Const, Call)) else f"-({inner})"
        case BinOp(op=op, left=a, right=b):
            la, lb = pretty(a), pretty(b)
            if isinstance(a, BinOp) and _PREC[a.op] < _PREC[op]:
                la = f"({la})"
            if isinstance(b, BinOp) and _PREC[b.op] <= _PREC[op]:
                lb = f"({lb})"
            if isinstance(b, Neg):
                lb = f"({lb})"
            return f"{la} {op} {lb}"
        case Compare(op=op, left=a, right=b):
            return f"{pretty(a)} {op} {pretty(b)}"
        case Call(name=n, args=args):
            return f"{n}(" + ", ".join(pretty(a) for a in args) + ")"
    raise TypeError(f"not a DSL node: {node!r}")


# ----------------------------------------------------------- evaluation


def max_variable(node: Node) -> int:
    match node:
        case Var(index=k):
            return k
        case Neg(operand=x):
            return max_variable(x)
        case BinOp(left=a, right=b) | Compare(left=a, right=b):
            return max(max_variable(a), max_variable(b))
        case Call(args=args):
            return max((max_variable(a) for a in args), default=0)
    return 0


def _natural(v: Fraction, node: Node, what: str) -> int:
    if v.denominator != 1 or v < 0:
        raise DSLError(f"{what} must be a natural number, got {v}", *node.pos)
    return int(v)


def evaluate(node: Node, env: tuple[int, ...]) -> Fraction:
    match node:
        case Num(value=v):
            return Fraction(v)
        case Var(index=k):
            if k > len(env):
                raise DSLError(f"variable m{k} needs arity >= {k}, sequence has {len(env)}", *node.pos)
            return Fraction(env[k - 1])
        case Const(name=n):
            return Fraction(1 if n == "one" else 0)
        case Neg(operand=x):
            return -evaluate(x, env)
        case BinOp(op=op, left=a, right=b):
            x, y = evaluate(a, env), evaluate(b, env)
            if op == "+":
                return x + y
            if op == "-":
                return x - y
            if op == "*":
                return x * y
            if y == 0:
                raise DSLError("division by zero", *node.pos)
            return x / y
        case Call(name=name, args=args):
            if name == "ite":
                cond = args[0]
                a, b = evaluate(cond.left, env), evaluate(cond.right, env)
                holds = a < b if cond.op == "<" else a <= b if cond.op == "<=" else a == b
                return evaluate(args[1] if holds else args[2], env)
            if name == "approx":
                M = _natural(evaluate(args[1], env), args[1], "precision")
                return BUILTINS[args[0].name].approx(M)
            vals = [evaluate(a, env) for a in args]
            if name == "pow":
                n = _natural(vals[1], args[1], "exponent")
                if vals[0] == 0 and n == 0:
                    return Fraction(1)
                return vals[0] ** n
            if name == "min":
                return min(vals)
            if name == "max":
                return max(vals)
            if name == "abs":
                return abs(vals[0])
            if name == "fact":
                return Fraction(factorial(_natural(vals[0], args[0], "factorial argument")))
    raise DSLError(f"cannot evaluate {type(node).__name__}", *node.pos)


@dataclass(frozen=True)
class SeqSpec:
    source: str
    tree: Node
    arity: int

    def __call__(self, *index: int) -> Fraction:
        if len(index) != self.arity:
            raise DSLError(f"sequence has arity {self.arity}, got {len(index)} indices", *self.tree.pos)
        return evaluate(self.tree, tuple(index))

    def sequence(self) -> EffectiveSequence:
        return EffectiveSequence(self.arity, self, "closed-form DSL expression").memoized()

    def pretty(self) -> str:
        return pretty(self.tree)


def parse_seq_dsl(text: str, arity: int | None = None) -> SeqSpec:
    """Parse a sequence; arity defaults to the largest variable used (at least 1)."""
    tree = parse_expr(text)
    used = max_variable(tree)
    if arity is None:
        arity = max(used, 1)
    elif used > arity:
        raise DSLError(f"expression uses m{used} but the sequence has arity {arity}", *tree.pos)
    return SeqSpec(text, tree, arity)
