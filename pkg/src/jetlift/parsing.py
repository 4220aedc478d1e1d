"""Expression language for polynomials and vector fields.

Grammar (binding power from loosest to tightest)::

    expr    := expr ('+' | '-') expr
             | expr '*' expr
             | '-' expr
             | atom '^' INT
             | atom
    atom    := NUMBER | NUMBER 'i' | NAME | '(' expr ')'
    NUMBER  := INT ('/' INT)?

``^`` is right associative and only takes nonnegative integer exponents.
A numeric literal glued to ``i`` (``1i``, ``3/2i``) is imaginary.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .poly import Poly, Scalar, VariableMismatch

__all__ = [
    "ParseError",
    "Num",
    "Var",
    "Neg",
    "BinOp",
    "Pow",
    "parse_ast",
    "format_ast",
    "ast_to_poly",
    "parse_expression",
    "format_poly",
    "parse_field",
    "format_field",
]


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


@dataclass(frozen=True)
class Num:
    value: Scalar


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
class Pow:
    base: "Node"
    exponent: int


Node = Union[Num, Var, Neg, BinOp, Pow]

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>\d+(?:/\d+)?)(?P<imag>i(?![A-Za-z0-9_]))?
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*^()])
    """,
    re.VERBOSE,
)

# prefix minus sits between '*' and '^'
_BINARY_BP = {"+": 10, "-": 10, "*": 20, "^": 40}
_UNARY_BP = 30


def _tokenize(text: str) -> list:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup == "ws" or m.group("ws"):
            pos = m.end()
            continue
        if m.group("num") is not None:
            value = Fraction(m.group("num"))
            if m.group("imag"):
                tokens.append(("num", Scalar(0, value), pos))
            else:
                end = m.end()
                if end < len(text) and (text[end].isalpha() or text[end] == "_"):
                    raise ParseError("missing operator between number and name", end)
                tokens.append(("num", Scalar(value), pos))
        elif m.group("name") is not None:
            tokens.append(("name", m.group("name"), pos))
        else:
            tokens.append(("op", m.group("op"), pos))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, val, pos = self.advance()
        if kind != "op" or val != value:
            raise ParseError(f"expected {value!r}", pos)

    def parse(self) -> Node:
        node = self.expression(0)
        kind, val, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {val!r}", pos)
        return node

    def prefix(self) -> Node:
        kind, val, pos = self.advance()
        if kind == "num":
            return Num(val)
        if kind == "name":
            return Var(val)
        if kind == "op" and val == "-":
            return Neg(self.expression(_UNARY_BP))
        if kind == "op" and val == "(":
            node = self.expression(0)
            self.expect(")")
            return node
        if kind == "end":
            raise ParseError("unexpected end of input", pos)
        raise ParseError(f"unexpected token {val!r}", pos)

    def expression(self, min_bp: int) -> Node:
        left = self.prefix()
        powered = False
        while True:
            kind, op, pos = self.peek()
            if kind != "op" or op not in _BINARY_BP:
                break
            bp = _BINARY_BP[op]
            if bp <= min_bp:
                break
            self.advance()
            if op == "^":
                k, val, epos = self.advance()
                if k != "num" or not val.is_real() or val.re.denominator != 1:
                    raise ParseError("exponent must be a nonnegative integer", epos)
                if powered:
                    raise ParseError("chained exponents need parentheses", pos)
                left = Pow(left, int(val.re))
                powered = True
                continue
            right = self.expression(bp)
            left = BinOp(op, left, right)
        return left


def parse_ast(text: str) -> Node:
    """Parse ``text`` into an expression tree."""
    return _Parser(text).parse()


def _needs_parens(child: Node, parent_bp: int, right: bool = False) -> bool:
    if isinstance(child, BinOp):
        bp = _BINARY_BP[child.op]
        return bp < parent_bp or (right and bp == parent_bp)
    if isinstance(child, Neg):
        return _UNARY_BP < parent_bp
    if isinstance(child, Num) and not child.value.is_real() and child.value.re:
        return True
    return False


def format_ast(node: Node) -> str:
    """Print with the fewest parentheses that still re-parse to the same tree."""
    if isinstance(node, Num):
        v = node.value
        if v.is_real():
            return str(v)
        if not v.re:
            s = str(Scalar(v.im))
            return f"{s}i"
        return str(v)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        inner = format_ast(node.operand)
        if _needs_parens(node.operand, _UNARY_BP):
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(node, Pow):
        base = format_ast(node.base)
        if not isinstance(node.base, (Var,)) and not (
            isinstance(node.base, Num) and node.base.value.is_real()
        ):
            base = f"({base})"
        return f"{base}^{node.exponent}"
    bp = _BINARY_BP[node.op]
    left = format_ast(node.left)
    if _needs_parens(node.left, bp):
        left = f"({left})"
    right = format_ast(node.right)
    if _needs_parens(node.right, bp, right=True):
        right = f"({right})"
    if node.op == "*":
        return f"{left}*{right}"
    return f"{left} {node.op} {right}"


def ast_to_poly(node: Node, variables: Sequence[str]) -> Poly:
    variables = tuple(variables)
    if isinstance(node, Num):
        return Poly.constant(node.value, variables)
    if isinstance(node, Var):
        if node.name not in variables:
            raise VariableMismatch(
                f"unknown variable {node.name!r}; declared {', '.join(variables)}"
            )
        return Poly.var(node.name, variables)
    if isinstance(node, Neg):
        return -ast_to_poly(node.operand, variables)
    if isinstance(node, Pow):
        return ast_to_poly(node.base, variables) ** node.exponent
    left = ast_to_poly(node.left, variables)
    right = ast_to_poly(node.right, variables)
    if node.op == "+":
        return left + right
    if node.op == "-":
        return left - right
    return left * right


def parse_expression(text: str, variables: Sequence[str]) -> Poly:
    """Parse ``text`` into an exact :class:`Poly` over ``variables``."""
    return ast_to_poly(parse_ast(text), variables)


def _format_monomial(exp: tuple, variables: tuple) -> str:
    parts = []
    for v, k in zip(variables, exp):
        if k == 1:
            parts.append(v)
        elif k:
            parts.append(f"{v}^{k}")
    return "*".join(parts)


def _format_term(c: Scalar, mono: str) -> str:
    if not mono:
        return str(c)
    if c.is_real():
        if c == 1:
            return mono
        if c == -1:
            return f"-{mono}"
    return f"{c}*{mono}"


def format_poly(p: Poly) -> str:
    """Canonical text: graded-lex descending, e.g. ``3/2*x1^2*x2 + (0+1i)*t``."""
    if not p.terms:
        return "0"
    pieces = []
    for exp, c in p.sorted_terms():
        s = _format_term(c, _format_monomial(exp, p.variables))
        if not pieces:
            pieces.append(s)
        elif s.startswith("-"):
            pieces.append(f" - {s[1:]}")
        else:
            pieces.append(f" + {s}")
    return "".join(pieces)


def _split_top_level(text: str, start: int) -> list:
    parts, depth, cur = [], 0, start
    for j in range(start, len(text)):
        ch = text[j]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            parts.append((text[cur:j], cur))
            cur = j + 1
    parts.append((text[cur:], cur))
    return parts


def parse_field(text: str, variables: Sequence[str]) -> list:
    """Parse ``(p1, p2, ...)`` into a list of polynomials."""
    s = text.strip()
    offset = len(text) - len(text.lstrip())
    if not (s.startswith("(") and s.endswith(")")):
        raise ParseError("a vector field is written as (p1, ..., pd)", offset)
    inner = s[1:-1]
    comps = []
    for chunk, pos in _split_top_level(inner, 0):
        if not chunk.strip():
            raise ParseError("empty component", offset + 1 + pos)
        try:
            comps.append(parse_expression(chunk, variables))
        except ParseError as exc:
            raise ParseError(str(exc).rsplit(" (at", 1)[0], offset + 1 + pos + exc.position) from None
    return comps


def format_field(components) -> str:
    return "(" + ", ".join(format_poly(p) for p in components) + ")"
