"""Parser for the expression surface syntax.

Grammar sketch (see docs/grammar.ebnf for the full EBNF):

    expr     ::= term (("+" | "-") term)*
    term     ::= factor (("*" | "/") factor)*
    factor   ::= "-" factor | power
    power    ::= atom ("^" factor)?          -- right associative
    atom     ::= number | name | call | "(" expr ")" | "|" expr "|"
                 | "piecewise" "(" branch (";" branch)* ")"
    branch   ::= expr rel expr ":" expr  |  "default" ":" expr

Precedence: ^  >  unary -  >  * /  >  + -.  Greek glyphs ∞ ∂ π ξ ν τ are
accepted with ASCII aliases inf, del, pi, xi, nu, tau; sqrt(x) is sugar
for x^0.5 and ∂ for 1/∞.  Unknown identifiers are rejected.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .nodes import (
    Binary,
    Branch,
    Const,
    Expr,
    Lit,
    Piecewise,
    Unary,
    Var,
)

__all__ = ["parse", "ParseError", "ParseDiagnostic"]


@dataclass(frozen=True)
class ParseDiagnostic:
    """Where and why parsing failed, with the token kinds that would fix it."""

    position: int
    message: str
    expected: tuple[str, ...] = field(default_factory=tuple)


class ParseError(ValueError):
    def __init__(self, diagnostic: ParseDiagnostic):
        super().__init__(f"at {diagnostic.position}: {diagnostic.message}")
        self.diagnostic = diagnostic


# Name resolution tables.  ∞ and ν are the same node: the family member at
# index n sees the value n either way.
_VAR_ALIASES = {
    "∞": "ν", "inf": "ν", "ν": "ν", "nu": "ν",
    "ξ": "ξ", "xi": "ξ", "τ": "ξ", "tau": "ξ",
    "k": "k",
}
_CONST_ALIASES = {"π": "π", "pi": "π", "e": "e"}
_DELTA_ALIASES = ("∂", "del")
_FUNCTIONS = {
    "abs": "abs", "exp": "exp", "ln": "ln", "sin": "sin", "cos": "cos",
    "tan": "tan", "arctan": "arctan", "atan": "arctan",
}

_TOKEN_RE = re.compile(
    r"""
    (?P<num>\d+\.\d*(?:[eE][-+]?\d+)?|\.\d+(?:[eE][-+]?\d+)?|\d+(?:[eE][-+]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*|[∞∂πξντ])
  | (?P<op><=|>=|≤|≥|[-+*/^()|;:,<>=])
  | (?P<ws>\s+)
    """,
    re.VERBOSE,
)

_REL_CANON = {"<": "<", "<=": "≤", "≤": "≤", "=": "=", ">=": "≥", "≥": "≥", ">": ">"}


@dataclass(frozen=True)
class _Token:
    kind: str  # "num" | "name" | "op" | "end"
    text: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    i = 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        if m is None:
            raise ParseError(
                ParseDiagnostic(i, f"unexpected character {text[i]!r}", ("number", "name", "operator"))
            )
        if m.lastgroup != "ws":
            tokens.append(_Token(m.lastgroup, m.group(), i))
        i = m.end()
    tokens.append(_Token("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def cur(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        tok = self.cur
        self.i += 1
        return tok

    def fail(self, message: str, expected: tuple[str, ...] = ()):
        raise ParseError(ParseDiagnostic(self.cur.pos, message, expected))

    def expect_op(self, op: str):
        if self.cur.kind == "op" and self.cur.text == op:
            return self.advance()
        self.fail(f"expected {op!r}, found {self.cur.text or 'end of input'!r}", (op,))

    def at_op(self, *ops: str) -> bool:
        return self.cur.kind == "op" and self.cur.text in ops

    # expr := term (("+"|"-") term)*
    def parse_expr(self) -> Expr:
        node = self.parse_term()
        while self.at_op("+", "-"):
            op = self.advance().text
            node = Binary(op, node, self.parse_term())
        return node

    def parse_term(self) -> Expr:
        node = self.parse_factor()
        while self.at_op("*", "/"):
            op = self.advance().text
            node = Binary(op, node, self.parse_factor())
        return node

    def parse_factor(self) -> Expr:
        if self.at_op("-"):
            self.advance()
            inner = self.parse_factor()
            if isinstance(inner, Lit):
                return Lit(-inner.value)  # fold literal signs at parse time
            return Unary("neg", inner)
        if self.at_op("+"):
            self.advance()
            return self.parse_factor()
        return self.parse_power()

    def parse_power(self) -> Expr:
        base = self.parse_atom()
        if self.at_op("^"):
            self.advance()
            return Binary("^", base, self.parse_factor())  # right assoc, binds exponent signs
        return base

    def parse_atom(self) -> Expr:
        tok = self.cur
        if tok.kind == "num":
            self.advance()
            return Lit(float(tok.text))
        if tok.kind == "op" and tok.text == "(":
            self.advance()
            node = self.parse_expr()
            self.expect_op(")")
            return node
        if tok.kind == "op" and tok.text == "|":
            self.advance()
            node = self.parse_expr()
            self.expect_op("|")
            return Unary("abs", node)
        if tok.kind == "name":
            return self.parse_name()
        self.fail(
            f"expected an expression, found {tok.text or 'end of input'!r}",
            ("number", "name", "(", "|", "-"),
        )

    def parse_name(self) -> Expr:
        tok = self.advance()
        name = tok.text
        if name == "piecewise":
            return self.parse_piecewise()
        if name == "sqrt":
            self.expect_op("(")
            arg = self.parse_expr()
            self.expect_op(")")
            return Binary("^", arg, Lit(0.5))
        if name in _FUNCTIONS:
            self.expect_op("(")
            arg = self.parse_expr()
            self.expect_op(")")
            return Unary(_FUNCTIONS[name], arg)
        if name in _DELTA_ALIASES:
            return Binary("/", Lit(1.0), Var("ν"))
        if name in _VAR_ALIASES:
            return Var(_VAR_ALIASES[name])
        if name in _CONST_ALIASES:
            return Const(_CONST_ALIASES[name])
        raise ParseError(
            ParseDiagnostic(
                tok.pos,
                f"unknown identifier {name!r}",
                tuple(sorted(set(_VAR_ALIASES) | set(_CONST_ALIASES) | set(_FUNCTIONS) | {"piecewise", "sqrt"})),
            )
        )

    def parse_piecewise(self) -> Expr:
        self.expect_op("(")
        branches: list[Branch] = []
        default: Expr | None = None
        while True:
            if self.cur.kind == "name" and self.cur.text == "default":
                self.advance()
                self.expect_op(":")
                if default is not None:
                    self.fail("duplicate default branch")
                default = self.parse_expr()
            else:
                lhs = self.parse_expr()
                if not (self.cur.kind == "op" and self.cur.text in _REL_CANON):
                    self.fail("expected a comparison in piecewise guard", tuple(_REL_CANON))
                rel = _REL_CANON[self.advance().text]
                rhs = self.parse_expr()
                self.expect_op(":")
                value = self.parse_expr()
                if default is not None:
                    self.fail("guarded branch after default")
                branches.append(Branch(lhs, rel, rhs, value))
            if self.at_op(";"):
                self.advance()
                continue
            break
        self.expect_op(")")
        if not branches and default is None:
            self.fail("empty piecewise")
        return Piecewise(tuple(branches), default)


def parse(text: str) -> Expr:
    """Parse an expression string into an AST.

    Raises ParseError (carrying a ParseDiagnostic) on malformed input.
    """
    p = _Parser(text)
    node = p.parse_expr()
    if p.cur.kind != "end":
        p.fail(f"unexpected trailing input {p.cur.text!r}")
    return node
