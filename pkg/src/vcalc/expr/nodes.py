"""Expression AST over the index variable ν, the argument ξ and the position k.

The glyph ∞ is surface syntax for the index variable itself (the family
member at index n sees the value n) and ∂ is surface syntax for 1/∞, so
both are ordinary trees over the three variables.  π and e stay symbolic
until numeric evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

NU = "ν"
XI = "ξ"
K = "k"

VARIABLES = (NU, XI, K)
CONSTANTS = ("π", "e")

UNARY_OPS = ("neg", "abs", "sqrt", "exp", "ln", "sin", "cos", "tan", "arctan")
BINARY_OPS = ("+", "-", "*", "/", "^")
RELATIONS = ("<", "≤", "=", "≥", ">")


class Expr:
    """Base class for expression nodes.  All nodes are immutable."""

    __slots__ = ()

    def __add__(self, other):
        return Binary("+", self, _coerce(other))

    def __radd__(self, other):
        return Binary("+", _coerce(other), self)

    def __sub__(self, other):
        return Binary("-", self, _coerce(other))

    def __rsub__(self, other):
        return Binary("-", _coerce(other), self)

    def __mul__(self, other):
        return Binary("*", self, _coerce(other))

    def __rmul__(self, other):
        return Binary("*", _coerce(other), self)

    def __truediv__(self, other):
        return Binary("/", self, _coerce(other))

    def __rtruediv__(self, other):
        return Binary("/", _coerce(other), self)

    def __pow__(self, other):
        return Binary("^", self, _coerce(other))

    def __rpow__(self, other):
        return Binary("^", _coerce(other), self)

    def __neg__(self):
        return Unary("neg", self)


def _coerce(value) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, (int, float)):
        return Lit(float(value))
    raise TypeError(f"cannot use {value!r} in an expression")


@dataclass(frozen=True, eq=True)
class Lit(Expr):
    value: float

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value) + 0.0)  # kill -0.0


@dataclass(frozen=True, eq=True)
class Const(Expr):
    name: str  # "π" or "e"


@dataclass(frozen=True, eq=True)
class Var(Expr):
    name: str  # one of VARIABLES


@dataclass(frozen=True, eq=True)
class Unary(Expr):
    op: str
    arg: Expr


@dataclass(frozen=True, eq=True)
class Binary(Expr):
    op: str
    lhs: Expr
    rhs: Expr


@dataclass(frozen=True, eq=True)
class Branch:
    """One guarded branch of a piecewise expression: value if lhs rel rhs."""

    lhs: Expr
    rel: str
    rhs: Expr
    value: Expr


@dataclass(frozen=True, eq=True)
class Piecewise(Expr):
    branches: tuple[Branch, ...]
    default: Optional[Expr]


ExprLike = Union[Expr, int, float]

# Shorthand constructors used throughout the engine.
ZERO = Lit(0.0)
ONE = Lit(1.0)
PI = Const("π")
E = Const("e")
INFTY = Var(NU)  # ∞ is the index variable itself
VAR_XI = Var(XI)
VAR_K = Var(K)


def lit(v: float) -> Lit:
    return Lit(float(v))


def delta() -> Expr:
    """∂ = 1/∞."""
    return Binary("/", ONE, INFTY)


def free_vars(e: Expr) -> frozenset[str]:
    """Names of the variables occurring in e."""
    if isinstance(e, Var):
        return frozenset((e.name,))
    if isinstance(e, (Lit, Const)):
        return frozenset()
    if isinstance(e, Unary):
        return free_vars(e.arg)
    if isinstance(e, Binary):
        return free_vars(e.lhs) | free_vars(e.rhs)
    if isinstance(e, Piecewise):
        names: frozenset[str] = frozenset()
        for b in e.branches:
            names |= free_vars(b.lhs) | free_vars(b.rhs) | free_vars(b.value)
        if e.default is not None:
            names |= free_vars(e.default)
        return names
    raise TypeError(f"not an expression node: {e!r}")


def contains(e: Expr, name: str) -> bool:
    return name in free_vars(e)


def subst(e: Expr, name: str, replacement: Expr) -> Expr:
    """Substitute replacement for every occurrence of the variable."""
    if isinstance(e, Var):
        return replacement if e.name == name else e
    if isinstance(e, (Lit, Const)):
        return e
    if isinstance(e, Unary):
        return Unary(e.op, subst(e.arg, name, replacement))
    if isinstance(e, Binary):
        return Binary(e.op, subst(e.lhs, name, replacement), subst(e.rhs, name, replacement))
    if isinstance(e, Piecewise):
        branches = tuple(
            Branch(
                subst(b.lhs, name, replacement),
                b.rel,
                subst(b.rhs, name, replacement),
                subst(b.value, name, replacement),
            )
            for b in e.branches
        )
        default = None if e.default is None else subst(e.default, name, replacement)
        return Piecewise(branches, default)
    raise TypeError(f"not an expression node: {e!r}")


def node_key(e: Expr):
    """Deterministic sort key giving expressions a canonical order."""
    if isinstance(e, Lit):
        return (0, e.value)
    if isinstance(e, Const):
        return (1, e.name)
    if isinstance(e, Var):
        return (2, e.name)
    if isinstance(e, Unary):
        return (3, e.op, node_key(e.arg))
    if isinstance(e, Binary):
        return (4, e.op, node_key(e.lhs), node_key(e.rhs))
    if isinstance(e, Piecewise):
        parts = tuple(
            (node_key(b.lhs), b.rel, node_key(b.rhs), node_key(b.value)) for b in e.branches
        )
        return (5, parts, node_key(e.default) if e.default is not None else ())
    raise TypeError(f"not an expression node: {e!r}")
