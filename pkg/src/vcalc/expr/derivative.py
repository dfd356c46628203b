"""Symbolic differentiation.

ν is a constant symbol under d/dξ (virtual constants differentiate like
real ones), so ∞ and ∂ simply vanish.  Piecewise trees differentiate
branchwise with guards preserved; whether the result is actually defined
at a guard boundary is decided by the derivability predicate in vfunc,
not here.  Results are returned raw; callers simplify.
"""

from __future__ import annotations

from .nodes import (
    ONE,
    ZERO,
    Binary,
    Branch,
    Const,
    Expr,
    Lit,
    Piecewise,
    Unary,
    Var,
    contains,
)

__all__ = ["differentiate"]


def differentiate(e: Expr, wrt: str = "ξ") -> Expr:
    if isinstance(e, (Lit, Const)):
        return ZERO
    if isinstance(e, Var):
        return ONE if e.name == wrt else ZERO
    if isinstance(e, Unary):
        u = e.arg
        du = differentiate(u, wrt)
        if e.op == "neg":
            return Unary("neg", du)
        if e.op == "abs":
            return Binary("*", Binary("/", u, Unary("abs", u)), du)
        if e.op == "sqrt":
            return Binary("/", du, Binary("*", Lit(2.0), Unary("sqrt", u)))
        if e.op == "exp":
            return Binary("*", Unary("exp", u), du)
        if e.op == "ln":
            return Binary("/", du, u)
        if e.op == "sin":
            return Binary("*", Unary("cos", u), du)
        if e.op == "cos":
            return Unary("neg", Binary("*", Unary("sin", u), du))
        if e.op == "tan":
            return Binary("/", du, Binary("^", Unary("cos", u), Lit(2.0)))
        if e.op == "arctan":
            return Binary("/", du, Binary("+", ONE, Binary("^", u, Lit(2.0))))
        raise ValueError(f"unknown unary op {e.op!r}")
    if isinstance(e, Binary):
        a, b = e.lhs, e.rhs
        if e.op in ("+", "-"):
            return Binary(e.op, differentiate(a, wrt), differentiate(b, wrt))
        if e.op == "*":
            return Binary(
                "+",
                Binary("*", differentiate(a, wrt), b),
                Binary("*", a, differentiate(b, wrt)),
            )
        if e.op == "/":
            num = Binary(
                "-",
                Binary("*", differentiate(a, wrt), b),
                Binary("*", a, differentiate(b, wrt)),
            )
            return Binary("/", num, Binary("^", b, Lit(2.0)))
        if e.op == "^":
            if not contains(b, wrt):
                # power rule with constant exponent
                return Binary(
                    "*",
                    Binary("*", b, Binary("^", a, Binary("-", b, ONE))),
                    differentiate(a, wrt),
                )
            if not contains(a, wrt):
                # constant base: a^b · ln a · b'
                return Binary(
                    "*",
                    Binary("*", e, Unary("ln", a)),
                    differentiate(b, wrt),
                )
            # general case: a^b (b' ln a + b a'/a)
            term1 = Binary("*", differentiate(b, wrt), Unary("ln", a))
            term2 = Binary("/", Binary("*", b, differentiate(a, wrt)), a)
            return Binary("*", e, Binary("+", term1, term2))
    if isinstance(e, Piecewise):
        branches = tuple(
            Branch(br.lhs, br.rel, br.rhs, differentiate(br.value, wrt)) for br in e.branches
        )
        default = None if e.default is None else differentiate(e.default, wrt)
        return Piecewise(branches, default)
    raise TypeError(f"not an expression node: {e!r}")
