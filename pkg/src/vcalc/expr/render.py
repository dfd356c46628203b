"""Deterministic renderer; parse(render(e)) is structurally identical to e.

The only non-canonical trees that do not survive the round trip are
Unary("neg", Lit) and Unary("sqrt", _): the parser folds literal signs and
reads sqrt(x) as x^0.5, and the renderer prints both in the folded form.
"""

from __future__ import annotations

import math

from .nodes import Binary, Const, Expr, Lit, Piecewise, Unary, Var

__all__ = ["render"]

_LEVEL_ADD = 1
_LEVEL_MUL = 2
_LEVEL_NEG = 3
_LEVEL_POW = 4
_LEVEL_ATOM = 5

_VAR_GLYPHS = {"ν": "∞", "ξ": "ξ", "k": "k"}


def _is_delta(e: Expr) -> bool:
    return (
        isinstance(e, Binary)
        and e.op == "/"
        and e.lhs == Lit(1.0)
        and e.rhs == Var("ν")
    )


def _level(e: Expr) -> int:
    if isinstance(e, Lit):
        return _LEVEL_NEG if e.value < 0 else _LEVEL_ATOM
    if isinstance(e, (Const, Var, Piecewise)):
        return _LEVEL_ATOM
    if isinstance(e, Unary):
        return _LEVEL_NEG if e.op == "neg" else _LEVEL_ATOM
    if isinstance(e, Binary):
        if _is_delta(e):
            return _LEVEL_ATOM
        if e.op == "^":
            return _LEVEL_ATOM if e.rhs == Lit(0.5) else _LEVEL_POW  # sqrt(x) form
        return _LEVEL_ADD if e.op in "+-" else _LEVEL_MUL
    raise TypeError(f"not an expression node: {e!r}")


def _lit_str(v: float) -> str:
    if math.isnan(v) or math.isinf(v):
        raise ValueError("non-finite literal cannot be rendered")
    if v == int(v) and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def render(e: Expr) -> str:
    if isinstance(e, Lit):
        return _lit_str(e.value)
    if isinstance(e, Const):
        return e.name
    if isinstance(e, Var):
        return _VAR_GLYPHS[e.name]
    if isinstance(e, Unary):
        if e.op == "neg":
            if isinstance(e.arg, Lit):
                return _lit_str(-e.arg.value)
            inner = render(e.arg)
            if _level(e.arg) <= _LEVEL_NEG:
                inner = f"({inner})"
            return f"-{inner}"
        if e.op == "abs":
            return f"|{render(e.arg)}|"
        if e.op == "sqrt":
            return f"sqrt({render(e.arg)})"
        return f"{e.op}({render(e.arg)})"
    if isinstance(e, Binary):
        if _is_delta(e):
            return "∂"
        if e.op == "^":
            if e.rhs == Lit(0.5):
                return f"sqrt({render(e.lhs)})"
            lhs = render(e.lhs)
            if _level(e.lhs) <= _LEVEL_POW:
                lhs = f"({lhs})"
            rhs = render(e.rhs)
            if _level(e.rhs) < _LEVEL_POW:
                rhs = f"({rhs})"
            return f"{lhs}^{rhs}"
        own = _level(e)
        lhs = render(e.lhs)
        if _level(e.lhs) < own:
            lhs = f"({lhs})"
        rhs = render(e.rhs)
        if _level(e.rhs) <= own:  # left-assoc: parenthesize equal level on the right
            rhs = f"({rhs})"
        return f"{lhs} {e.op} {rhs}"
    if isinstance(e, Piecewise):
        parts = [
            f"{render(b.lhs)} {b.rel} {render(b.rhs)} : {render(b.value)}"
            for b in e.branches
        ]
        if e.default is not None:
            parts.append(f"default : {render(e.default)}")
        return "piecewise(" + " ; ".join(parts) + ")"
    raise TypeError(f"not an expression node: {e!r}")
