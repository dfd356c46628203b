"""Compile expression trees to flat evaluation tapes.

A tape is a postfix program over a value stack.  Both kernel backends (the
Cython core and the pure-numpy fallback) interpret the same opcode set, so
an expression compiled once can be evaluated at many (ν, ξ, k) bindings in
a single call; this is the hot loop behind quadrature, Riemann sums and
sampling schedules.

Every evaluated point carries a status code alongside its value:

    OK          ordinary finite result
    NOT_DEFINED domain violation (division by zero, ln of non-positive,
                sqrt of negative, non-real power, no piecewise branch)
    HUGE        the true value is finite but overflowed binary64
    TINY        the true value is nonzero but underflowed to zero
    LOST        an overflow/underflow happened upstream and the final
                value (or even definedness) can no longer be trusted

HUGE/TINY/LOST let the decision layer answer Unknown instead of silently
reporting float artifacts as mathematical facts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .nodes import Binary, Const, Expr, Lit, Piecewise, Unary, Var

__all__ = ["Tape", "compile_tape", "Status"]


class Status:
    OK = 0
    NOT_DEFINED = 1
    HUGE = 2
    TINY = 3
    LOST = 4


# Opcodes (shared with both kernel backends; keep in sync with _core.pyx).
OP_CONST = 0
OP_LOAD_NU = 1
OP_LOAD_XI = 2
OP_LOAD_K = 3
OP_NEG = 4
OP_ABS = 5
OP_SQRT = 6
OP_EXP = 7
OP_LN = 8
OP_SIN = 9
OP_COS = 10
OP_TAN = 11
OP_ATAN = 12
OP_ADD = 13
OP_SUB = 14
OP_MUL = 15
OP_DIV = 16
OP_POW = 17
OP_LT = 18
OP_LE = 19
OP_EQ = 20
OP_GE = 21
OP_GT = 22
OP_SELECT = 23
OP_UNDEF = 24

_UNARY_OPS = {
    "neg": OP_NEG,
    "abs": OP_ABS,
    "sqrt": OP_SQRT,
    "exp": OP_EXP,
    "ln": OP_LN,
    "sin": OP_SIN,
    "cos": OP_COS,
    "tan": OP_TAN,
    "arctan": OP_ATAN,
}
_BINARY_OPS = {"+": OP_ADD, "-": OP_SUB, "*": OP_MUL, "/": OP_DIV, "^": OP_POW}
_REL_OPS = {"<": OP_LT, "≤": OP_LE, "=": OP_EQ, "≥": OP_GE, ">": OP_GT}
_CONST_VALUES = {"π": math.pi, "e": math.e}


@dataclass(frozen=True)
class Tape:
    ops: np.ndarray  # int32
    args: np.ndarray  # float64, one slot per instruction (only OP_CONST uses it)
    max_stack: int
    uses: frozenset[str]

    def __len__(self) -> int:
        return len(self.ops)


def compile_tape(e: Expr) -> Tape:
    ops: list[int] = []
    args: list[float] = []

    def emit(op: int, arg: float = 0.0) -> None:
        ops.append(op)
        args.append(arg)

    def walk(node: Expr) -> None:
        if isinstance(node, Lit):
            emit(OP_CONST, node.value)
        elif isinstance(node, Const):
            emit(OP_CONST, _CONST_VALUES[node.name])
        elif isinstance(node, Var):
            emit({"ν": OP_LOAD_NU, "ξ": OP_LOAD_XI, "k": OP_LOAD_K}[node.name])
        elif isinstance(node, Unary):
            walk(node.arg)
            emit(_UNARY_OPS[node.op])
        elif isinstance(node, Binary):
            walk(node.lhs)
            walk(node.rhs)
            emit(_BINARY_OPS[node.op])
        elif isinstance(node, Piecewise):
            walk_piecewise(node, 0)
        else:
            raise TypeError(f"not an expression node: {node!r}")

    def walk_piecewise(node: Piecewise, i: int) -> None:
        # Nested selects: all branches are evaluated, the status/value of the
        # selected lane wins.  NOT_DEFINED in a non-selected lane is dropped.
        if i == len(node.branches):
            if node.default is None:
                emit(OP_UNDEF)
            else:
                walk(node.default)
            return
        b = node.branches[i]
        walk(b.lhs)
        walk(b.rhs)
        emit(_REL_OPS[b.rel])
        walk(b.value)
        walk_piecewise(node, i + 1)
        emit(OP_SELECT)

    walk(e)

    depth = 0
    max_depth = 0
    for op in ops:
        if op in (OP_CONST, OP_LOAD_NU, OP_LOAD_XI, OP_LOAD_K, OP_UNDEF):
            depth += 1
        elif op == OP_SELECT:
            depth -= 2
        elif op >= OP_ADD:
            depth -= 1
        max_depth = max(max_depth, depth)
    assert depth == 1, "tape must leave exactly one value on the stack"

    from .nodes import free_vars

    return Tape(
        ops=np.asarray(ops, dtype=np.int32),
        args=np.asarray(args, dtype=np.float64),
        max_stack=max_depth,
        uses=free_vars(e),
    )
