"""Numeric evaluation of expressions at concrete bindings."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .._kernel import eval_tape
from .nodes import Expr, free_vars
from .tape import Status, Tape, compile_tape

__all__ = ["EvalResult", "evaluate_at", "eval_grid", "MissingBindingError", "Status"]


class MissingBindingError(ValueError):
    """A variable occurring in the expression was not bound (usage error)."""


@dataclass(frozen=True)
class EvalResult:
    value: float
    status: int  # Status code

    @property
    def ok(self) -> bool:
        return self.status == Status.OK

    @property
    def defined(self) -> bool:
        """Defined at this binding (HUGE/TINY values are defined, just extreme)."""
        return self.status in (Status.OK, Status.HUGE, Status.TINY)

    def __repr__(self):
        names = {0: "ok", 1: "not-defined", 2: "huge", 3: "tiny", 4: "lost"}
        return f"EvalResult({self.value!r}, {names[self.status]})"


_tape_cache: dict[int, tuple[Expr, Tape]] = {}
_TAPE_CACHE_MAX = 4096


def tape_for(e: Expr) -> Tape:
    entry = _tape_cache.get(id(e))
    if entry is not None and entry[0] is e:
        return entry[1]
    tape = compile_tape(e)
    if len(_tape_cache) >= _TAPE_CACHE_MAX:
        _tape_cache.clear()
    _tape_cache[id(e)] = (e, tape)
    return tape


def _check_bindings(e: Expr, bindings) -> None:
    needed = free_vars(e)
    missing = needed - set(bindings)
    if missing:
        raise MissingBindingError(f"missing bindings for {sorted(missing)}")
    for name in ("ν", "k"):
        if name in needed:
            v = bindings[name]
            if v < 1 or v != int(v):
                raise MissingBindingError(f"{name} must be a natural number >= 1, got {v!r}")


def evaluate_at(e: Expr, bindings) -> EvalResult:
    """Evaluate e at a variable binding, IEEE style with status tracking.

    bindings maps variable names ("ν", "ξ", "k") to reals; ν and k must be
    naturals >= 1.  A missing binding is a usage error, distinct from the
    expression being NOT_DEFINED at the point.
    """
    _check_bindings(e, bindings)
    tape = tape_for(e)
    one = np.ones(1)
    nu = one * float(bindings.get("ν", math.nan))
    xi = one * float(bindings.get("ξ", math.nan))
    k = one * float(bindings.get("k", math.nan))
    v, s = eval_tape(tape.ops, tape.args, nu, xi, k)
    return EvalResult(float(v[0]), int(s[0]))


def eval_grid(e: Expr, nu, xi=None, k=None):
    """Vectorized evaluation; binding arrays broadcast to a common length.

    Returns (values, statuses) numpy arrays.  Unused variables may be left
    as None.
    """
    tape = tape_for(e)
    arrays = [np.asarray(a, dtype=np.float64) for a in (nu, xi, k) if a is not None]
    m = max((a.shape[0] for a in arrays if a.ndim > 0), default=1)

    def full(a):
        if a is None:
            return np.full(m, np.nan)
        a = np.asarray(a, dtype=np.float64)
        return np.full(m, float(a)) if a.ndim == 0 else a

    return eval_tape(tape.ops, tape.args, full(nu), full(xi), full(k))
