"""Pure-Python (numpy vectorized) tape interpreter.

Fallback backend with semantics identical to the Cython core in _core.pyx;
tests assert value- and status-level agreement between the two.  Status
codes and the rules that assign them are described in vcalc.expr.tape.
"""

from __future__ import annotations

import math

import numpy as np

OK = 0
NOT_DEFINED = 1
HUGE = 2
TINY = 3
LOST = 4

# Severity order used when statuses merge: OK < TINY < HUGE < LOST < NOT_DEFINED.
_RANK = np.array([0, 4, 2, 1, 3], dtype=np.int8)
_UNRANK = np.array([0, 3, 2, 4, 1], dtype=np.int8)

_OP_CONST = 0
_OP_LOAD_NU = 1
_OP_LOAD_XI = 2
_OP_LOAD_K = 3
_OP_NEG = 4
_OP_ABS = 5
_OP_SQRT = 6
_OP_EXP = 7
_OP_LN = 8
_OP_SIN = 9
_OP_COS = 10
_OP_TAN = 11
_OP_ATAN = 12
_OP_ADD = 13
_OP_SUB = 14
_OP_MUL = 15
_OP_DIV = 16
_OP_POW = 17
_OP_LT = 18
_OP_LE = 19
_OP_EQ = 20
_OP_GE = 21
_OP_GT = 22
_OP_SELECT = 23
_OP_UNDEF = 24

BACKEND = "pure"


def _combine(sa: np.ndarray, sb: np.ndarray) -> np.ndarray:
    return _UNRANK[np.maximum(_RANK[sa], _RANK[sb])]


def _upgrade(s: np.ndarray, status: int, mask: np.ndarray) -> np.ndarray:
    merged = _UNRANK[np.maximum(_RANK[s], _RANK[status])]
    return np.where(mask, merged, s)


def _nan_net(v: np.ndarray, s: np.ndarray) -> np.ndarray:
    bad = np.isnan(v)
    s = np.where(bad & (s == OK), NOT_DEFINED, s)
    s = np.where(bad & ((s == HUGE) | (s == TINY)), LOST, s)
    return s


def eval_tape(ops, args, nu, xi, k):
    """Evaluate a compiled tape at arrays of bindings.

    All binding arrays share one length m; returns (values, statuses) of
    length m.  Lanes are independent: each corresponds to one evaluation
    of the expression at (nu[i], xi[i], k[i]).
    """
    nu = np.asarray(nu, dtype=np.float64)
    xi = np.asarray(xi, dtype=np.float64)
    k = np.asarray(k, dtype=np.float64)
    m = nu.shape[0]
    stack_v: list[np.ndarray] = []
    stack_s: list[np.ndarray] = []

    def push(v, s):
        stack_v.append(v)
        stack_s.append(s)

    def pop():
        return stack_v.pop(), stack_s.pop()

    ok = np.zeros(m, dtype=np.int8)
    with np.errstate(all="ignore"):
        for idx in range(len(ops)):
            op = int(ops[idx])
            if op == _OP_CONST:
                push(np.full(m, args[idx]), ok.copy())
            elif op == _OP_LOAD_NU:
                push(nu.copy(), ok.copy())
            elif op == _OP_LOAD_XI:
                push(xi.copy(), ok.copy())
            elif op == _OP_LOAD_K:
                push(k.copy(), ok.copy())
            elif op == _OP_UNDEF:
                push(np.full(m, np.nan), np.full(m, NOT_DEFINED, dtype=np.int8))
            elif op <= _OP_ATAN:  # unary
                a, sa = pop()
                v, s = _unary(op, a, sa)
                push(v, _nan_net(v, s))
            elif op <= _OP_POW:  # arithmetic binary
                b, sb = pop()
                a, sa = pop()
                v, s = _binary(op, a, sa, b, sb)
                push(v, _nan_net(v, s))
            elif op <= _OP_GT:  # comparison
                b, sb = pop()
                a, sa = pop()
                v, s = _compare(op, a, sa, b, sb)
                push(v, s)
            elif op == _OP_SELECT:
                ev, es = pop()
                tv, ts = pop()
                cv, cs = pop()
                choose = cv != 0.0
                v = np.where(choose, tv, ev)
                s = np.where(choose, ts, es).astype(np.int8)
                tainted = (cs == HUGE) | (cs == TINY) | (cs == LOST)
                s = _upgrade(s, LOST, tainted)
                s = np.where(cs == NOT_DEFINED, np.int8(NOT_DEFINED), s)
                push(v, s)
            else:
                raise ValueError(f"bad opcode {op}")

    v, s = pop()
    assert not stack_v
    return v, s.astype(np.int8)


def _unary(op, a, sa):
    if op == _OP_NEG:
        return -a, sa
    if op == _OP_ABS:
        return np.abs(a), sa
    if op == _OP_SQRT:
        v = np.sqrt(np.where(a < 0, np.nan, a))
        return v, np.where(a < 0, np.int8(NOT_DEFINED), sa)
    if op == _OP_EXP:
        v = np.exp(a)
        fin = np.isfinite(a)
        s = _upgrade(sa, HUGE, np.isinf(v) & fin)
        s = _upgrade(s, TINY, (v == 0.0) & fin)
        return v, s
    if op == _OP_LN:
        lost = (a == 0.0) & (sa == TINY)
        bad = (a <= 0) & ~lost
        v = np.log(np.where(a > 0, a, np.nan))
        s = np.where(bad, np.int8(NOT_DEFINED), sa)
        s = _upgrade(s, LOST, lost)
        return v, s
    if op == _OP_SIN:
        return np.sin(a), sa
    if op == _OP_COS:
        return np.cos(a), sa
    if op == _OP_TAN:
        return np.tan(a), sa
    if op == _OP_ATAN:
        return np.arctan(a), sa
    raise ValueError(f"bad unary opcode {op}")


def _binary(op, a, sa, b, sb):
    s = _combine(sa, sb)
    fin = np.isfinite(a) & np.isfinite(b)
    if op == _OP_ADD or op == _OP_SUB:
        v = a + b if op == _OP_ADD else a - b
        return v, _upgrade(s, HUGE, np.isinf(v) & fin)
    if op == _OP_MUL:
        v = a * b
        s = _upgrade(s, HUGE, np.isinf(v) & fin)
        s = _upgrade(s, TINY, (v == 0.0) & (a != 0) & (b != 0) & fin)
        return v, s
    if op == _OP_DIV:
        exact_zero_den = (b == 0) & (sb != TINY)
        tainted_zero_den = (b == 0) & (sb == TINY)
        v = a / np.where(b == 0, np.nan, b)
        v = np.where(tainted_zero_den, np.sign(a) * np.sign(np.copysign(1.0, b)) * np.inf, v)
        v = np.where(exact_zero_den, np.nan, v)
        s = _upgrade(s, HUGE, np.isinf(v) & fin & (b != 0))
        s = _upgrade(s, HUGE, tainted_zero_den & (a != 0))
        s = _upgrade(s, LOST, tainted_zero_den & (a == 0))
        s = _upgrade(s, TINY, (v == 0.0) & (a != 0) & fin & (b != 0))
        # finite / carried-infinity: magnitude is truly minuscule, not huge
        s = np.where((sb == HUGE) & np.isinf(b) & np.isfinite(a) & (s == HUGE), np.int8(TINY), s)
        s = np.where(exact_zero_den, np.int8(NOT_DEFINED), s)
        return v, s
    if op == _OP_POW:
        b_int = (b == np.floor(b)) & (np.abs(b) < 2**53)
        bad_negbase = (a < 0) & ~b_int
        zero_base = (a == 0) & (sa != TINY)
        bad_zero = zero_base & (b < 0)
        safe_a = np.where(bad_negbase, np.nan, a)
        v = np.power(safe_a, b)
        v = np.where(bad_zero, np.nan, v)
        bad = bad_negbase | bad_zero
        s = _upgrade(s, HUGE, np.isinf(v) & fin & ~bad)
        s = _upgrade(s, TINY, (v == 0.0) & ((a != 0) | (sa == TINY)) & (b != 0) & fin)
        s = np.where(bad, np.int8(NOT_DEFINED), s)
        return v, s
    raise ValueError(f"bad binary opcode {op}")


def _compare(op, a, sa, b, sb):
    if op == _OP_LT:
        raw = a < b
    elif op == _OP_LE:
        raw = a <= b
    elif op == _OP_EQ:
        raw = a == b
    elif op == _OP_GE:
        raw = a >= b
    else:
        raw = a > b
    v = raw.astype(np.float64)
    s = _combine(sa, sb)
    # A tainted operand usually ruins the comparison, except when the other
    # side is cleanly separated: ±inf (huge) vs any finite, ±0 (tiny) vs a
    # nonzero finite.
    taint_a = (sa == HUGE) | (sa == TINY) | (sa == LOST)
    taint_b = (sb == HUGE) | (sb == TINY) | (sb == LOST)
    reliable_a = ((sa == HUGE) & np.isinf(a) & (sb == OK) & np.isfinite(b)) | (
        (sa == TINY) & (a == 0) & (sb == OK) & (b != 0)
    )
    reliable_b = ((sb == HUGE) & np.isinf(b) & (sa == OK) & np.isfinite(a)) | (
        (sb == TINY) & (b == 0) & (sa == OK) & (a != 0)
    )
    unreliable = (taint_a | taint_b) & ~(reliable_a | reliable_b)
    s = np.where((s != NOT_DEFINED) & unreliable, np.int8(LOST), s)
    s = np.where((s != NOT_DEFINED) & ~unreliable & (taint_a | taint_b), np.int8(OK), s)
    return v, s


def sum_tape(ops, args, nu: float, xi: float, n_terms: int) -> tuple[float, int]:
    """Sum the tape over positions k = 1..n_terms at a fixed index ν.

    Accumulation is exactly rounded per chunk (math.fsum); the status is
    the severity-merge of all term statuses, with accumulator overflow
    reported as HUGE.
    """
    if n_terms <= 0:
        return 0.0, OK
    chunk = 1 << 18
    partials: list[float] = []
    worst = 0
    for start in range(1, n_terms + 1, chunk):
        stop = min(start + chunk, n_terms + 1)
        ks = np.arange(start, stop, dtype=np.float64)
        nus = np.full(ks.shape, float(nu))
        xis = np.full(ks.shape, float(xi))
        v, s = eval_tape(ops, args, nus, xis, ks)
        if s.any():
            worst_here = int(_UNRANK[int(_RANK[s].max())])
            worst = int(_UNRANK[max(_RANK[worst], _RANK[worst_here])])
            if worst == NOT_DEFINED:
                return math.nan, NOT_DEFINED
        partials.append(math.fsum(v.tolist()))
    total = math.fsum(partials)
    if math.isinf(total):
        worst = int(_UNRANK[max(_RANK[worst], _RANK[HUGE])])
    return total, worst
