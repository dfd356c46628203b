"""Rule-based canonical simplifier.

The rule set is fixed and documented here; anything beyond it is left to
numeric verdicts.  Rewrites never enlarge the set of bindings at which an
expression is defined:

  * constant folding of literal subtrees (guarded: the fold must be exact
    IEEE and defined; π and e stay symbolic),
  * products and quotients flatten to a coefficient and a factor list;
    same-base powers merge when the base is provably positive, or when
    both exponents are integer literals of one sign,
  * sums flatten to a constant plus coefficient-weighted terms; like
    terms combine; zero terms drop only when the dropped factor is
    total (defined at every binding),
  * x*1, x+0 always; x*0 only when the other factor is total,
  * ∂·∞ → 1 falls out of the power merge (∂ is ν^-1, ∞ is ν),
  * power normalizations: (x^a)^b, (xy)^n, e^0, x^1, ln(e^u) → u, ln(e) → 1,
  * sin/cos/tan fold exactly at literal half-multiples of π, arctan at
    0 and ±1; other literal arguments fold numerically.

The output is canonical: factor and term order is deterministic, so
structural equality of simplified trees is a meaningful check.
"""

from __future__ import annotations

import math

from .nodes import (
    E,
    ONE,
    PI,
    ZERO,
    Binary,
    Branch,
    Const,
    Expr,
    Lit,
    Piecewise,
    Unary,
    Var,
    node_key,
)

__all__ = ["simplify", "is_total", "is_positive", "is_nonneg"]

_MAX_PASSES = 12


class _Bail(Exception):
    """Abandon a rewrite that would produce a non-finite literal."""


# ---------------------------------------------------------------------------
# sign and totality analysis (conservative)

def is_positive(e: Expr) -> bool:
    """True if e > 0 at every binding where it is defined."""
    if isinstance(e, Lit):
        return e.value > 0
    if isinstance(e, Const):
        return True  # π and e
    if isinstance(e, Var):
        return e.name in ("ν", "k")  # naturals >= 1
    if isinstance(e, Unary):
        if e.op == "exp":
            return True
        if e.op == "abs":
            return is_positive(e.arg)  # |x| > 0 wherever x > 0; conservative
        if e.op == "sqrt":
            return is_positive(e.arg)
        return False
    if isinstance(e, Binary):
        if e.op == "+":
            a, b = e.lhs, e.rhs
            return (is_positive(a) and is_nonneg(b)) or (is_nonneg(a) and is_positive(b))
        if e.op in ("*", "/"):
            return is_positive(e.lhs) and is_positive(e.rhs)
        if e.op == "^":
            if is_positive(e.lhs):
                return True
            return False
        if e.op == "-":
            return False
    return False


def is_nonneg(e: Expr) -> bool:
    """True if e >= 0 at every binding where it is defined."""
    if isinstance(e, Lit):
        return e.value >= 0
    if isinstance(e, Unary) and e.op == "abs":
        return True
    if isinstance(e, Binary):
        if e.op == "+":
            return is_nonneg(e.lhs) and is_nonneg(e.rhs)
        if e.op in ("*", "/"):
            return (is_nonneg(e.lhs) and is_nonneg(e.rhs)) or (
                is_negative_lit(e.lhs) and is_nonpos(e.rhs)
            )
        if e.op == "^":
            if is_positive(e.lhs) or is_nonneg(e.lhs):
                return True
            if isinstance(e.rhs, Lit) and _is_int(e.rhs.value) and int(e.rhs.value) % 2 == 0:
                return True
            return False
    return is_positive(e)


def is_nonpos(e: Expr) -> bool:
    if isinstance(e, Lit):
        return e.value <= 0
    if isinstance(e, Unary) and e.op == "neg":
        return is_nonneg(e.arg)
    return False


def is_negative_lit(e: Expr) -> bool:
    return isinstance(e, Lit) and e.value < 0


def is_nonzero(e: Expr) -> bool:
    if isinstance(e, Lit):
        return e.value != 0
    if is_positive(e):
        return True
    if isinstance(e, Unary) and e.op == "neg":
        return is_nonzero(e.arg)
    if isinstance(e, Binary) and e.op in ("*", "/"):
        return is_nonzero(e.lhs) and is_nonzero(e.rhs)
    return False


def is_total(e: Expr) -> bool:
    """True if e is defined (possibly huge/tiny) at every admissible binding."""
    if isinstance(e, (Lit, Const, Var)):
        return True
    if isinstance(e, Unary):
        if e.op in ("neg", "abs", "sin", "cos", "arctan"):
            return is_total(e.arg)
        if e.op == "exp":
            return is_total(e.arg)
        if e.op == "ln":
            return is_total(e.arg) and is_positive(e.arg)
        if e.op == "sqrt":
            return is_total(e.arg) and is_nonneg(e.arg)
        return False  # tan has poles
    if isinstance(e, Binary):
        if e.op in ("+", "-", "*"):
            return is_total(e.lhs) and is_total(e.rhs)
        if e.op == "/":
            return is_total(e.lhs) and is_total(e.rhs) and is_nonzero(e.rhs)
        if e.op == "^":
            if not (is_total(e.lhs) and is_total(e.rhs)):
                return False
            if is_positive(e.lhs):
                return True
            if isinstance(e.rhs, Lit) and _is_int(e.rhs.value):
                return e.rhs.value >= 0 or is_nonzero(e.lhs)
            return False
    if isinstance(e, Piecewise):
        if e.default is None:
            return False
        parts = [e.default]
        for b in e.branches:
            if not (is_total(b.lhs) and is_total(b.rhs)):
                return False
            parts.append(b.value)
        return all(is_total(p) for p in parts)
    return False


def _is_int(v: float) -> bool:
    return math.isfinite(v) and v == int(v) and abs(v) < 2**53


# ---------------------------------------------------------------------------
# product flattening

def _lit_pow(base: float, exp: float) -> float:
    if base < 0 and not _is_int(exp):
        raise _Bail
    if base == 0 and exp < 0:
        raise _Bail
    try:
        v = math.pow(base, exp)
    except (OverflowError, ValueError):
        raise _Bail from None
    if not math.isfinite(v):
        raise _Bail
    return v


def _mergeable(base: Expr, e1: Expr, e2: Expr) -> bool:
    if is_positive(base):
        return True
    if isinstance(e1, Lit) and isinstance(e2, Lit) and _is_int(e1.value) and _is_int(e2.value):
        return (e1.value >= 0 and e2.value >= 0) or (e1.value <= 0 and e2.value <= 0)
    return False


def _add_exps(e1: Expr, e2: Expr) -> Expr:
    if isinstance(e1, Lit) and isinstance(e2, Lit):
        v = e1.value + e2.value
        if math.isfinite(v):
            return Lit(v)
        raise _Bail
    return Binary("+", e1, e2)  # second pass canonicalizes


def _mul_exps(e1: Expr, e2: Expr) -> Expr:
    if isinstance(e1, Lit) and isinstance(e2, Lit):
        v = e1.value * e2.value
        if math.isfinite(v):
            return Lit(v)
        raise _Bail
    return Binary("*", e1, e2)


class _MulParts:
    __slots__ = ("coef", "factors")

    def __init__(self):
        self.coef = 1.0
        self.factors: list[tuple[Expr, Expr]] = []  # (base, exponent)

    def add_factor(self, base: Expr, exp: Expr) -> None:
        for i, (b, x) in enumerate(self.factors):
            if b == base and _mergeable(base, x, exp):
                self.factors[i] = (b, _add_exps(x, exp))
                return
        self.factors.append((base, exp))


def _flatten_mul(e: Expr, parts: _MulParts, exp: Expr) -> None:
    """Collect e**exp into parts."""
    one_exp = exp == ONE
    if isinstance(e, Lit):
        if one_exp:
            v = e.value
        elif isinstance(exp, Lit):
            v = _lit_pow(e.value, exp.value)
        else:
            if e.value == 1.0:  # 1^x = 1 only if x always defined
                if is_total(exp):
                    return
            parts.add_factor(e, exp)
            return
        c = parts.coef * v
        if not math.isfinite(c):
            raise _Bail
        parts.coef = c
        return
    if isinstance(e, Unary) and e.op == "neg":
        if isinstance(exp, Lit) and _is_int(exp.value):
            if int(exp.value) % 2 == 1:
                parts.coef = -parts.coef
            _flatten_mul(e.arg, parts, exp)
            return
        parts.add_factor(e, exp)
        return
    if isinstance(e, Binary):
        if e.op == "*":
            if one_exp or (isinstance(exp, Lit) and _is_int(exp.value)) or (
                is_positive(e.lhs) and is_positive(e.rhs)
            ):
                _flatten_mul(e.lhs, parts, exp)
                _flatten_mul(e.rhs, parts, exp)
                return
        elif e.op == "/":
            if one_exp or (isinstance(exp, Lit) and _is_int(exp.value)) or (
                is_positive(e.lhs) and is_positive(e.rhs)
            ):
                _flatten_mul(e.lhs, parts, exp)
                neg = _mul_exps(exp, Lit(-1.0))
                _flatten_mul(e.rhs, parts, neg)
                return
        elif e.op == "^":
            inner_base, inner_exp = e.lhs, e.rhs
            both_int = (
                isinstance(inner_exp, Lit)
                and _is_int(inner_exp.value)
                and isinstance(exp, Lit)
                and _is_int(exp.value)
            )
            if is_positive(inner_base) or both_int:
                _flatten_mul(inner_base, parts, _mul_exps(inner_exp, exp))
                return
    parts.add_factor(e, exp)


def _make_pow(base: Expr, exp: Expr) -> Expr:
    if exp == ONE:
        return base
    if isinstance(exp, Lit) and exp.value == 0.0:
        # only reachable for bases we could not certify total+positive
        return Binary("^", base, exp)
    return Binary("^", base, exp)


def _rebuild_mul(coef: float, factors: list[tuple[Expr, Expr]]) -> Expr:
    factors = [
        (b, x)
        for (b, x) in factors
        if not (isinstance(x, Lit) and x.value == 0.0 and is_positive(b) and is_total(b))
    ]
    factors.sort(key=lambda f: (node_key(f[0]), node_key(f[1])))
    if coef == 0.0:
        if all(is_total(_make_pow(b, x)) for b, x in factors):
            return ZERO
        rest = _rebuild_mul(1.0, factors)
        return Binary("*", ZERO, rest)

    num: list[Expr] = []
    den: list[Expr] = []
    for b, x in factors:
        if isinstance(x, Lit) and x.value < 0:
            den.append(_make_pow(b, Lit(-x.value)))
        else:
            num.append(_make_pow(b, x))

    def chain(items: list[Expr]) -> Expr:
        out = items[0]
        for it in items[1:]:
            out = Binary("*", out, it)
        return out

    negate = coef < 0
    mag = -coef if negate else coef
    if not num:
        numerator = Lit(mag)
    elif mag == 1.0:
        numerator = chain(num)
    else:
        numerator = chain([Lit(mag)] + num)
    result = numerator if not den else Binary("/", numerator, chain(den))
    if negate:
        if not num and not den:
            return Lit(coef)
        if mag == 1.0:
            return Unary("neg", result)
        # fold the sign into the leading literal
        if not num:
            numerator = Lit(-mag)
            return numerator if not den else Binary("/", numerator, chain(den))
        numerator = chain([Lit(-mag)] + num)
        return numerator if not den else Binary("/", numerator, chain(den))
    return result


def _canon_mul(e: Expr) -> Expr:
    parts = _MulParts()
    try:
        _flatten_mul(e, parts, ONE)
    except _Bail:
        return e
    return _rebuild_mul(parts.coef, parts.factors)


# ---------------------------------------------------------------------------
# sum flattening

def _flatten_add(e: Expr, sign: float, consts: list[float], terms: list) -> None:
    if isinstance(e, Lit):
        consts.append(sign * e.value)
        return
    if isinstance(e, Unary) and e.op == "neg":
        _flatten_add(e.arg, -sign, consts, terms)
        return
    if isinstance(e, Binary) and e.op == "+":
        _flatten_add(e.lhs, sign, consts, terms)
        _flatten_add(e.rhs, sign, consts, terms)
        return
    if isinstance(e, Binary) and e.op == "-":
        _flatten_add(e.lhs, sign, consts, terms)
        _flatten_add(e.rhs, -sign, consts, terms)
        return
    parts = _MulParts()
    try:
        _flatten_mul(e, parts, ONE)
    except _Bail:
        terms.append((sign, [(e, ONE)]))
        return
    if not parts.factors:
        consts.append(sign * parts.coef)
        return
    terms.append((sign * parts.coef, parts.factors))


def _canon_add(e: Expr) -> Expr:
    consts: list[float] = []
    raw_terms: list = []
    _flatten_add(e, 1.0, consts, raw_terms)
    const = math.fsum(consts)
    if not math.isfinite(const):
        return e

    merged: list[tuple[float, list, Expr]] = []  # (coef, factors, canonical core)
    for coef, factors in raw_terms:
        core = _rebuild_mul(1.0, list(factors))
        for i, (c0, f0, core0) in enumerate(merged):
            if core0 == core:
                merged[i] = (math.fsum([c0, coef]), f0, core0)
                break
        else:
            merged.append((coef, factors, core))

    kept: list[tuple[float, list, Expr]] = []
    for coef, factors, core in merged:
        if coef == 0.0 and is_total(core):
            continue
        if not math.isfinite(coef):
            return e
        kept.append((coef, factors, core))
    kept.sort(key=lambda t: node_key(t[2]))

    if not kept:
        return Lit(const)
    # rebuild as a +/- chain: positive coefficients join with "+", negative
    # with "-"; the leading term keeps its own sign inside the factor build
    items: list[tuple[float, Expr]] = []
    if const != 0.0:
        items.append((1.0, Lit(const)))
    for coef, factors, _core in kept:
        if coef < 0:
            items.append((-1.0, _rebuild_mul(-coef, list(factors))))
        else:
            items.append((1.0, _rebuild_mul(coef, list(factors))))
    head_sign, head = items[0]
    out: Expr
    if head_sign > 0:
        out = head
    elif isinstance(head, Lit):
        out = Lit(-head.value)
    else:
        out = _canon_mul(Unary("neg", head))
    for sgn, item in items[1:]:
        out = Binary("+" if sgn > 0 else "-", out, item)
    return out


# ---------------------------------------------------------------------------
# exact trig folding

def _half_pi_multiple(arg: Expr):
    """Return m with arg = m·(π/2) when that is literally visible, else None."""
    if arg == ZERO:
        return 0
    parts = _MulParts()
    try:
        _flatten_mul(arg, parts, ONE)
    except _Bail:
        return None
    if len(parts.factors) != 1:
        return None
    base, exp = parts.factors[0]
    if base != PI or exp != ONE:
        return None
    m = 2.0 * parts.coef
    if _is_int(m):
        return int(m)
    return None


_COS_TABLE = {0: 1.0, 1: 0.0, 2: -1.0, 3: 0.0}
_SIN_TABLE = {0: 0.0, 1: 1.0, 2: 0.0, 3: -1.0}


def _fold_unary(op: str, arg: Expr) -> Expr | None:
    if op in ("sin", "cos", "tan"):
        m = _half_pi_multiple(arg)
        if m is not None:
            if op == "sin":
                return Lit(_SIN_TABLE[m % 4])
            if op == "cos":
                return Lit(_COS_TABLE[m % 4])
            if m % 2 == 0:
                return Lit(0.0)  # tan(kπ) = 0
            return None  # tan at odd multiples of π/2 is undefined: keep the node
    if op == "arctan":
        if arg == ZERO:
            return ZERO
        if arg == ONE:
            return Binary("*", Lit(0.25), PI)
        if arg == Lit(-1.0):
            return Binary("*", Lit(-0.25), PI)
    if isinstance(arg, Lit):
        fn = {
            "sin": math.sin, "cos": math.cos, "tan": math.tan, "arctan": math.atan,
            "abs": abs, "ln": math.log,
        }.get(op)
        if fn is not None:
            if op == "ln" and arg.value <= 0:
                return None
            try:
                v = fn(arg.value)
            except (ValueError, OverflowError):
                return None
            if math.isfinite(v):
                return Lit(v)
    return None


# ---------------------------------------------------------------------------
# main pass

def _pass(e: Expr) -> Expr:
    if isinstance(e, (Lit, Const, Var)):
        return e
    if isinstance(e, Unary):
        arg = _pass(e.arg)
        if e.op == "neg":
            return _canon_add(Unary("neg", arg))
        if e.op == "sqrt":
            return _canon_mul(Binary("^", arg, Lit(0.5)))
        if e.op == "exp":
            return Binary("^", E, arg)
        if e.op == "abs":
            if isinstance(arg, Lit):
                return Lit(abs(arg.value))
            if is_nonneg(arg):
                return arg
            if isinstance(arg, Unary) and arg.op == "abs":
                return arg
        if e.op == "ln":
            if arg == E:
                return ONE
            if arg == ONE:
                return ZERO
            if isinstance(arg, Binary) and arg.op == "^" and arg.lhs == E:
                return arg.rhs
        folded = _fold_unary(e.op, arg)
        if folded is not None:
            return folded
        return Unary(e.op, arg)
    if isinstance(e, Binary):
        lhs = _pass(e.lhs)
        rhs = _pass(e.rhs)
        node = Binary(e.op, lhs, rhs)
        if e.op in ("+", "-"):
            return _canon_add(node)
        return _canon_mul(node)
    if isinstance(e, Piecewise):
        branches = tuple(
            Branch(_pass(b.lhs), b.rel, _pass(b.rhs), _pass(b.value)) for b in e.branches
        )
        default = None if e.default is None else _pass(e.default)
        return Piecewise(branches, default)
    raise TypeError(f"not an expression node: {e!r}")


def simplify(e: Expr) -> Expr:
    """Simplify to a canonical form.  Idempotent and value-preserving."""
    for _ in range(_MAX_PASSES):
        e2 = _pass(e)
        if e2 == e:
            return e
        e = e2
    return e
