"""Attribute expressions and rule conditions.

Attributes are signed 64-bit integers.  Arithmetic wraps on overflow,
division truncates toward zero (C style) and ``mod`` is the matching
remainder, so ``(a / b) * b + (a mod b) == a`` whenever ``b != 0``.
Comparisons and the boolean connectives produce 1 or 0; any non-zero value
counts as true.  ``and``/``or`` short-circuit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Union

INT_MIN = -(1 << 63)
INT_MAX = (1 << 63) - 1


class EvalError(Exception):
    """Raised when an expression cannot be evaluated."""


class UnboundVariable(EvalError):
    pass


class DivisionByZero(EvalError):
    pass


def wrap(value: int) -> int:
    """Reduce an arbitrary Python int to the signed 64-bit range."""
    return ((value - INT_MIN) & 0xFFFFFFFFFFFFFFFF) + INT_MIN


def tdiv(a: int, b: int) -> int:
    if b == 0:
        raise DivisionByZero(f"division by zero: {a} / 0")
    q = abs(a) // abs(b)
    return wrap(q if (a < 0) == (b < 0) else -q)


def tmod(a: int, b: int) -> int:
    if b == 0:
        raise DivisionByZero(f"division by zero: {a} mod 0")
    r = abs(a) % abs(b)
    return r if a >= 0 else -r


def is_true(value: int) -> bool:
    return value != 0


# --------------------------------------------------------------------------
# expression trees


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return format_expr(self)


@dataclass(frozen=True)
class Lit:
    value: int

    def __str__(self) -> str:
        return format_expr(self)


@dataclass(frozen=True)
class Neg:
    operand: "AttrExpr"

    def __str__(self) -> str:
        return format_expr(self)


@dataclass(frozen=True)
class Not:
    operand: "AttrExpr"

    def __str__(self) -> str:
        return format_expr(self)


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "AttrExpr"
    right: "AttrExpr"

    def __post_init__(self):
        if self.op not in BINARY_OPS:
            raise ValueError(f"unknown operator {self.op!r}")

    def __str__(self) -> str:
        return format_expr(self)


AttrExpr = Union[Var, Lit, Neg, Not, BinOp]

# binding strength, higher binds tighter
PRECEDENCE = {
    "or": 1,
    "and": 2,
    "==": 3, "!=": 3, "<": 3, "<=": 3, ">": 3, ">=": 3,
    "+": 4, "-": 4,
    "*": 5, "/": 5, "mod": 5,
}
UNARY_PRECEDENCE = 6
BINARY_OPS = frozenset(PRECEDENCE)

_ARITH: dict[str, Callable[[int, int], int]] = {
    "+": lambda a, b: wrap(a + b),
    "-": lambda a, b: wrap(a - b),
    "*": lambda a, b: wrap(a * b),
    "/": tdiv,
    "mod": tmod,
    "==": lambda a, b: int(a == b),
    "!=": lambda a, b: int(a != b),
    "<": lambda a, b: int(a < b),
    "<=": lambda a, b: int(a <= b),
    ">": lambda a, b: int(a > b),
    ">=": lambda a, b: int(a >= b),
}


def eval_expr(e: AttrExpr, env: Mapping[str, int]) -> int:
    if isinstance(e, Lit):
        return e.value
    if isinstance(e, Var):
        try:
            return env[e.name]
        except KeyError:
            raise UnboundVariable(f"unbound attribute variable {e.name!r}") from None
    if isinstance(e, Neg):
        return wrap(-eval_expr(e.operand, env))
    if isinstance(e, Not):
        return int(not is_true(eval_expr(e.operand, env)))
    if e.op == "and":
        return int(is_true(eval_expr(e.left, env)) and is_true(eval_expr(e.right, env)))
    if e.op == "or":
        return int(is_true(eval_expr(e.left, env)) or is_true(eval_expr(e.right, env)))
    return _ARITH[e.op](eval_expr(e.left, env), eval_expr(e.right, env))


def compile_expr(e: AttrExpr) -> Callable[[Mapping[str, int]], int]:
    """Turn an expression into a closure; same semantics as :func:`eval_expr`."""
    if isinstance(e, Lit):
        v = e.value
        return lambda env: v
    if isinstance(e, Var):
        name = e.name

        def var(env):
            try:
                return env[name]
            except KeyError:
                raise UnboundVariable(f"unbound attribute variable {name!r}") from None
        return var
    if isinstance(e, Neg):
        f = compile_expr(e.operand)
        return lambda env: wrap(-f(env))
    if isinstance(e, Not):
        f = compile_expr(e.operand)
        return lambda env: int(f(env) == 0)
    lf, rf = compile_expr(e.left), compile_expr(e.right)
    if e.op == "and":
        return lambda env: int(lf(env) != 0 and rf(env) != 0)
    if e.op == "or":
        return lambda env: int(lf(env) != 0 or rf(env) != 0)
    op = _ARITH[e.op]
    return lambda env: op(lf(env), rf(env))


def free_vars(e: AttrExpr) -> frozenset[str]:
    if isinstance(e, Var):
        return frozenset([e.name])
    if isinstance(e, Lit):
        return frozenset()
    if isinstance(e, (Neg, Not)):
        return free_vars(e.operand)
    return free_vars(e.left) | free_vars(e.right)


def rename(e: AttrExpr, mapping: Mapping[str, str]) -> AttrExpr:
    if isinstance(e, Var):
        return Var(mapping.get(e.name, e.name))
    if isinstance(e, Lit):
        return e
    if isinstance(e, Neg):
        return Neg(rename(e.operand, mapping))
    if isinstance(e, Not):
        return Not(rename(e.operand, mapping))
    return BinOp(e.op, rename(e.left, mapping), rename(e.right, mapping))


def format_expr(e: AttrExpr, context: int = 0) -> str:
    """Render with the minimum parentheses needed to parse back to ``e``."""
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Lit):
        return str(e.value)
    if isinstance(e, Not):
        return f"not({format_expr(e.operand)})"
    if isinstance(e, Neg):
        inner = e.operand
        if isinstance(inner, (Var, Not)):
            return f"-{format_expr(inner)}"
        return f"-({format_expr(inner)})"
    prec = PRECEDENCE[e.op]
    text = f"{format_expr(e.left, prec)} {e.op} {format_expr(e.right, prec + 1)}"
    return f"({text})" if prec < context else text


# --------------------------------------------------------------------------
# conditions


class _TrueCond:
    """The trivially satisfied condition ``true``."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "TRUE"

    def __str__(self) -> str:
        return "true"

    def __reduce__(self):
        return (_TrueCond, ())


TRUE = _TrueCond()


@dataclass(frozen=True)
class Otherwise:
    """``otherwise``: holds when none of the earlier sibling guards holds.

    ``prior`` lists those sibling guards.  A bare ``Otherwise()`` is what the
    parser produces before the guard group is desugared.
    """

    prior: tuple = ()

    def __str__(self) -> str:
        return "otherwise"


Condition = Union[_TrueCond, Otherwise, Var, Lit, Neg, Not, BinOp]


def any_of(exprs) -> AttrExpr:
    """Left-nested ``or`` chain of one or more expressions."""
    exprs = list(exprs)
    out = exprs[0]
    for e in exprs[1:]:
        out = BinOp("or", out, e)
    return out


def semantic(cond: Condition) -> AttrExpr:
    """The plain expression a condition stands for."""
    if cond is TRUE:
        return Lit(1)
    if isinstance(cond, Otherwise):
        if not cond.prior:
            return Lit(1)
        return Not(any_of(semantic(c) for c in cond.prior))
    return cond


def condition_vars(cond: Condition) -> frozenset[str]:
    if cond is TRUE:
        return frozenset()
    if isinstance(cond, Otherwise):
        out = frozenset()
        for c in cond.prior:
            out |= condition_vars(c)
        return out
    return free_vars(cond)


def rename_condition(cond: Condition, mapping: Mapping[str, str]) -> Condition:
    if cond is TRUE:
        return cond
    if isinstance(cond, Otherwise):
        return Otherwise(tuple(rename_condition(c, mapping) for c in cond.prior))
    return rename(cond, mapping)


def holds(cond: Condition, env: Mapping[str, int]) -> bool:
    return is_true(eval_expr(semantic(cond), env))


def compile_condition(cond: Condition) -> Callable[[Mapping[str, int]], bool] | None:
    """Closure testing the condition, or None when it is always true."""
    if cond is TRUE or (isinstance(cond, Otherwise) and not cond.prior):
        return None
    f = compile_expr(semantic(cond))
    return lambda env: f(env) != 0


def format_condition(cond: Condition) -> str:
    if cond is TRUE:
        return "true"
    if isinstance(cond, Otherwise):
        return "otherwise"
    return format_expr(cond)
