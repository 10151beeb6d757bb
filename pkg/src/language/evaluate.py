"""Compile expressions and predicates to closures over a variable environment."""
import operator
from fractions import Fraction
from typing import Callable, Mapping

from src.core.extreal import INF, ExtReal
from src.errors import EvaluationError
from src.language.ast import (
    And,
    Bernoulli,
    BinOp,
    BoolConst,
    Compare,
    Const,
    Expr,
    InfConst,
    Neg,
    Not,
    Or,
    Pred,
    Var,
)

Env = Mapping[str, int]

_COMPARISONS = {
    "<": operator.lt,
    "<=": operator.le,
    ">": operator.gt,
    ">=": operator.ge,
    "=": operator.eq,
    "!=": operator.ne,
}


def _power(base, exponent):
    if isinstance(exponent, Fraction):
        if exponent.denominator != 1:
            raise EvaluationError(f"exponent {exponent} is not an integer")
        exponent = exponent.numerator
    if exponent < 0:
        raise EvaluationError(f"negative exponent {exponent}")
    return base**exponent


def _floordiv(left, right):
    if right <= 0:
        raise EvaluationError(f"floor division by non-positive {right}")
    result = left // right
    return result if isinstance(result, int) else Fraction(result)


def _truediv(left, right):
    if right <= 0:
        raise EvaluationError(f"division by non-positive {right}")
    return Fraction(left) / right


_ARITHMETIC = {
    "+": operator.add,
    "-": operator.sub,
    "*": operator.mul,
    "//": _floordiv,
    "/": _truediv,
    "^": _power,
}


def compile_expr(expr: Expr) -> Callable[[Env], int | Fraction]:
    """
    Compile an arithmetic expression to a function of the environment.

    :param expr: expression without ``inf``
    :return: callable returning an int (or Fraction for rational constants)
    """
    if isinstance(expr, Const):
        value = expr.value
        return lambda env: value
    if isinstance(expr, Var):
        name = expr.name
        return lambda env: env[name]
    if isinstance(expr, Bernoulli):
        name = expr.var
        return lambda env: env[name]
    if isinstance(expr, Neg):
        inner = compile_expr(expr.operand)
        return lambda env: -inner(env)
    if isinstance(expr, BinOp):
        left, right = compile_expr(expr.left), compile_expr(expr.right)
        fn = _ARITHMETIC[expr.op]
        return lambda env: fn(left(env), right(env))
    if isinstance(expr, InfConst):
        raise EvaluationError("inf is only allowed in certificate expressions")
    raise TypeError(f"not an expression: {expr!r}")


def compile_pred(pred: Pred) -> Callable[[Env], bool]:
    if isinstance(pred, BoolConst):
        value = pred.value
        return lambda env: value
    if isinstance(pred, Compare):
        left, right = compile_expr(pred.left), compile_expr(pred.right)
        cmp = _COMPARISONS[pred.op]
        return lambda env: cmp(left(env), right(env))
    if isinstance(pred, And):
        left, right = compile_pred(pred.left), compile_pred(pred.right)
        return lambda env: left(env) and right(env)
    if isinstance(pred, Or):
        left, right = compile_pred(pred.left), compile_pred(pred.right)
        return lambda env: left(env) or right(env)
    if isinstance(pred, Not):
        inner = compile_pred(pred.operand)
        return lambda env: not inner(env)
    raise TypeError(f"not a predicate: {pred!r}")


def contains_inf(expr: Expr) -> bool:
    if isinstance(expr, InfConst):
        return True
    if isinstance(expr, Neg):
        return contains_inf(expr.operand)
    if isinstance(expr, BinOp):
        return contains_inf(expr.left) or contains_inf(expr.right)
    return False


def _ext_power(base: ExtReal, exponent: ExtReal) -> ExtReal:
    if exponent.is_infinite:
        raise EvaluationError("infinite exponent")
    k = exponent.fraction
    if k.denominator != 1 or k < 0:
        raise EvaluationError(f"exponent {k} is not a nonnegative integer")
    if base.is_infinite:
        return INF if k > 0 else ExtReal(1)
    return ExtReal(base.fraction ** k.numerator)


def _ext_floordiv(left: ExtReal, right: ExtReal) -> ExtReal:
    if right.is_infinite or right.fraction <= 0:
        raise EvaluationError("floor division by a non-positive or infinite value")
    if left.is_infinite:
        return INF
    return ExtReal(left.fraction // right.fraction)


_EXT_ARITHMETIC = {
    "+": operator.add,
    "-": operator.sub,
    "*": operator.mul,
    "/": operator.truediv,
    "//": _ext_floordiv,
    "^": _ext_power,
}


def compile_ext(expr: Expr) -> Callable[[Env], ExtReal]:
    """Compile a certificate expression, which may mention ``inf``, to an ExtReal-valued function."""
    if not contains_inf(expr):
        finite = compile_expr(expr)
        return lambda env: ExtReal(finite(env))
    if isinstance(expr, InfConst):
        return lambda env: INF
    if isinstance(expr, Neg):
        inner = compile_ext(expr.operand)
        return lambda env: -inner(env)
    if isinstance(expr, BinOp):
        left, right = compile_ext(expr.left), compile_ext(expr.right)
        fn = _EXT_ARITHMETIC[expr.op]
        return lambda env: fn(left(env), right(env))
    raise TypeError(f"not a certificate expression: {expr!r}")
