"""Immutable syntax trees for programs and certificate expressions."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Union


# Expressions


@dataclass(frozen=True)
class Const:
    value: Union[int, Fraction]


@dataclass(frozen=True)
class InfConst:
    pass


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Bernoulli:
    """Draw from an intrinsic sampling variable with law {0: 1-p, 1: p}."""

    var: str
    p: Fraction


Expr = Union[Const, InfConst, Var, Neg, BinOp, Bernoulli]


# Predicates


@dataclass(frozen=True)
class BoolConst:
    value: bool


@dataclass(frozen=True)
class Compare:
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class And:
    left: "Pred"
    right: "Pred"


@dataclass(frozen=True)
class Or:
    left: "Pred"
    right: "Pred"


@dataclass(frozen=True)
class Not:
    operand: "Pred"


Pred = Union[BoolConst, Compare, And, Or, Not]


# Statements


@dataclass(frozen=True)
class Skip:
    label: int | None = None


@dataclass(frozen=True)
class Assign:
    var: str
    expr: Expr
    label: int | None = None


@dataclass(frozen=True)
class IfBool:
    cond: Pred
    then: "Stmt"
    orelse: "Stmt"
    label: int | None = None


@dataclass(frozen=True)
class IfStar:
    then: "Stmt"
    orelse: "Stmt"
    label: int | None = None


@dataclass(frozen=True)
class While:
    cond: Pred
    body: "Stmt"
    label: int | None = None


@dataclass(frozen=True)
class Call:
    callee: str
    args: tuple[Expr, ...]
    label: int | None = None


@dataclass(frozen=True)
class Seq:
    first: "Stmt"
    second: "Stmt"


Stmt = Union[Skip, Assign, IfBool, IfStar, While, Call, Seq]


@dataclass(frozen=True)
class FunctionEntity:
    name: str
    params: tuple[str, ...]
    body: Stmt
    terminal_label: int | None = None


@dataclass(frozen=True)
class Program:
    functions: tuple[FunctionEntity, ...]
    sampling: tuple[str, ...] = ()

    def function(self, name: str) -> FunctionEntity:
        for fn in self.functions:
            if fn.name == name:
                return fn
        raise KeyError(name)

    @property
    def function_names(self) -> tuple[str, ...]:
        return tuple(fn.name for fn in self.functions)

    def bernoulli_variables(self) -> dict[str, Fraction]:
        """Intrinsic sampling variables introduced by ``Bernoulli(p)``, with their parameter."""
        found = {}
        for fn in self.functions:
            for stmt in iter_statements(fn.body):
                if isinstance(stmt, Assign) and isinstance(stmt.expr, Bernoulli):
                    found[stmt.expr.var] = stmt.expr.p
        return found

    @property
    def sampling_variables(self) -> tuple[str, ...]:
        return tuple(self.sampling) + tuple(self.bernoulli_variables())


def seq(statements: list[Stmt]) -> Stmt:
    """Right-nested sequence of one or more statements."""
    result = statements[-1]
    for stmt in reversed(statements[:-1]):
        result = Seq(stmt, result)
    return result


def flatten(stmt: Stmt) -> list[Stmt]:
    if isinstance(stmt, Seq):
        return flatten(stmt.first) + flatten(stmt.second)
    return [stmt]


def iter_statements(stmt: Stmt) -> Iterator[Stmt]:
    """Non-sequence statements in depth-first source order."""
    if isinstance(stmt, Seq):
        yield from iter_statements(stmt.first)
        yield from iter_statements(stmt.second)
        return
    yield stmt
    if isinstance(stmt, (IfBool, IfStar)):
        yield from iter_statements(stmt.then)
        yield from iter_statements(stmt.orelse)
    elif isinstance(stmt, While):
        yield from iter_statements(stmt.body)


def expr_variables(expr: Expr) -> Iterator[str]:
    if isinstance(expr, Var):
        yield expr.name
    elif isinstance(expr, Bernoulli):
        yield expr.var
    elif isinstance(expr, Neg):
        yield from expr_variables(expr.operand)
    elif isinstance(expr, BinOp):
        yield from expr_variables(expr.left)
        yield from expr_variables(expr.right)


def pred_variables(pred: Pred) -> Iterator[str]:
    if isinstance(pred, Compare):
        yield from expr_variables(pred.left)
        yield from expr_variables(pred.right)
    elif isinstance(pred, (And, Or)):
        yield from pred_variables(pred.left)
        yield from pred_variables(pred.right)
    elif isinstance(pred, Not):
        yield from pred_variables(pred.operand)


def program_variables(fn: FunctionEntity, sampling: tuple[str, ...] | frozenset[str] = ()) -> tuple[str, ...]:
    """
    pvars(f): parameters in declaration order followed by the remaining program variables, sorted.

    :param fn: function entity
    :param sampling: names that are sampling variables and must be excluded
    :return: tuple of variable names
    """
    sampling = set(sampling)
    seen = set(fn.params)
    locals_ = set()
    for stmt in iter_statements(fn.body):
        names: list[str] = []
        if isinstance(stmt, Assign):
            names.append(stmt.var)
            names.extend(expr_variables(stmt.expr))
        elif isinstance(stmt, (IfBool, While)):
            names.extend(pred_variables(stmt.cond))
        elif isinstance(stmt, Call):
            for arg in stmt.args:
                names.extend(expr_variables(arg))
        for name in names:
            if name not in seen and name not in sampling and not _is_bernoulli_name(name, stmt):
                locals_.add(name)
    return tuple(fn.params) + tuple(sorted(locals_))


def _is_bernoulli_name(name: str, stmt: Stmt) -> bool:
    return isinstance(stmt, Assign) and isinstance(stmt.expr, Bernoulli) and stmt.expr.var == name
