import itertools
from dataclasses import replace

from src.language.ast import FunctionEntity, IfBool, IfStar, Program, Seq, Stmt, While, iter_statements


def label(prog: Program) -> Program:
    """
    Number statements depth-first in source order, from 1 in each function, terminal label last.

    :param prog: parsed program, labels present in the source are overwritten
    :return: labelled Program
    """
    return replace(prog, functions=tuple(_label_function(fn) for fn in prog.functions))


def _label_function(fn: FunctionEntity) -> FunctionEntity:
    counter = itertools.count(1)
    body = _label_stmt(fn.body, counter)
    return replace(fn, body=body, terminal_label=next(counter))


def _label_stmt(stmt: Stmt, counter) -> Stmt:
    if isinstance(stmt, Seq):
        first = _label_stmt(stmt.first, counter)
        return Seq(first, _label_stmt(stmt.second, counter))
    own = next(counter)
    if isinstance(stmt, (IfBool, IfStar)):
        then = _label_stmt(stmt.then, counter)
        return replace(stmt, label=own, then=then, orelse=_label_stmt(stmt.orelse, counter))
    if isinstance(stmt, While):
        return replace(stmt, label=own, body=_label_stmt(stmt.body, counter))
    return replace(stmt, label=own)


def function_labels(fn: FunctionEntity) -> list[int | None]:
    return [stmt.label for stmt in iter_statements(fn.body)] + [fn.terminal_label]


def is_labelled(prog: Program) -> bool:
    """True when every statement and terminal carries a label and labels are distinct per function."""
    for fn in prog.functions:
        labels = function_labels(fn)
        if None in labels or len(set(labels)) != len(labels):
            return False
    return True
