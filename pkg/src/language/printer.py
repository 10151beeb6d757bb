from fractions import Fraction

from src.language.ast import (
    And,
    Assign,
    Bernoulli,
    BinOp,
    BoolConst,
    Call,
    Compare,
    Const,
    Expr,
    FunctionEntity,
    IfBool,
    IfStar,
    InfConst,
    Neg,
    Not,
    Or,
    Pred,
    Program,
    Skip,
    Stmt,
    Var,
    While,
    flatten,
)

INDENT = "  "

_EXPR_PRECEDENCE = {"+": 1, "-": 1, "*": 2, "//": 2, "/": 2, "^": 4}
_NEG_PRECEDENCE = 3
_ATOM_PRECEDENCE = 5


def format_number(value) -> str:
    """Exact decimal rendering of a rational with a terminating expansion, ``p/q`` otherwise."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    rest, twos, fives = value.denominator, 0, 0
    while rest % 2 == 0:
        rest, twos = rest // 2, twos + 1
    while rest % 5 == 0:
        rest, fives = rest // 5, fives + 1
    if rest != 1:
        return f"{value.numerator}/{value.denominator}"
    digits = max(twos, fives)
    scaled = (value * 10**digits).numerator
    sign = "-" if scaled < 0 else ""
    text = str(abs(scaled)).rjust(digits + 1, "0")
    return f"{sign}{text[:-digits]}.{text[-digits:]}"


def _expr_precedence(expr: Expr) -> int:
    if isinstance(expr, BinOp):
        return _EXPR_PRECEDENCE[expr.op]
    if isinstance(expr, Neg):
        return _NEG_PRECEDENCE
    return _ATOM_PRECEDENCE


def format_expr(expr: Expr) -> str:
    if isinstance(expr, Const):
        return format_number(expr.value)
    if isinstance(expr, InfConst):
        return "inf"
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, Bernoulli):
        return f"Bernoulli({format_number(expr.p)})"
    if isinstance(expr, Neg):
        inner = format_expr(expr.operand)
        if _expr_precedence(expr.operand) < _NEG_PRECEDENCE:
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(expr, BinOp):
        prec = _EXPR_PRECEDENCE[expr.op]
        left, right = format_expr(expr.left), format_expr(expr.right)
        right_assoc = expr.op == "^"
        if _expr_precedence(expr.left) < prec or (right_assoc and _expr_precedence(expr.left) == prec):
            left = f"({left})"
        if _expr_precedence(expr.right) < prec or (not right_assoc and _expr_precedence(expr.right) == prec):
            right = f"({right})"
        return f"{left} {expr.op} {right}"
    raise TypeError(f"not an expression: {expr!r}")


def _pred_precedence(pred: Pred) -> int:
    if isinstance(pred, Or):
        return 1
    if isinstance(pred, And):
        return 2
    if isinstance(pred, Not):
        return 3
    return 4


def format_pred(pred: Pred) -> str:
    if isinstance(pred, BoolConst):
        return "true" if pred.value else "false"
    if isinstance(pred, Compare):
        return f"{format_expr(pred.left)} {pred.op} {format_expr(pred.right)}"
    if isinstance(pred, Not):
        inner = format_pred(pred.operand)
        if not isinstance(pred.operand, BoolConst):
            inner = f"({inner})"
        return f"not {inner}"
    if isinstance(pred, (And, Or)):
        prec = _pred_precedence(pred)
        word = "and" if isinstance(pred, And) else "or"
        left, right = format_pred(pred.left), format_pred(pred.right)
        if _pred_precedence(pred.left) < prec:
            left = f"({left})"
        if _pred_precedence(pred.right) <= prec:
            right = f"({right})"
        return f"{left} {word} {right}"
    raise TypeError(f"not a predicate: {pred!r}")


def _prefix(stmt: Stmt, show_labels: bool) -> str:
    return f"{stmt.label}: " if show_labels and stmt.label is not None else ""


def _format_block(stmt: Stmt, depth: int, show_labels: bool) -> list[str]:
    parts = [_format_stmt(s, depth, show_labels) for s in flatten(stmt)]
    lines: list[str] = []
    for i, part in enumerate(parts):
        if i < len(parts) - 1:
            part = part[:-1] + [part[-1] + ";"]
        lines.extend(part)
    return lines


def _format_stmt(stmt: Stmt, depth: int, show_labels: bool) -> list[str]:
    pad = INDENT * depth
    head = pad + _prefix(stmt, show_labels)
    if isinstance(stmt, Skip):
        return [head + "skip"]
    if isinstance(stmt, Assign):
        return [f"{head}{stmt.var} := {format_expr(stmt.expr)}"]
    if isinstance(stmt, Call):
        return [f"{head}{stmt.callee}({', '.join(format_expr(a) for a in stmt.args)})"]
    if isinstance(stmt, (IfBool, IfStar)):
        cond = "star" if isinstance(stmt, IfStar) else format_pred(stmt.cond)
        return (
            [f"{head}if {cond} then"]
            + _format_block(stmt.then, depth + 1, show_labels)
            + [pad + "else"]
            + _format_block(stmt.orelse, depth + 1, show_labels)
            + [pad + "fi"]
        )
    if isinstance(stmt, While):
        return (
            [f"{head}while {format_pred(stmt.cond)} do"]
            + _format_block(stmt.body, depth + 1, show_labels)
            + [pad + "od"]
        )
    raise TypeError(f"not a statement: {stmt!r}")


def format_function(fn: FunctionEntity, show_labels: bool = True) -> str:
    lines = [f"{fn.name}({', '.join(fn.params)}) {{"]
    lines.extend(_format_block(fn.body, 1, show_labels))
    if show_labels and fn.terminal_label is not None:
        lines.append(f"{INDENT}{fn.terminal_label}:")
    lines.append("}")
    return "\n".join(lines)


def pretty_print(prog: Program, show_labels: bool = True) -> str:
    """
    Render a program in concrete syntax that parses back to the same tree.

    :param prog: labelled or unlabelled program
    :param show_labels: emit ``N:`` prefixes for labels that are present
    :return: source text ending with a newline
    """
    chunks = []
    if prog.sampling:
        chunks.append(f"sample {', '.join(prog.sampling)};")
    chunks.extend(format_function(fn, show_labels) for fn in prog.functions)
    return "\n\n".join(chunks) + "\n"
