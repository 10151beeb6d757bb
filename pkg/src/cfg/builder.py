import logging

from src.cfg.graph import Cfg, CallSpec, FunctionCfg, Guard, Star, Transition, Update
from src.language.ast import (
    Assign,
    Call,
    FunctionEntity,
    IfBool,
    IfStar,
    Not,
    Program,
    Seq,
    Skip,
    Stmt,
    While,
    iter_statements,
    program_variables,
)
from src.language.labeller import is_labelled, label
from src.models import Branch, LabelKind

logger = logging.getLogger(__name__)

_KINDS = {
    Skip: LabelKind.ASSIGNMENT,
    Assign: LabelKind.ASSIGNMENT,
    Call: LabelKind.CALL,
    IfBool: LabelKind.BRANCHING,
    While: LabelKind.BRANCHING,
    IfStar: LabelKind.NONDETERMINISTIC,
}


def build_cfg(prog: Program) -> Cfg:
    """
    Lower a program to its control-flow graph.

    Statements are lowered against the label that follows them, so sequencing,
    branching and loops identify entry and exit labels without fresh labels.

    :param prog: program, labelled on the fly when labels are missing
    :return: Cfg
    """
    if not is_labelled(prog):
        prog = label(prog)
    sampling = prog.sampling_variables
    signatures = {fn.name: (fn.params, program_variables(fn, sampling)) for fn in prog.functions}
    functions = {fn.name: _build_function(fn, signatures) for fn in prog.functions}
    logger.debug("built cfg with %d functions and %d labels", len(functions), sum(len(f.kinds) for f in functions.values()))
    return Cfg(functions, tuple(sampling))


def _build_function(fn: FunctionEntity, signatures) -> FunctionCfg:
    kinds = {stmt.label: _KINDS[type(stmt)] for stmt in iter_statements(fn.body)}
    kinds[fn.terminal_label] = LabelKind.TERMINAL
    transitions: list[Transition] = []
    entry = _lower(fn.body, fn.terminal_label, transitions, signatures)
    params, variables = signatures[fn.name]
    return FunctionCfg(
        name=fn.name,
        params=params,
        variables=variables,
        entry=entry,
        terminal=fn.terminal_label,
        kinds=kinds,
        transitions=tuple(transitions),
    )


def _lower(stmt: Stmt, follow: int, out: list[Transition], signatures) -> int:
    if isinstance(stmt, Seq):
        middle = _lower(stmt.second, follow, out, signatures)
        return _lower(stmt.first, middle, out, signatures)
    here = stmt.label
    if isinstance(stmt, Skip):
        out.append(Transition(here, Update(), follow))
    elif isinstance(stmt, Assign):
        out.append(Transition(here, Update(stmt.var, stmt.expr), follow))
    elif isinstance(stmt, Call):
        params, variables = signatures[stmt.callee]
        out.append(Transition(here, CallSpec(stmt.callee, stmt.args, params, variables), follow))
    elif isinstance(stmt, IfBool):
        then_entry = _lower(stmt.then, follow, out, signatures)
        else_entry = _lower(stmt.orelse, follow, out, signatures)
        out.append(Transition(here, Guard(stmt.cond), then_entry))
        out.append(Transition(here, Guard(Not(stmt.cond)), else_entry))
    elif isinstance(stmt, IfStar):
        then_entry = _lower(stmt.then, follow, out, signatures)
        else_entry = _lower(stmt.orelse, follow, out, signatures)
        out.append(Transition(here, Star(Branch.THEN), then_entry))
        out.append(Transition(here, Star(Branch.ELSE), else_entry))
    elif isinstance(stmt, While):
        body_entry = _lower(stmt.body, here, out, signatures)
        out.append(Transition(here, Guard(stmt.cond), body_entry))
        out.append(Transition(here, Guard(Not(stmt.cond)), follow))
    else:
        raise TypeError(f"not a statement: {stmt!r}")
    return here


def dump_cfg(cfg: Cfg) -> str:
    """
    Deterministic edge list, one ``f: (source, payload, target)`` line per transition.

    Functions are sorted by name and labels ascending; the two edges of a label keep
    their true/then-first order.
    """
    lines = []
    for name in cfg.function_names:
        fn = cfg[name]
        for source in fn.labels:
            for transition in fn.outgoing(source):
                lines.append(f"{name}: {transition.describe()}")
    return "\n".join(lines) + "\n"
