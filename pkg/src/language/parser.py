"""
pyparsing grammars for program sources, certificate expressions and distribution files.
"""
import math
from dataclasses import replace
from fractions import Fraction
from functools import cache

import pyparsing as pp

from src.core.distributions import DiscreteDist, SamplingFunction
from src.errors import (
    ArityError,
    DistributionError,
    DuplicateFunctionError,
    DuplicateParameterError,
    ParseError,
    ReusedSamplingVariableError,
    SamplingVariableMisuseError,
    UndeclaredCalleeError,
)
from src.language.ast import (
    And,
    Assign,
    Bernoulli,
    BinOp,
    BoolConst,
    Call,
    Compare,
    Const,
    FunctionEntity,
    IfBool,
    IfStar,
    InfConst,
    Neg,
    Not,
    Or,
    Program,
    Seq,
    Skip,
    Stmt,
    Var,
    While,
    expr_variables,
    iter_statements,
    pred_variables,
    seq,
)
from src.settings.constants import BERNOULLI_PREFIX

pp.ParserElement.enable_packrat()

KEYWORDS = (
    "if", "then", "else", "fi", "while", "do", "od", "skip", "star",
    "sample", "and", "or", "not", "true", "false", "inf", "Bernoulli",
)

LPAR, RPAR, LBRACE, RBRACE, SEMI, COLON = map(pp.Suppress, "(){};:")
ASSIGN = pp.Suppress(":=")
_ANY_KEYWORD = pp.MatchFirst([pp.Keyword(word) for word in KEYWORDS])
IDENTIFIER = (~_ANY_KEYWORD + pp.Word(pp.alphas, pp.alphanums + "_")).set_name("identifier")

_UNICODE_OPS = {"≤": "<=", "≥": ">=", "≠": "!="}
_MIRRORED = {"<": ">", "<=": ">=", ">": "<", ">=": "<=", "=": "=", "!=": "!="}


def _kw(word: str) -> pp.Keyword:
    return pp.Keyword(word)


def _integer() -> pp.ParserElement:
    return pp.Regex(r"\d+").set_name("integer").set_parse_action(lambda t: int(t[0]))


def _decimal() -> pp.ParserElement:
    return pp.Regex(r"\d+\.\d+").set_name("decimal").set_parse_action(lambda t: Fraction(t[0]))


def int_const(value: int):
    """Integer literal node; negative values become a negated literal so printing round-trips."""
    return Const(value) if value >= 0 else Neg(Const(-value))


def _fold_left(tokens):
    items = tokens[0]
    result = items[0]
    for i in range(1, len(items), 2):
        result = BinOp(items[i], result, items[i + 1])
    return result


def _fold_right(tokens):
    items = tokens[0]
    result = items[-1]
    for i in range(len(items) - 2, 0, -2):
        result = BinOp(items[i], items[i - 1], result)
    return result


def _negate(tokens):
    items = tokens[0]
    result = items[-1]
    for _ in items[:-1]:
        result = Neg(result)
    return result


def _check_floordiv(s, loc, tokens):
    items = tokens[0]
    for i in range(1, len(items), 2):
        if items[i] == "//":
            divisor = items[i + 1]
            if not (isinstance(divisor, Const) and divisor.value > 0 and Fraction(divisor.value).denominator == 1):
                raise pp.ParseFatalException(s, loc, "floor division requires a positive integer constant divisor")
    return _fold_left(tokens)


@cache
def expression_grammar(certificate: bool = False) -> pp.ParserElement:
    """
    Arithmetic expressions; ``certificate`` additionally enables decimals, ``/`` and ``inf``.

    :param certificate: build the certificate dialect
    :return: ParserElement producing an Expr node
    """
    number = (_decimal() | _integer()) if certificate else _integer()
    operand = number.add_parse_action(lambda t: Const(t[0])) | IDENTIFIER.copy().set_parse_action(lambda t: Var(t[0]))
    if certificate:
        operand = _kw("inf").set_parse_action(lambda: InfConst()) | operand
    mult_op = pp.one_of("* // /") if certificate else pp.one_of("* //")
    return pp.infix_notation(
        operand,
        [
            (pp.Literal("^"), 2, pp.OpAssoc.RIGHT, _fold_right),
            (pp.Literal("-"), 1, pp.OpAssoc.RIGHT, _negate),
            (mult_op, 2, pp.OpAssoc.LEFT, _check_floordiv),
            (pp.one_of("+ -"), 2, pp.OpAssoc.LEFT, _fold_left),
        ],
    ).set_name("expression")


def _normalize_comparison(left, op, q: Fraction):
    """Rewrite ``e op q`` with integer-valued ``e`` and rational ``q`` into an integer comparison."""
    if q.denominator == 1:
        return Compare(op, left, int_const(q.numerator))
    if op in ("<", "<="):
        return Compare("<=", left, int_const(math.floor(q)))
    if op in (">", ">="):
        return Compare(">=", left, int_const(math.ceil(q)))
    return BoolConst(op == "!=")


def _signed_decimal() -> pp.ParserElement:
    return pp.Regex(r"-?\d+\.\d+").set_parse_action(lambda t: Fraction(t[0]))


@cache
def predicate_grammar(certificate: bool = False) -> pp.ParserElement:
    expr = expression_grammar(certificate)
    cmp_op = pp.one_of("<= >= != < > = ≤ ≥ ≠").set_parse_action(lambda t: _UNICODE_OPS.get(t[0], t[0]))
    comparison = (expr + cmp_op + expr).set_parse_action(lambda t: Compare(t[1], t[0], t[2]))
    if not certificate:
        right_decimal = (expr + cmp_op + _signed_decimal()).set_parse_action(
            lambda t: _normalize_comparison(t[0], t[1], t[2])
        )
        left_decimal = (_signed_decimal() + cmp_op + expr).set_parse_action(
            lambda t: _normalize_comparison(t[2], _MIRRORED[t[1]], t[0])
        )
        comparison = left_decimal | right_decimal | comparison
    atom = (
        _kw("true").set_parse_action(lambda: BoolConst(True))
        | _kw("false").set_parse_action(lambda: BoolConst(False))
        | comparison
    )
    return pp.infix_notation(
        atom,
        [
            (_kw("not"), 1, pp.OpAssoc.RIGHT, lambda t: _wrap_not(t[0])),
            (_kw("and"), 2, pp.OpAssoc.LEFT, lambda t: _fold_bool(t[0], And)),
            (_kw("or"), 2, pp.OpAssoc.LEFT, lambda t: _fold_bool(t[0], Or)),
        ],
    ).set_name("predicate")


def _wrap_not(items):
    result = items[-1]
    for _ in items[:-1]:
        result = Not(result)
    return result


def _fold_bool(items, node):
    result = items[0]
    for i in range(2, len(items), 2):
        result = node(result, items[i])
    return result


def _attach_label(tokens):
    if len(tokens) == 2:
        return replace(tokens[1], label=tokens[0])
    return tokens[0]


@cache
def program_grammar() -> pp.ParserElement:
    expr = expression_grammar()
    pred = predicate_grammar()
    stmt = pp.Forward()
    block = pp.DelimitedList(stmt, ";", allow_trailing_delim=True).set_parse_action(lambda t: seq(list(t)))

    probability = pp.Regex(r"\d+\.\d+|\d+/\d+|\d+").set_parse_action(lambda t: Fraction(t[0]))
    bernoulli = (_kw("Bernoulli") + LPAR + probability + RPAR).set_parse_action(lambda t: Bernoulli("", t[1]))
    skip = _kw("skip").set_parse_action(lambda: Skip())
    assign = (IDENTIFIER + ASSIGN + (bernoulli | expr)).set_parse_action(lambda t: Assign(t[0], t[1]))
    call = (IDENTIFIER + LPAR + pp.Group(pp.Opt(pp.DelimitedList(expr))) + RPAR).set_parse_action(
        lambda t: Call(t[0], tuple(t[1]))
    )
    if_star = (
        pp.Suppress(_kw("if")) + pp.Suppress(_kw("star")) + pp.Suppress(_kw("then")) + block
        + pp.Suppress(_kw("else")) + block + pp.Suppress(_kw("fi"))
    ).set_parse_action(lambda t: IfStar(t[0], t[1]))
    if_bool = (
        pp.Suppress(_kw("if")) + pred + pp.Suppress(_kw("then")) + block
        + pp.Suppress(_kw("else")) + block + pp.Suppress(_kw("fi"))
    ).set_parse_action(lambda t: IfBool(t[0], t[1], t[2]))
    while_ = (
        pp.Suppress(_kw("while")) + pred + pp.Suppress(_kw("do")) + block + pp.Suppress(_kw("od"))
    ).set_parse_action(lambda t: While(t[0], t[1]))
    stmt <<= (pp.Opt(_integer() + COLON) + (skip | if_star | if_bool | while_ | assign | call)).set_parse_action(
        _attach_label
    )

    params = pp.Group(pp.Opt(pp.DelimitedList(IDENTIFIER)))
    function = (
        IDENTIFIER + LPAR + params + RPAR + LBRACE + block + pp.Group(pp.Opt(_integer() + COLON)) + RBRACE
    ).set_parse_action(
        lambda t: FunctionEntity(t[0], tuple(t[1]), t[2], t[3][0] if len(t[3]) else None)
    )
    declaration = pp.Suppress(_kw("sample")) + pp.DelimitedList(IDENTIFIER) + SEMI
    program = pp.Group(pp.ZeroOrMore(declaration)) + pp.Group(pp.OneOrMore(function))
    program.ignore(pp.python_style_comment)
    return program


def _parse(element: pp.ParserElement, text: str):
    try:
        return element.parse_string(text, parse_all=True)
    except pp.ParseBaseException as exc:
        raise ParseError(exc.msg, exc.lineno, exc.col) from None


def parse_expression(text: str, certificate: bool = False):
    return _parse(expression_grammar(certificate), text)[0]


def parse_predicate(text: str, certificate: bool = False):
    return _parse(predicate_grammar(certificate), text)[0]


def parse(source: str) -> Program:
    """
    Parse program source into a validated Program.

    :param source: program text
    :return: Program
    """
    result = _parse(program_grammar(), source)
    sampling = tuple(result[0])
    functions = tuple(result[1])
    program = _name_bernoulli_draws(Program(functions, sampling))
    validate(program)
    return program


def map_statements(stmt: Stmt, fn) -> Stmt:
    """Rebuild ``stmt`` bottom-up in source order, applying ``fn`` to every non-sequence statement."""
    if isinstance(stmt, Seq):
        first = map_statements(stmt.first, fn)
        return Seq(first, map_statements(stmt.second, fn))
    if isinstance(stmt, (IfBool, IfStar)):
        node = fn(stmt)
        return replace(node, then=map_statements(node.then, fn), orelse=map_statements(node.orelse, fn))
    if isinstance(stmt, While):
        node = fn(stmt)
        return replace(node, body=map_statements(node.body, fn))
    return fn(stmt)


def _name_bernoulli_draws(program: Program) -> Program:
    counter = iter(range(1, 1 << 62))

    def rename(stmt):
        if isinstance(stmt, Assign) and isinstance(stmt.expr, Bernoulli):
            return replace(stmt, expr=Bernoulli(f"{BERNOULLI_PREFIX}{next(counter)}", stmt.expr.p))
        return stmt

    functions = tuple(replace(fn, body=map_statements(fn.body, rename)) for fn in program.functions)
    return replace(program, functions=functions)


def validate(program: Program) -> None:
    """
    Enforce the well-formedness rules of programs.

    :param program: parsed program
    :return: None, raises a FrontendError subclass on the first violation
    """
    names = [fn.name for fn in program.functions]
    duplicates = sorted({name for name in names if names.count(name) > 1})
    if duplicates:
        raise DuplicateFunctionError(f"function {duplicates[0]!r} is defined more than once")
    arity = {fn.name: len(fn.params) for fn in program.functions}

    declared = list(program.sampling)
    reused = sorted({name for name in declared if declared.count(name) > 1})
    if reused:
        raise ReusedSamplingVariableError(f"sampling variable {reused[0]!r} is declared more than once")
    sampling = set(declared)
    occurrences = {name: 0 for name in sampling}

    for fn in program.functions:
        if len(set(fn.params)) != len(fn.params):
            raise DuplicateParameterError(f"function {fn.name!r} repeats a parameter in {fn.params}")
        if sampling & set(fn.params):
            raise SamplingVariableMisuseError(f"function {fn.name!r} uses a sampling variable as parameter")
        for stmt in iter_statements(fn.body):
            if isinstance(stmt, Assign):
                if stmt.var in sampling:
                    raise SamplingVariableMisuseError(f"assignment to sampling variable {stmt.var!r} in {fn.name!r}")
                if isinstance(stmt.expr, Bernoulli) and not 0 <= stmt.expr.p <= 1:
                    raise DistributionError(f"Bernoulli parameter {stmt.expr.p} is outside [0, 1]")
                for name in expr_variables(stmt.expr):
                    if name in occurrences:
                        occurrences[name] += 1
            elif isinstance(stmt, (IfBool, While)):
                used = sampling.intersection(pred_variables(stmt.cond))
                if used:
                    raise SamplingVariableMisuseError(f"sampling variable {sorted(used)[0]!r} used in a predicate of {fn.name!r}")
            elif isinstance(stmt, Call):
                if stmt.callee not in arity:
                    raise UndeclaredCalleeError(f"{fn.name!r} calls undeclared function {stmt.callee!r}")
                if len(stmt.args) != arity[stmt.callee]:
                    raise ArityError(
                        f"{fn.name!r} calls {stmt.callee!r} with {len(stmt.args)} arguments, expected {arity[stmt.callee]}"
                    )
                for arg in stmt.args:
                    used = sampling.intersection(expr_variables(arg))
                    if used:
                        raise SamplingVariableMisuseError(f"sampling variable {sorted(used)[0]!r} passed to {stmt.callee!r}")
    reused = sorted(name for name, count in occurrences.items() if count > 1)
    if reused:
        raise ReusedSamplingVariableError(f"sampling variable {reused[0]!r} appears more than once")


@cache
def distribution_grammar() -> pp.ParserElement:
    signed = pp.Regex(r"[+-]?\d+").set_parse_action(lambda t: int(t[0]))
    probability = pp.Regex(r"\d+/\d+|\d+\.\d+|\d+").set_parse_action(lambda t: Fraction(t[0]))
    outcome = pp.Group(signed + probability)
    stanza = pp.Group(IDENTIFIER + COLON + pp.Group(pp.DelimitedList(outcome, ";", allow_trailing_delim=True)))
    grammar = pp.ZeroOrMore(stanza)
    grammar.ignore(pp.python_style_comment)
    return grammar


def parse_distributions(text: str) -> SamplingFunction:
    """
    Parse a distribution file, one stanza per sampling variable: ``r: 1 1/4; -1 3/4``.

    :param text: file contents
    :return: SamplingFunction
    """
    dists = {}
    for name, outcomes in _parse(distribution_grammar(), text):
        if name in dists:
            raise DistributionError(f"sampling variable {name!r} has two stanzas")
        dists[name] = DiscreteDist.from_pairs((value, prob) for value, prob in outcomes)
    return SamplingFunction(dists)


def sampling_function_for(program: Program, dists: SamplingFunction) -> SamplingFunction:
    """
    Combine the user distributions with the intrinsic Bernoulli laws of ``program``.

    :param program: parsed program
    :param dists: user-supplied distributions, must cover every declared sampling variable
    :return: SamplingFunction over all sampling variables of the program
    """
    missing = sorted(set(program.sampling) - set(dists))
    if missing:
        raise DistributionError(f"no distribution given for sampling variable {missing[0]!r}")
    combined = {name: dists[name] for name in program.sampling}
    for name, p in program.bernoulli_variables().items():
        combined[name] = DiscreteDist.bernoulli(p)
    return SamplingFunction(combined)
