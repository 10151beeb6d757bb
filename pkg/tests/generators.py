"""Seeded random programs and certificates for property tests."""
import random
from fractions import Fraction

from src.certificates.certificate import Certificate, CertParams, Piece
from src.cfg.graph import Cfg
from src.language.ast import (
    Assign,
    BinOp,
    Call,
    Compare,
    Const,
    FunctionEntity,
    IfBool,
    IfStar,
    Neg,
    Program,
    Skip,
    Var,
    While,
    seq,
)

VARIABLES = ("n", "m")


def random_expr(rng: random.Random, depth: int = 2, names=VARIABLES):
    if depth == 0 or rng.random() < 0.3:
        return Var(rng.choice(names)) if rng.random() < 0.6 else Const(rng.randint(-3, 5))
    choice = rng.random()
    if choice < 0.15:
        return Neg(random_expr(rng, depth - 1, names))
    if choice < 0.3:
        return BinOp("//", random_expr(rng, depth - 1, names), Const(rng.randint(1, 4)))
    op = rng.choice(["+", "-", "*"])
    return BinOp(op, random_expr(rng, depth - 1, names), random_expr(rng, depth - 1, names))


def random_pred(rng: random.Random):
    return Compare(rng.choice(["<", "<=", ">", ">=", "=", "!="]), random_expr(rng, 1), random_expr(rng, 1))


def random_stmt(rng: random.Random, depth: int, callees: tuple[str, ...]):
    if depth == 0:
        kind = rng.choice(["skip", "assign", "call"] if callees else ["skip", "assign"])
    else:
        kind = rng.choice(["skip", "assign", "call", "if", "star", "while", "seq"] if callees else ["skip", "assign", "if", "star", "while", "seq"])
    if kind == "skip":
        return Skip()
    if kind == "assign":
        return Assign(rng.choice(VARIABLES), random_expr(rng))
    if kind == "call":
        return Call(rng.choice(callees), (random_expr(rng, 1),))
    if kind == "if":
        return IfBool(random_pred(rng), random_stmt(rng, depth - 1, callees), random_stmt(rng, depth - 1, callees))
    if kind == "star":
        return IfStar(random_stmt(rng, depth - 1, callees), random_stmt(rng, depth - 1, callees))
    if kind == "while":
        return While(random_pred(rng), random_stmt(rng, depth - 1, callees))
    return seq([random_stmt(rng, depth - 1, callees) for _ in range(rng.randint(2, 3))])


def random_program(rng: random.Random, functions: int = 2, depth: int = 3) -> Program:
    """Unlabelled program whose functions take one parameter ``n``."""
    names = tuple(f"f{i}" for i in range(functions))
    entities = tuple(FunctionEntity(name, ("n",), random_stmt(rng, depth, names)) for name in names)
    return Program(entities)


def random_certificate(rng: random.Random, cfg: Cfg) -> Certificate:
    """Nonnegative piecewise certificate, zero at terminals."""
    coordinates = {}
    for fname, label in cfg.label_pairs():
        if cfg.is_terminal(fname, label):
            coordinates[(fname, label)] = (Piece(None, Const(0)),)
            continue
        slope, offset = rng.randint(0, 3), rng.randint(1, 6)
        expr = BinOp("+", BinOp("*", Const(slope), Var("n")), Const(offset))
        coordinates[(fname, label)] = (
            Piece(Compare(">=", Var("n"), Const(0)), expr),
            Piece(None, Const(rng.randint(1, 4))),
        )
    return Certificate(coordinates, CertParams(eps=Fraction(1)))
