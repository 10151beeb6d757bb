import random

import pytest

from src.cfg.builder import build_cfg, dump_cfg
from src.cfg.graph import CallSpec, Guard, Star, Update, value_passing
from src.language.labeller import function_labels, label
from src.language.parser import parse
from src.models import Branch, LabelKind
from tests.generators import random_program

WALK_DUMP = """\
f: (1, n >= 1, 2)
f: (1, not (n >= 1), 4)
f: (2, n := n + r, 3)
f: (3, call f(n), 5)
f: (4, id, 5)
g: (1, n >= 1, 2)
g: (1, not (n >= 1), 3)
g: (2, n := n + s, 1)
"""


def test_walk_dump(walk):
    _, cfg, _ = walk
    assert dump_cfg(cfg) == WALK_DUMP


def test_running_label_kinds(running):
    _, cfg, _ = running
    kinds = {label: cfg.kind("f", label) for label in cfg["f"].labels}
    assert kinds == {
        1: LabelKind.BRANCHING,
        2: LabelKind.NONDETERMINISTIC,
        3: LabelKind.CALL,
        4: LabelKind.CALL,
        5: LabelKind.CALL,
        6: LabelKind.ASSIGNMENT,
        7: LabelKind.TERMINAL,
    }
    assert cfg["f"].entry == 1
    assert cfg["g"].terminal == 5
    assert cfg.label_pairs()[:2] == [("f", 1), ("f", 2)]
    assert cfg.total_labels == 12


def test_loop_back_edge(refutation):
    _, cfg, _ = refutation
    main = cfg["main"]
    assert main.successors(4) == (5, 12)
    assert main.successors(8) == (4,)
    assert main.successors(11) == (4,)
    assert main.successors(13) == (12,)
    assert main.successors(12) == (13, 14)
    assert main.reachable_labels() == set(range(1, 15))


def test_nondeterministic_edges_carry_branches(running):
    _, cfg, _ = running
    payloads = [t.payload for t in cfg["f"].outgoing(2)]
    assert payloads == [Star(Branch.THEN), Star(Branch.ELSE)]
    assert cfg["f"].successors(2) == (3, 5)


def test_value_passing_zeroes_callee_locals():
    cfg = build_cfg(parse("f(n) { g(n + 1, 2 * n) } g(a, x) { b := a + x }"))
    call = cfg["f"].outgoing(1)[0].payload
    assert isinstance(call, CallSpec)
    assert value_passing(call, {"n": 3}) == {"a": 4, "x": 6, "b": 0}


def test_skip_is_identity_update(running):
    _, cfg, _ = running
    update = cfg["f"].outgoing(6)[0].payload
    assert isinstance(update, Update) and update.is_identity
    assert update.apply({"n": -2}, {}) == {"n": -2}


def test_unlabelled_program_is_labelled_on_build():
    cfg = build_cfg(parse("f(n) { while n > 0 do n := n - 1 od }"))
    assert dump_cfg(cfg) == "f: (1, n > 0, 2)\nf: (1, not (n > 0), 3)\nf: (2, n := n - 1, 1)\n"


@pytest.mark.parametrize("seed", range(20))
def test_out_degree_matches_label_kind(seed):
    program = label(random_program(random.Random(seed)))
    cfg = build_cfg(program)
    for fname, lab in cfg.label_pairs():
        fn = cfg[fname]
        edges = fn.outgoing(lab)
        kind = fn.kind(lab)
        assert all(t.target in fn.kinds for t in edges)
        if kind is LabelKind.TERMINAL:
            assert edges == ()
        elif kind in (LabelKind.ASSIGNMENT, LabelKind.CALL):
            assert len(edges) == 1
        elif kind is LabelKind.BRANCHING:
            assert len(edges) == 2
            assert all(isinstance(t.payload, Guard) for t in edges)
        else:
            assert sorted(t.payload.branch.value for t in edges) == ["else", "then"]
    assert cfg.total_labels == sum(len(function_labels(fn)) for fn in program.functions)
