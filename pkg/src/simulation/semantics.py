"""Transition function of the program MDP."""
from dataclasses import dataclass

from src.cfg.graph import Cfg, CallSpec, Guard, Star, Update
from src.core.valuation import Valuation
from src.errors import DisabledActionError, TerminalEntryError
from src.models import Action, Branch, LabelKind

NONDET_ACTIONS = (Action.THEN, Action.ELSE)
TAU_ONLY = (Action.TAU,)


@dataclass(frozen=True)
class StackElement:
    fname: str
    label: int
    valuation: Valuation

    def __repr__(self) -> str:
        return f"({self.fname}, {self.label}, {self.valuation!r})"


Configuration = tuple[StackElement, ...]


@dataclass(frozen=True)
class MdpState:
    """Configuration (top of stack first, empty when terminated) and last sampled valuation."""

    configuration: Configuration
    mu: Valuation

    @property
    def terminated(self) -> bool:
        return not self.configuration


def check_entry(cfg: Cfg, entry: StackElement) -> None:
    if entry.fname not in cfg:
        raise TerminalEntryError(f"unknown function {entry.fname!r}")
    fn = cfg[entry.fname]
    if entry.label not in fn.kinds:
        raise TerminalEntryError(f"{entry.fname!r} has no label {entry.label}")
    if fn.terminal == entry.label:
        raise TerminalEntryError(f"entry ({entry.fname}, {entry.label}) is a terminal stack element")


def enabled_actions(state: MdpState, cfg: Cfg) -> tuple[Action, ...]:
    if state.terminated:
        return TAU_ONLY
    top = state.configuration[0]
    if cfg.kind(top.fname, top.label) is LabelKind.NONDETERMINISTIC:
        return NONDET_ACTIONS
    return TAU_ONLY


class Machine:
    """
    Step kernel over a mutable stack of ``(fname, label, valuation dict)`` frames, top last.
    """

    def __init__(self, cfg: Cfg):
        self.cfg = cfg
        self._table: dict[str, dict[int, tuple]] = {}
        for name, fn in cfg.functions.items():
            rows = {}
            for label, kind in fn.kinds.items():
                edges = fn.outgoing(label)
                if kind is LabelKind.ASSIGNMENT:
                    rows[label] = (kind, edges[0].payload, edges[0].target)
                elif kind is LabelKind.CALL:
                    call: CallSpec = edges[0].payload
                    rows[label] = (kind, call, edges[0].target, call.callee, cfg[call.callee].entry)
                elif kind is LabelKind.BRANCHING:
                    rows[label] = (kind, edges[0].payload, edges[0].target, edges[1].target)
                elif kind is LabelKind.NONDETERMINISTIC:
                    targets = {edge.payload.branch: edge.target for edge in edges}
                    rows[label] = (kind, targets[Branch.THEN], targets[Branch.ELSE])
                else:
                    rows[label] = (kind,)
            self._table[name] = rows
        self._terminal = {name: fn.terminal for name, fn in cfg.functions.items()}

    def is_nondeterministic(self, frame) -> bool:
        return self._table[frame[0]][frame[1]][0] is LabelKind.NONDETERMINISTIC

    def nondet_targets(self, fname: str, label: int) -> tuple[int, int]:
        row = self._table[fname][label]
        return row[1], row[2]

    def advance(self, stack: list, mu, action: Action = Action.TAU) -> None:
        """
        Apply one transition to ``stack`` in place.

        :param stack: frames, top last; must be nonempty
        :param mu: sampling valuation drawn for this step
        :param action: tau, or th/el at nondeterministic labels
        """
        fname, label, nu = stack[-1]
        row = self._table[fname][label]
        kind = row[0]
        if kind is LabelKind.NONDETERMINISTIC:
            if action is Action.THEN:
                target = row[1]
            elif action is Action.ELSE:
                target = row[2]
            else:
                raise DisabledActionError(f"action {action.value} is not enabled at ({fname}, {label})")
        elif action is not Action.TAU:
            raise DisabledActionError(f"action {action.value} is not enabled at ({fname}, {label})")
        elif kind is LabelKind.ASSIGNMENT:
            update: Update = row[1]
            nu = update.apply(nu, mu)
            target = row[2]
        elif kind is LabelKind.CALL:
            callee_frame = (row[3], row[4], row[1].bind(nu))
            if row[2] == self._terminal[fname]:
                stack[-1] = callee_frame
            else:
                stack[-1] = (fname, row[2], nu)
                stack.append(callee_frame)
            return
        elif kind is LabelKind.BRANCHING:
            guard: Guard = row[1]
            target = row[2] if guard.holds(nu) else row[3]
        else:
            raise TerminalEntryError(f"terminal stack element ({fname}, {label}) on the stack")
        if target == self._terminal[fname]:
            stack.pop()
        else:
            stack[-1] = (fname, target, nu)


def step(state: MdpState, action: Action, mu: Valuation, cfg: Cfg, machine: Machine | None = None) -> MdpState:
    """
    One MDP transition.

    :param state: current state
    :param action: enabled action
    :param mu: sampled valuation for the step, becomes the new state's ``mu``
    :param cfg: control-flow graph
    :param machine: kernel to reuse across calls
    :return: successor MdpState
    """
    if state.terminated:
        return MdpState((), mu)
    if action not in enabled_actions(state, cfg):
        top = state.configuration[0]
        raise DisabledActionError(f"action {action.value} is not enabled at ({top.fname}, {top.label})")
    machine = machine or Machine(cfg)
    stack = [(e.fname, e.label, e.valuation.as_dict()) for e in reversed(state.configuration)]
    machine.advance(stack, mu, action)
    configuration = tuple(StackElement(f, label, Valuation(nu)) for f, label, nu in reversed(stack))
    return MdpState(configuration, mu)
