"""Memoryless schedulers resolving ``if star`` choices from the top stack element."""
from fractions import Fraction
from typing import Mapping

from src.certificates.certificate import Certificate
from src.cfg.graph import Cfg
from src.core.rng import RngStream
from src.errors import ConfigError
from src.models import Action, Branch, LabelKind, SchedulerKind

_HALF = Fraction(1, 2)


class Scheduler:
    kind: SchedulerKind

    def distribution(self, fname: str, label: int, nu: Mapping[str, int]) -> dict[Action, Fraction]:
        """Law over {th, el} at a nondeterministic label."""
        raise NotImplementedError

    def choose(self, fname: str, label: int, nu: Mapping[str, int], rng: RngStream) -> Action:
        law = self.distribution(fname, label, nu)
        if len(law) == 1:
            return next(iter(law))
        return Action.THEN if rng.random() < law[Action.THEN] else Action.ELSE

    def __repr__(self) -> str:
        return f"{type(self).__name__}()"


class AlwaysThen(Scheduler):
    kind = SchedulerKind.ALWAYS_THEN

    def distribution(self, fname, label, nu):
        return {Action.THEN: Fraction(1)}


class AlwaysElse(Scheduler):
    kind = SchedulerKind.ALWAYS_ELSE

    def distribution(self, fname, label, nu):
        return {Action.ELSE: Fraction(1)}


class Uniform(Scheduler):
    kind = SchedulerKind.UNIFORM

    def distribution(self, fname, label, nu):
        return {Action.THEN: _HALF, Action.ELSE: _HALF}


class Greedy(Scheduler):
    """
    Picks the branch whose target has the larger (or smaller) certificate value.

    Ties go to th.
    """

    def __init__(self, h: Certificate, cfg: Cfg, maximize: bool = True):
        self.h = h.bind(cfg)
        self.maximize = maximize
        self.kind = SchedulerKind.GREEDY_MAX if maximize else SchedulerKind.GREEDY_MIN
        self._targets = {}
        for fname, label in cfg.label_pairs():
            if cfg.kind(fname, label) is LabelKind.NONDETERMINISTIC:
                targets = {edge.payload.branch: edge.target for edge in cfg[fname].outgoing(label)}
                self._targets[(fname, label)] = (targets[Branch.THEN], targets[Branch.ELSE])

    def distribution(self, fname, label, nu):
        then_label, else_label = self._targets[(fname, label)]
        then_value = self.h.evaluate(fname, then_label, nu)
        else_value = self.h.evaluate(fname, else_label, nu)
        if self.maximize:
            pick_then = then_value >= else_value
        else:
            pick_then = then_value <= else_value
        return {Action.THEN if pick_then else Action.ELSE: Fraction(1)}

    def __repr__(self) -> str:
        return f"Greedy(maximize={self.maximize})"


def make_scheduler(kind: SchedulerKind, cfg: Cfg, h: Certificate | None = None) -> Scheduler:
    """
    :param kind: scheduler name
    :param cfg: program the scheduler runs on
    :param h: certificate, required for the greedy schedulers
    :return: Scheduler
    """
    kind = SchedulerKind(kind)
    if kind.needs_certificate:
        if h is None:
            raise ConfigError(f"scheduler {kind.value} needs a certificate")
        return Greedy(h, cfg, maximize=kind is SchedulerKind.GREEDY_MAX)
    return {
        SchedulerKind.ALWAYS_THEN: AlwaysThen,
        SchedulerKind.ALWAYS_ELSE: AlwaysElse,
        SchedulerKind.UNIFORM: Uniform,
    }[kind]()
