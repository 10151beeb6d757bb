"""
Labels from which a function terminates within a bounded number of
simulation steps once every sampled value is fixed.

Assignment and terminal labels start the set with bound 0. A call label joins
once both its return target and the callee entry are in the set; branching and
nondeterministic labels join once both successors are. Each round updates all
labels simultaneously from the previous round, until nothing changes.
"""
import logging
from dataclasses import dataclass, field

from src.cfg.graph import Cfg
from src.models import LabelKind

logger = logging.getLogger(__name__)

Point = tuple[str, int]


@dataclass
class ThetaIndex:
    K: dict[Point, int]
    iterations: int
    all_labels: tuple[Point, ...]
    history: list[frozenset[Point]] = field(default_factory=list)

    @property
    def members(self) -> frozenset[Point]:
        return frozenset(self.K)

    @property
    def all_covered(self) -> bool:
        return len(self.K) == len(self.all_labels)

    @property
    def uncovered(self) -> list[Point]:
        return [pair for pair in self.all_labels if pair not in self.K]

    @property
    def k_max(self) -> int | None:
        return max(self.K.values()) if self.all_covered else None

    def k_max_by_function(self) -> dict[str, int | None]:
        """Largest bound per function; None for a function with an uncovered label."""
        result: dict[str, int | None] = {}
        for fname, label in self.all_labels:
            if fname in result and result[fname] is None:
                continue
            value = self.K.get((fname, label))
            result[fname] = None if value is None else max(result.get(fname) or 0, value)
        return result


def _join(cfg: Cfg, fname: str, label: int, known: dict[Point, int]) -> int | None:
    fn = cfg[fname]
    kind = fn.kind(label)
    edges = fn.outgoing(label)
    if kind is LabelKind.CALL:
        call, target = edges[0].payload, edges[0].target
        callee = (call.callee, cfg[call.callee].entry)
        if (fname, target) in known and callee in known:
            return known[(fname, target)] + known[callee] + 1
        return None
    children = [(fname, edge.target) for edge in edges]
    if all(child in known for child in children):
        return 1 + max(known[child] for child in children)
    return None


def compute_theta(cfg: Cfg) -> ThetaIndex:
    """
    Least fixpoint of the bounded-termination label set with its step bounds.

    :param cfg: control-flow graph of the program
    :return: ThetaIndex with bounds K and the per-round membership history
    """
    pairs = tuple(cfg.label_pairs())
    known: dict[Point, int] = {
        (fname, label): 0
        for fname, label in pairs
        if cfg.kind(fname, label) in (LabelKind.ASSIGNMENT, LabelKind.TERMINAL)
    }
    history = [frozenset(known)]
    iterations = 0
    while True:
        additions = {}
        for fname, label in pairs:
            if (fname, label) in known:
                continue
            bound = _join(cfg, fname, label, known)
            if bound is not None:
                additions[(fname, label)] = bound
        if not additions:
            break
        known = {**known, **additions}
        iterations += 1
        history.append(frozenset(known))
    index = ThetaIndex(known, iterations, pairs, history)
    if not index.all_covered:
        logger.info("labels without a finite step bound: %s", index.uncovered)
    return index
