"""
Exhaustive checks of certificate conditions over a verification box.

Every point (f, label, valuation) of the box is visited in a fixed order:
functions by name, labels ascending, valuations lexicographically. All
arithmetic is exact.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from multiprocessing import Pool
from typing import Callable, Iterator

from src.certificates.certificate import Certificate, VerifyBox
from src.certificates.report import CheckReport, Counterexample
from src.cfg.graph import Cfg
from src.core.distributions import SamplingFunction
from src.core.extreal import INF, ZERO, ExtReal, extreal_sum_weighted
from src.core.valuation import Valuation
from src.models import Branch, CertKind, LabelKind

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PointFacts:
    """Certificate values at one box point and at its successors."""

    fname: str
    label: int
    kind: LabelKind
    valuation: Valuation
    current: ExtReal
    outcomes: tuple[tuple[Fraction, ExtReal], ...] = ()
    alternatives: tuple[ExtReal, ExtReal] = ()

    @property
    def expected(self) -> ExtReal:
        return extreal_sum_weighted(self.outcomes)

    @property
    def successor(self) -> ExtReal:
        return self.outcomes[0][1]


def _distance(a: ExtReal, b: ExtReal) -> ExtReal:
    if a.is_infinite or b.is_infinite:
        return INF
    return abs(a - b)


class PointScanner:
    def __init__(self, h: Certificate, cfg: Cfg, sf: SamplingFunction, box: VerifyBox):
        self.h, self.cfg, self.sf, self.box = h, cfg, sf, box
        h.bind(cfg)
        self._joint = sf.restricted(cfg.sampling).joint_support()

    def label_facts(self, fname: str, label: int) -> Iterator[PointFacts]:
        fn = self.cfg[fname]
        kind = fn.kind(label)
        edges = fn.outgoing(label)
        evaluate = self.h.evaluate
        for nu in self.box.points(fn.variables):
            current = evaluate(fname, label, nu)
            if kind is LabelKind.TERMINAL:
                yield PointFacts(fname, label, kind, nu, current)
            elif kind is LabelKind.ASSIGNMENT:
                update, target = edges[0].payload, edges[0].target
                if update.uses(self.cfg.sampling):
                    outcomes = tuple(
                        (w, evaluate(fname, target, update.apply(nu, mu))) for mu, w in self._joint
                    )
                else:
                    outcomes = ((Fraction(1), evaluate(fname, target, update.apply(nu, {}))),)
                yield PointFacts(fname, label, kind, nu, current, outcomes)
            elif kind is LabelKind.CALL:
                call, target = edges[0].payload, edges[0].target
                callee_value = evaluate(call.callee, self.cfg[call.callee].entry, call.bind(nu))
                successor = callee_value + evaluate(fname, target, nu)
                yield PointFacts(fname, label, kind, nu, current, ((Fraction(1), successor),))
            elif kind is LabelKind.BRANCHING:
                taken = edges[0] if edges[0].payload.holds(nu) else edges[1]
                successor = evaluate(fname, taken.target, nu)
                yield PointFacts(fname, label, kind, nu, current, ((Fraction(1), successor),))
            else:
                targets = {edge.payload.branch: edge.target for edge in edges}
                alternatives = (
                    evaluate(fname, targets[Branch.THEN], nu),
                    evaluate(fname, targets[Branch.ELSE], nu),
                )
                yield PointFacts(fname, label, kind, nu, current, alternatives=alternatives)

    def facts(self) -> Iterator[PointFacts]:
        for fname, label in self.cfg.label_pairs():
            yield from self.label_facts(fname, label)


def _fail(condition, point: PointFacts, lhs, relation, rhs, description=""):
    return lambda: Counterexample(condition, point.fname, point.label, point.valuation, lhs, relation, rhs, description)


def _ranking_conditions(report: CheckReport, point: PointFacts, eps: Fraction) -> None:
    cur = point.current
    kind = point.kind
    if kind is LabelKind.TERMINAL:
        report.record("C1", cur == ZERO, _fail("C1", point, cur, "=", ZERO, "terminal value"))
        return
    if kind is LabelKind.ASSIGNMENT:
        name, succ, text = "C2", point.expected, "eps + E[h(succ)] <= h"
    elif kind is LabelKind.CALL:
        name, succ, text = "C3", point.successor, "eps + h(callee entry) + h(return) <= h"
    elif kind is LabelKind.BRANCHING:
        name, succ, text = "C4", point.successor, "eps + h(branch) <= h"
    else:
        name, succ, text = "C5", max(point.alternatives), "eps + max h(then, else) <= h"
    lhs = succ + eps
    report.record(name, lhs <= cur, _fail(name, point, lhs, "<=", cur, text))


def _cdb_conditions(report: CheckReport, point: PointFacts, delta: Fraction, zeta: Fraction) -> None:
    cur = point.current
    if point.kind is LabelKind.TERMINAL or cur.is_infinite:
        return
    if point.kind is LabelKind.ASSIGNMENT:
        lhs = point.expected + delta
        report.record("C6(i)", lhs >= cur, _fail("C6(i)", point, lhs, ">=", cur, "delta + E[h(succ)] >= h"))
        spread = extreal_sum_weighted((w, _distance(s, cur)) for w, s in point.outcomes)
        report.record("C6(ii)", spread <= zeta, _fail("C6(ii)", point, spread, "<=", ExtReal(zeta), "E|h(succ) - h| <= zeta"))
        return
    if point.kind is LabelKind.CALL:
        name, succ = "C7", point.successor
    elif point.kind is LabelKind.BRANCHING:
        name, succ = "C8", point.successor
    else:
        name, succ = "C9", max(point.alternatives)
    lhs = succ + delta
    report.record(name, lhs >= cur, _fail(name, point, lhs, ">=", cur, "delta + h(succ) >= h"))


def _db_conditions(report: CheckReport, point: PointFacts, zeta: Fraction) -> None:
    cur = point.current
    if point.kind is LabelKind.TERMINAL or cur.is_infinite:
        return
    bound = ExtReal(zeta)
    if point.kind is LabelKind.NONDETERMINISTIC:
        name, jumps = "C13", [_distance(s, cur) for s in point.alternatives]
    else:
        name = {LabelKind.ASSIGNMENT: "C10", LabelKind.CALL: "C11", LabelKind.BRANCHING: "C12"}[point.kind]
        jumps = [_distance(s, cur) for _, s in point.outcomes]
    worst = max(jumps)
    report.record(name, worst <= bound, _fail(name, point, worst, "<=", bound, "|h(succ) - h| <= zeta"))


def _super_conditions(report: CheckReport, point: PointFacts, delta: Fraction, zeta: Fraction | None) -> None:
    cur = point.current
    terminal = point.kind is LabelKind.TERMINAL
    report.record("D1", terminal == (cur == ZERO), _fail("D1", point, cur, "=" if terminal else "!=", ZERO, "zero exactly at terminals"))
    if terminal or cur.is_infinite:
        return
    name = {
        LabelKind.ASSIGNMENT: "D2",
        LabelKind.CALL: "D3",
        LabelKind.BRANCHING: "D4",
        LabelKind.NONDETERMINISTIC: "D5",
    }[point.kind]
    if point.kind is LabelKind.NONDETERMINISTIC:
        succ, jumps = max(point.alternatives), [_distance(s, cur) for s in point.alternatives]
    else:
        succ = point.expected if point.kind is LabelKind.ASSIGNMENT else point.successor
        jumps = [_distance(s, cur) for _, s in point.outcomes]
    report.record(name, succ <= cur, _fail(name, point, succ, "<=", cur, "no increase"))
    if zeta is not None:
        worst = max(jumps)
        report.record(f"{name}*", worst <= zeta, _fail(f"{name}*", point, worst, "<=", ExtReal(zeta), "|h(succ) - h| <= zeta"))
    if point.kind is LabelKind.ASSIGNMENT:
        spread = extreal_sum_weighted((w, _distance(s, cur)) for w, s in point.outcomes)
        report.record("D2(delta)", spread >= delta, _fail("D2(delta)", point, spread, ">=", ExtReal(delta), "E|h(succ) - h| >= delta"))


def _condition_fn(kind: CertKind, params: dict) -> Callable[[CheckReport, PointFacts], None]:
    if kind is CertKind.RANKING:
        return lambda report, point: _ranking_conditions(report, point, params["eps"])
    if kind is CertKind.CDB:
        return lambda report, point: _cdb_conditions(report, point, params["delta"], params["zeta"])
    if kind is CertKind.DB:
        return lambda report, point: _db_conditions(report, point, params["zeta"])
    return lambda report, point: _super_conditions(report, point, params["delta"], params["zeta"])


def _check_labels(task) -> CheckReport:
    kind, params, h, cfg, sf, box, pairs = task
    scanner = PointScanner(h, cfg, sf, box)
    conditions = _condition_fn(kind, params)
    report = CheckReport(kind, params, box)
    for fname, label in pairs:
        for point in scanner.label_facts(fname, label):
            report.points += 1
            conditions(report, point)
    return report


def _run_check(kind: CertKind, params: dict, h: Certificate, cfg: Cfg, sf: SamplingFunction, box: VerifyBox, workers: int) -> CheckReport:
    h.bind(cfg)
    pairs = cfg.label_pairs()
    for fname in cfg.function_names:
        box.size(cfg[fname].variables)
    if workers > 1 and len(pairs) > 1:
        tasks = [(kind, params, h, cfg, sf, box, [pair]) for pair in pairs]
        with Pool(workers) as pool:
            parts = pool.map(_check_labels, tasks)
    else:
        parts = [_check_labels((kind, params, h, cfg, sf, box, pairs))]
    report = CheckReport(kind, params, box)
    for part in parts:
        report.merge(part)
    report.notes.append(f"checked {report.points} box points over {box}")
    logger.info("%s check: %s (%d points)", kind.value, report.verdict, report.points)
    return report


def _positive(name: str, value) -> Fraction:
    if value is None:
        raise ValueError(f"{name} is required")
    value = Fraction(value)
    if value <= 0:
        raise ValueError(f"{name} must be positive, got {value}")
    return value


def check_ranking(h: Certificate, eps, cfg: Cfg, sf: SamplingFunction, box: VerifyBox, workers: int = 1) -> CheckReport:
    """
    Ranking measure conditions: zero at terminals, and an expected decrease of at least ``eps``
    at assignment, call, branching and nondeterministic labels.

    :return: CheckReport, failures are recorded rather than raised
    """
    return _run_check(CertKind.RANKING, {"eps": _positive("eps", eps)}, h, cfg, sf, box, workers)


def check_cdb(h: Certificate, delta, zeta, cfg: Cfg, sf: SamplingFunction, box: VerifyBox, workers: int = 1) -> CheckReport:
    """Conditional difference bounds at finite-valued points: decrease at most ``delta``, expected jump at most ``zeta``."""
    params = {"delta": _positive("delta", delta), "zeta": _positive("zeta", zeta)}
    return _run_check(CertKind.CDB, params, h, cfg, sf, box, workers)


def check_db(h: Certificate, zeta, cfg: Cfg, sf: SamplingFunction, box: VerifyBox, workers: int = 1) -> CheckReport:
    """Per-outcome difference bound ``zeta`` at finite-valued points."""
    return _run_check(CertKind.DB, {"zeta": _positive("zeta", zeta)}, h, cfg, sf, box, workers)


def check_super(h: Certificate, delta, zeta, cfg: Cfg, sf: SamplingFunction, box: VerifyBox, workers: int = 1) -> CheckReport:
    """
    Super-measure conditions. With ``zeta=None`` the per-outcome difference bounds are skipped,
    which is the weaker variant that only yields the qualitative k^(-1/6) tail.
    """
    params = {"delta": _positive("delta", delta), "zeta": None if zeta is None else _positive("zeta", zeta)}
    report = _run_check(CertKind.SUPER, params, h, cfg, sf, box, workers)
    if zeta is None:
        report.notes.append("difference bounds skipped: only the k^(-1/6) tail is available")
    return report


@dataclass(frozen=True)
class TightParameters:
    """Best constants for which each condition family holds on the box; None when no finite constant exists."""

    max_eps: Fraction | None
    min_delta: Fraction | None
    min_cdb_zeta: Fraction | None
    min_db_zeta: Fraction | None
    max_super_delta: Fraction | None
    min_super_zeta: Fraction | None
    ranking_feasible: bool
    super_feasible: bool


def tight_parameters(h: Certificate, cfg: Cfg, sf: SamplingFunction, box: VerifyBox) -> TightParameters:
    """
    Extremal eps, delta and zeta over the box.

    ``max_eps`` is the smallest slack cur - succ; ``min_delta`` the largest drop;
    the zeta values are the largest (expected or per-outcome) jumps. ``ranking_feasible``
    is False when a terminal is nonzero or a finite point has an infinite successor.
    """
    scanner = PointScanner(h, cfg, sf, box)
    eps = delta = cdb_zeta = db_zeta = super_delta = super_zeta = None
    ranking_ok = super_ok = True

    def lower(acc, value):
        return value if acc is None or value < acc else acc

    def upper(acc, value):
        return value if acc is None or value > acc else acc

    for point in scanner.facts():
        cur = point.current
        if point.kind is LabelKind.TERMINAL:
            ranking_ok &= cur == ZERO
            super_ok &= cur == ZERO
            continue
        super_ok &= cur != ZERO
        if cur.is_infinite:
            continue
        if point.kind is LabelKind.NONDETERMINISTIC:
            succ = max(point.alternatives)
            jumps = [_distance(s, cur) for s in point.alternatives]
        else:
            succ = point.expected if point.kind is LabelKind.ASSIGNMENT else point.successor
            jumps = [_distance(s, cur) for _, s in point.outcomes]
        if succ.is_infinite:
            ranking_ok = False
            super_ok = False
            continue
        slack = (cur - succ).fraction
        eps = lower(eps, slack)
        delta = upper(delta, slack)
        super_ok &= slack >= 0
        worst = max(jumps)
        if worst.is_finite:
            db_zeta = upper(db_zeta, worst.fraction)
            super_zeta = upper(super_zeta, worst.fraction)
        if point.kind is LabelKind.ASSIGNMENT:
            spread = extreal_sum_weighted((w, _distance(s, cur)) for w, s in point.outcomes)
            if spread.is_finite:
                cdb_zeta = upper(cdb_zeta, spread.fraction)
                super_delta = lower(super_delta, spread.fraction)
    if eps is not None and eps <= 0:
        ranking_ok = False
    return TightParameters(
        max_eps=eps if ranking_ok else None,
        min_delta=delta,
        min_cdb_zeta=cdb_zeta,
        min_db_zeta=db_zeta,
        max_super_delta=super_delta,
        min_super_zeta=super_zeta,
        ranking_feasible=ranking_ok,
        super_feasible=super_ok,
    )
