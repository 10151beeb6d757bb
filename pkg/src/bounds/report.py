import logging
from dataclasses import dataclass, field
from fractions import Fraction

from src.bounds.calculator import (
    concentration_tail_value,
    lower_expected,
    markov_tail_value,
    sqrt_tail,
    upper_expected,
)
from src.certificates.certificate import Certificate, eval_cert
from src.certificates.theta import ThetaIndex
from src.core.extreal import ExtReal
from src.errors import BoundHypothesisError, OutsideValidityDomainError
from src.language.printer import format_number
from src.models import CertKind
from src.simulation.semantics import StackElement

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BoundRow:
    quantity: str
    argument: int | None
    value: str
    validity: str = ""

    def as_dict(self) -> dict:
        return {"quantity": self.quantity, "argument": self.argument, "value": self.value, "validity": self.validity}


@dataclass
class BoundReport:
    kind: CertKind
    entry: StackElement
    h_entry: ExtReal
    params: dict[str, Fraction | int | None]
    rows: list[BoundRow] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def value(self, quantity: str, argument: int | None = None) -> str:
        for row in self.rows:
            if row.quantity == quantity and row.argument == argument:
                return row.value
        raise KeyError((quantity, argument))


def _text(value) -> str:
    if isinstance(value, ExtReal):
        return str(value)
    if isinstance(value, Fraction):
        return format_number(value)
    return f"{value:.6g}"


def _require(params: dict, *names: str) -> None:
    missing = [name for name in names if params.get(name) is None]
    if missing:
        raise BoundHypothesisError(f"missing parameter(s) {', '.join(missing)}")


def tail_report(
    kind: CertKind,
    h: Certificate,
    params: dict,
    entry: StackElement,
    ks=(),
    ns=(),
    theta: ThetaIndex | None = None,
) -> BoundReport:
    """
    All bounds the certificate kind supports at ``entry``.

    ranking gives h/eps and Markov tails; cdb adds h/delta; db adds the exponential
    tails for each n; super gives the square-root tail with K from ``theta``, or only
    the qualitative verdict when zeta is absent.

    :param params: eps, delta, zeta as needed by the kind
    :param ks: thresholds for P(T >= k)
    :param ns: thresholds for P(T > n)
    :param theta: label fixpoint, required for super
    """
    kind = CertKind(kind)
    h_entry = eval_cert(h, entry)
    report = BoundReport(kind, entry, h_entry, dict(params))
    rows = report.rows
    if kind in (CertKind.RANKING, CertKind.CDB, CertKind.DB):
        _require(params, "eps")
        eps = params["eps"]
        if kind is CertKind.CDB:
            _require(params, "delta")
            try:
                rows.append(BoundRow("lower_expected", None, _text(lower_expected(h, params["delta"], entry))))
            except BoundHypothesisError as exc:
                rows.append(BoundRow("lower_expected", None, "n/a", str(exc)))
        rows.append(BoundRow("upper_expected", None, _text(upper_expected(h, eps, entry))))
        for k in ks:
            rows.append(BoundRow("markov_tail", k, _text(markov_tail_value(h_entry, eps, k)), "P(T >= k)"))
        if kind is CertKind.DB:
            _require(params, "zeta")
            for n in ns:
                try:
                    bound = concentration_tail_value(h_entry, eps, params["zeta"], n)
                except OutsideValidityDomainError as exc:
                    rows.append(BoundRow("concentration_tail", n, "n/a", str(exc)))
                    continue
                rows.append(BoundRow("concentration_tail", n, _text(bound.value), "P(T > n)"))
                rows.append(BoundRow("concentration_factored", n, _text(bound.factored_value), "P(T > n)"))
        return report

    _require(params, "delta")
    if theta is None:
        raise BoundHypothesisError("super-measure bounds need the label fixpoint")
    if not theta.all_covered:
        raise BoundHypothesisError(f"labels {theta.uncovered} have no finite step bound")
    rows.append(BoundRow("almost_sure_termination", None, "yes"))
    report.params["K"] = theta.k_max
    if params.get("zeta") is None:
        report.notes.append("a.s. terminating, tail in O(k^(-1/6))")
        return report
    for k in ks:
        if h_entry == 0:
            rows.append(BoundRow("sqrt_tail", k, "0", "terminal entry"))
            continue
        bound = sqrt_tail(h_entry, params["delta"], params["zeta"], theta.k_max, k)
        validity = "P(T >= k)" if bound.valid else f"needs k >= {bound.minimal_k}"
        rows.append(BoundRow("sqrt_tail", k, str(bound) if bound.valid else "k too small", validity))
    return report
