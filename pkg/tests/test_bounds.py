import math
from fractions import Fraction

import pytest

from src.bounds.calculator import (
    concentration_tail,
    concentration_tail_value,
    lower_expected,
    markov_tail,
    minimal_valid_k,
    smallness_holds,
    sqrt_tail,
    upper_expected,
)
from src.bounds.report import tail_report
from src.certificates.theta import compute_theta
from src.core.extreal import INF, ExtReal
from src.core.valuation import Valuation
from src.errors import BoundHypothesisError, OutsideValidityDomainError
from src.models import CertKind
from src.simulation.semantics import StackElement

RUNNING_ENTRY = StackElement("f", 1, Valuation({"n": 5}))
REFUTATION_ENTRY = StackElement("main", 1, Valuation({"c": 0, "i": 0, "n": 0}))
WALK_ENTRY = StackElement("f", 1, Valuation({"n": 1}))


def test_expected_time_bounds(running_cert, refutation_cert):
    assert upper_expected(running_cert, 1, RUNNING_ENTRY) == ExtReal(56)
    assert lower_expected(running_cert, 13, RUNNING_ENTRY) == ExtReal(Fraction(56, 13))
    assert upper_expected(refutation_cert, 1, REFUTATION_ENTRY) == ExtReal(19)


def test_lower_bound_needs_finite_value(running_cert):
    with pytest.raises(BoundHypothesisError):
        lower_expected(running_cert, 13, StackElement("f", 2, Valuation({"n": 0})))
    assert upper_expected(running_cert, 1, StackElement("f", 2, Valuation({"n": 0}))) == INF


def test_markov_tail(running_cert, refutation_cert):
    assert markov_tail(running_cert, 1, RUNNING_ENTRY, 112) == Fraction(1, 2)
    assert markov_tail(running_cert, 1, RUNNING_ENTRY, 10) == 1
    assert markov_tail(refutation_cert, 1, REFUTATION_ENTRY, 190) == Fraction(1, 10)
    with pytest.raises(BoundHypothesisError):
        markov_tail(running_cert, 1, RUNNING_ENTRY, 0)


def test_concentration_tail(running_cert):
    bound = concentration_tail(running_cert, 1, 13, RUNNING_ENTRY, 560)
    assert bound.exponent == Fraction(-(504**2), 2 * 560 * 196)
    assert bound.value == pytest.approx(0.3144, abs=1e-4)
    assert bound.factored_value >= bound.value
    assert concentration_tail_value(ExtReal(0), 1, 1, 1).value == pytest.approx(math.exp(-1 / 8))


@pytest.mark.parametrize("n", [1, 55, 56])
def test_concentration_outside_domain(running_cert, n):
    with pytest.raises(OutsideValidityDomainError):
        concentration_tail(running_cert, 1, 13, RUNNING_ENTRY, n)


def test_concentration_decreases_in_n(running_cert):
    values = [concentration_tail(running_cert, 1, 13, RUNNING_ENTRY, n).value for n in (200, 400, 800, 1600)]
    assert values == sorted(values, reverse=True)


def test_minimal_valid_k():
    assert minimal_valid_k(1, 1) == 1
    k = minimal_valid_k(1, 13)
    assert 2_000_000 < k < 2_300_000
    assert smallness_holds(1, 13, k)
    assert not smallness_holds(1, 13, k - 1)


def test_sqrt_tail():
    bound = sqrt_tail(ExtReal(2), 1, 1, 2, 10**6)
    assert bound.valid
    assert bound.value == pytest.approx(0.0170, abs=2e-4)
    assert sqrt_tail(ExtReal(2), 1, 1, 10, 5).value == 1.0
    assert sqrt_tail(ExtReal(2), 1, 1, 0, 10**6).value == sqrt_tail(ExtReal(2), 1, 1, 1, 10**6).value


def test_sqrt_tail_below_threshold():
    bound = sqrt_tail(ExtReal(56), 1, 13, 3, 1000)
    assert not bound.valid
    assert "needs k >=" in str(bound)


@pytest.mark.parametrize("h", [ExtReal(0), INF])
def test_sqrt_tail_needs_positive_finite_value(h):
    with pytest.raises(BoundHypothesisError):
        sqrt_tail(h, 1, 1, 2, 100)


def test_ranking_report(running_cert):
    report = tail_report(CertKind.RANKING, running_cert, {"eps": Fraction(1)}, RUNNING_ENTRY, ks=(112,))
    assert report.value("upper_expected") == "56"
    assert report.value("markov_tail", 112) == "0.5"
    with pytest.raises(KeyError):
        report.value("lower_expected")


def test_cdb_and_db_reports(running_cert):
    params = {"eps": Fraction(1), "delta": Fraction(13), "zeta": Fraction(13)}
    cdb = tail_report(CertKind.CDB, running_cert, params, RUNNING_ENTRY)
    assert cdb.value("lower_expected") == "56/13"
    db = tail_report(CertKind.DB, running_cert, params, RUNNING_ENTRY, ns=(56, 560))
    assert db.value("concentration_tail", 56) == "n/a"
    assert float(db.value("concentration_tail", 560)) == pytest.approx(0.3144, abs=1e-4)
    with pytest.raises(BoundHypothesisError):
        tail_report(CertKind.DB, running_cert, {"eps": Fraction(1)}, RUNNING_ENTRY, ns=(560,))


def test_super_report(walk, running, running_cert, walk_cert):
    _, cfg, _ = walk
    theta = compute_theta(cfg)
    params = {"delta": Fraction(1), "zeta": Fraction(1)}
    report = tail_report(CertKind.SUPER, walk_cert, params, WALK_ENTRY, ks=(10**6,), theta=theta)
    assert report.value("almost_sure_termination") == "yes"
    assert report.params["K"] == 2
    assert float(report.value("sqrt_tail", 10**6)) == pytest.approx(0.0170, abs=2e-4)
    weak = tail_report(CertKind.SUPER, walk_cert, {"delta": Fraction(1)}, WALK_ENTRY, ks=(10**6,), theta=theta)
    assert [row.quantity for row in weak.rows] == ["almost_sure_termination"]
    assert weak.notes == ["a.s. terminating, tail in O(k^(-1/6))"]
    _, running_cfg, _ = running
    with pytest.raises(BoundHypothesisError):
        tail_report(CertKind.SUPER, running_cert, params, RUNNING_ENTRY, ks=(100,), theta=compute_theta(running_cfg))
