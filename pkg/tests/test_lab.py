import math

import numpy as np
import pytest

from src.errors import UnsupportedQueryError
from src.lab.processes import LabProcess, analytic, exact_tail, supported_queries
from src.lab.simulation import CENSORED, simulate_block, simulate_lab, tail_slope
from src.models import LabQuery, LabTag
from src.simulation.oracles import exact_walk_tail


def within(result, n, sigmas=5):
    exact = exact_tail(result.process, n)
    return abs(result.empirical_tail(n) - exact) <= sigmas * math.sqrt(exact * (1 - exact) / result.runs) + 1e-12


@pytest.mark.parametrize(
    "tag, query, n, expected",
    [
        (LabTag.NONNEGATIVITY, LabQuery.PROB_NONTERM, None, 0.193025),
        (LabTag.POSITIVITY, LabQuery.PROB_NONTERM, None, 0.5),
        (LabTag.RANDOMWALK, LabQuery.PROB_NONTERM, None, 0.0),
        (LabTag.CBOUNDED, LabQuery.EXPECTED_T, None, 2.0),
        (LabTag.NONCONCENTRATION, LabQuery.EXPECTED_T, None, math.pi**2 / 6),
        (LabTag.CBOUNDED, LabQuery.TAIL, 5, 1 / 32),
        (LabTag.NONCONCENTRATION, LabQuery.TAIL, 9, 0.01),
        (LabTag.RANDOMWALK, LabQuery.TAIL, 4, 6 / 16),
        (LabTag.POSITIVITY, LabQuery.TAIL, 7, 0.5),
        (LabTag.NONNEGATIVITY, LabQuery.TAIL, 2, math.exp(-1.25)),
    ],
)
def test_closed_forms(tag, query, n, expected):
    assert analytic(LabProcess(tag), query, n) == pytest.approx(expected, abs=1e-6)


def test_walk_tail_matches_oracle():
    walk = LabProcess(LabTag.RANDOMWALK)
    survival = exact_walk_tail(1, 200)
    for n in (0, 1, 2, 3, 50, 199, 200):
        assert exact_tail(walk, n) == pytest.approx(survival[n])


def test_unsupported_queries():
    with pytest.raises(UnsupportedQueryError):
        analytic(LabProcess(LabTag.RANDOMWALK), LabQuery.EXPECTED_T)
    with pytest.raises(UnsupportedQueryError):
        analytic(LabProcess(LabTag.CBOUNDED), LabQuery.TAIL)
    assert supported_queries(LabProcess(LabTag.POSITIVITY)) == [LabQuery.PROB_NONTERM, LabQuery.TAIL]
    assert supported_queries(LabProcess(LabTag.CBOUNDED)) == [LabQuery.PROB_NONTERM, LabQuery.EXPECTED_T, LabQuery.TAIL]


def test_alpha_must_exceed_one():
    with pytest.raises(ValueError):
        LabProcess(LabTag.NONCONCENTRATION, alpha=1.0)
    assert analytic(LabProcess(LabTag.NONCONCENTRATION, alpha=3.0), LabQuery.TAIL, 1) == pytest.approx(1 / 8)


def test_cbounded_simulation():
    result = simulate_lab(LabProcess(LabTag.CBOUNDED), runs=20000, horizon=60, seed=4)
    assert result.censored == 0
    assert all(within(result, n) for n in (1, 2, 3, 5))
    mean, half = result.empirical_mean()
    assert abs(mean - 2.0) <= 5 * half / 1.96


def test_noconcentration_simulation():
    result = simulate_lab(LabProcess(LabTag.NONCONCENTRATION), runs=40000, horizon=200, seed=9)
    assert all(within(result, n) for n in (1, 9, 50))


def test_nonnegativity_and_positivity_keep_mass():
    nonneg = simulate_lab(LabProcess(LabTag.NONNEGATIVITY), runs=20000, horizon=400, seed=2)
    assert all(within(nonneg, n) for n in (1, 3, 400))
    assert nonneg.empirical_tail(400) >= analytic(nonneg.process, LabQuery.PROB_NONTERM) - 0.02
    positivity = simulate_lab(LabProcess(LabTag.POSITIVITY), runs=20000, horizon=100, seed=2)
    assert within(positivity, 100)
    assert np.all((positivity.times == CENSORED) | (positivity.times == 1))


def test_walk_tail_exponent():
    result = simulate_lab(LabProcess(LabTag.RANDOMWALK), runs=20000, horizon=1024, seed=5)
    slope, stderr = tail_slope(result, (16, 64, 256, 1024))
    assert abs(slope + 0.5) < 0.1
    assert stderr >= 0
    with pytest.raises(UnsupportedQueryError):
        tail_slope(result, (0, 16))


def test_blocks_are_independent_of_workers():
    process = LabProcess(LabTag.RANDOMWALK)
    serial = simulate_lab(process, runs=3000, horizon=100, seed=1, block_size=1000)
    parallel = simulate_lab(process, runs=3000, horizon=100, seed=1, workers=2, block_size=1000)
    assert np.array_equal(serial.times, parallel.times)
    assert np.array_equal(serial.times[:1000], simulate_block(process, 1000, 100, 1, 0))


def test_rows_and_horizon():
    result = simulate_lab(LabProcess(LabTag.CBOUNDED), runs=500, horizon=20, seed=0)
    rows = result.rows((1, 5))
    assert [row["query"] for row in rows] == ["prob_nonterm", "expected_T", "tail", "tail"]
    assert rows[0]["n"] == 20
    assert all(row["ci_low"] <= row["empirical"] <= row["ci_high"] for row in rows[1:])
    with pytest.raises(ValueError):
        result.tail_count(21)
    with pytest.raises(ValueError):
        simulate_lab(LabProcess(LabTag.CBOUNDED), runs=10, horizon=0)
