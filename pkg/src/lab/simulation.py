import logging
import math
from dataclasses import dataclass
from multiprocessing import Pool

import numpy as np
from scipy import stats

from src.core.rng import generator
from src.errors import UnsupportedQueryError
from src.lab.processes import LabProcess, analytic, supported_queries
from src.models import LabQuery
from src.settings.constants import CONFIDENCE_LEVEL, LAB_BLOCK_SIZE

logger = logging.getLogger(__name__)

# upper bound on uniforms drawn per chunk of a block
MAX_CHUNK_CELLS = 1 << 22
FIRST_CHUNK = 16
CENSORED = -1


def simulate_block(process: LabProcess, size: int, horizon: int, seed: int, block: int) -> np.ndarray:
    """
    Termination times of ``size`` runs on stream (seed, block); CENSORED past the horizon.

    Live runs advance in chunks of steps: the increments of a chunk are summed
    cumulatively and the first nonpositive partial sum is the termination time.
    """
    rng = generator(seed, block)
    times = np.full(size, CENSORED, dtype=np.int64)
    state = np.full(size, process.start)
    alive = np.arange(size)
    n, width = 1, FIRST_CHUNK
    while alive.size and n <= horizon:
        width = min(width, horizon - n + 1)
        steps = np.arange(n, n + width)
        path = state[alive, None] + np.cumsum(process.increments(steps, rng.random((alive.size, width))), axis=1)
        hit = path <= 0
        stopped = hit.any(axis=1)
        times[alive[stopped]] = n + hit[stopped].argmax(axis=1)
        survivors = ~stopped
        state[alive[survivors]] = path[survivors, -1]
        alive = alive[survivors]
        n += width
        width = max(FIRST_CHUNK, min(2 * width, MAX_CHUNK_CELLS // max(alive.size, 1)))
    return times


def _block_task(args) -> np.ndarray:
    return simulate_block(*args)


@dataclass
class LabResult:
    process: LabProcess
    runs: int
    horizon: int
    seed: int
    times: np.ndarray

    @property
    def censored(self) -> int:
        return int(np.count_nonzero(self.times == CENSORED))

    def tail_count(self, n: int) -> int:
        """Runs with T > n; censored runs always count."""
        if n > self.horizon:
            raise ValueError(f"n={n} is beyond the simulated horizon {self.horizon}")
        return int(np.count_nonzero((self.times == CENSORED) | (self.times > n)))

    def empirical_tail(self, n: int) -> float:
        return self.tail_count(n) / self.runs

    def tail_interval(self, n: int, confidence: float = CONFIDENCE_LEVEL) -> tuple[float, float]:
        ci = stats.binomtest(self.tail_count(n), self.runs).proportion_ci(confidence_level=confidence, method="wilson")
        return float(ci.low), float(ci.high)

    def tail_sigma(self, n: int) -> float:
        p = self.empirical_tail(n)
        return math.sqrt(p * (1 - p) / self.runs)

    def empirical_mean(self, confidence: float = CONFIDENCE_LEVEL) -> tuple[float, float]:
        """Mean of T over terminated runs with its normal half-width."""
        done = self.times[self.times != CENSORED].astype(float)
        if done.size < 2:
            return math.nan, math.nan
        z = stats.norm.ppf(0.5 + confidence / 2)
        return float(done.mean()), float(z * done.std(ddof=1) / math.sqrt(done.size))

    def rows(self, ns=()) -> list[dict]:
        """
        Analytic against empirical for every supported query.

        The nontermination probability is estimated by P(T > horizon), an upper-biased proxy.
        """
        rows = []
        for query in supported_queries(self.process):
            if query is LabQuery.PROB_NONTERM:
                logger.warning("nontermination for %s is estimated by P(T > %d)", self.process.tag.value, self.horizon)
                low, high = self.tail_interval(self.horizon)
                rows.append(_row(query, self.horizon, analytic(self.process, query), self.empirical_tail(self.horizon), low, high, "P(T > horizon) proxy"))
            elif query is LabQuery.EXPECTED_T:
                mean, half = self.empirical_mean()
                rows.append(_row(query, None, analytic(self.process, query), mean, mean - half, mean + half, "mean over terminated runs"))
            else:
                for n in ns:
                    low, high = self.tail_interval(n)
                    rows.append(_row(query, n, analytic(self.process, query, n), self.empirical_tail(n), low, high, "P(T > n), Wilson"))
        return rows


def _row(query, n, exact, empirical, low, high, method) -> dict:
    return {
        "query": query.value,
        "n": n,
        "analytic": exact,
        "empirical": empirical,
        "ci_low": low,
        "ci_high": high,
        "method": method,
    }


def simulate_lab(
    process: LabProcess,
    runs: int,
    horizon: int,
    seed: int = 0,
    workers: int = 1,
    block_size: int = LAB_BLOCK_SIZE,
) -> LabResult:
    """
    Simulate ``runs`` trajectories up to ``horizon`` steps.

    Block b holds runs [b*block_size, (b+1)*block_size) on stream (seed, b),
    so the result does not depend on ``workers``.

    :return: LabResult
    """
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    tasks = [
        (process, min(block_size, runs - start), horizon, seed, block)
        for block, start in enumerate(range(0, runs, block_size))
    ]
    if workers > 1 and len(tasks) > 1:
        with Pool(workers) as pool:
            parts = pool.map(_block_task, tasks)
    else:
        parts = [_block_task(task) for task in tasks]
    times = np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)
    result = LabResult(process, runs, horizon, seed, times)
    if result.censored:
        logger.info("%d of %d %s runs did not stop within %d steps", result.censored, runs, process.tag.value, horizon)
    return result


def tail_slope(result: LabResult, ns) -> tuple[float, float]:
    """
    Least-squares slope of log P(T > n) against log n.

    :return: (slope, standard error)
    """
    points = [(n, result.empirical_tail(n)) for n in ns if n > 0]
    points = [(math.log(n), math.log(p)) for n, p in points if p > 0]
    if len(points) < 3:
        raise UnsupportedQueryError("need at least three thresholds with a positive tail estimate")
    fit = stats.linregress([x for x, _ in points], [y for _, y in points])
    return float(fit.slope), float(fit.stderr)
