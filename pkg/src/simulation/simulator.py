"""Monte Carlo estimation of termination-time statistics."""
import logging
import math
from dataclasses import dataclass, field
from multiprocessing import Pool

from scipy import stats

from src.cfg.graph import Cfg
from src.core.distributions import SamplingFunction
from src.core.rng import RngStream
from src.models import Action
from src.settings.constants import BATCH_SIZE, CONFIDENCE_LEVEL
from src.simulation.schedulers import Scheduler
from src.simulation.semantics import Machine, StackElement, check_entry

logger = logging.getLogger(__name__)


@dataclass
class RunStats:
    """
    Integer sufficient statistics of the termination time T.

    Censored runs (step cap reached) are excluded from the mean and counted
    in every tail, so tails up to the cap are exact counts.
    """

    tail_ks: tuple[int, ...] = ()
    runs: int = 0
    terminated: int = 0
    censored: int = 0
    total_steps: int = 0
    total_sq: int = 0
    max_observed: int = 0
    tail_counts: list[int] = field(default_factory=list)

    def __post_init__(self):
        if not self.tail_counts:
            self.tail_counts = [0] * len(self.tail_ks)

    def add(self, steps: int, terminated: bool) -> None:
        self.runs += 1
        if terminated:
            self.terminated += 1
            self.total_steps += steps
            self.total_sq += steps * steps
            self.max_observed = max(self.max_observed, steps)
        else:
            self.censored += 1
        for i, k in enumerate(self.tail_ks):
            if not terminated or steps >= k:
                self.tail_counts[i] += 1

    def merge(self, other: "RunStats") -> "RunStats":
        if other.tail_ks != self.tail_ks:
            raise ValueError("cannot merge statistics over different tail thresholds")
        self.runs += other.runs
        self.terminated += other.terminated
        self.censored += other.censored
        self.total_steps += other.total_steps
        self.total_sq += other.total_sq
        self.max_observed = max(self.max_observed, other.max_observed)
        self.tail_counts = [a + b for a, b in zip(self.tail_counts, other.tail_counts)]
        return self

    @property
    def mean(self) -> float:
        return self.total_steps / self.terminated if self.terminated else math.nan

    @property
    def variance(self) -> float:
        if self.terminated < 2:
            return math.nan
        m = self.terminated
        return (self.total_sq - self.total_steps * self.total_steps / m) / (m - 1)

    def mean_half_width(self, confidence: float = CONFIDENCE_LEVEL) -> float:
        """Normal-approximation half-width of the mean over terminated runs."""
        if self.terminated < 2:
            return math.nan
        z = stats.norm.ppf(0.5 + confidence / 2)
        return float(z * math.sqrt(max(self.variance, 0.0) / self.terminated))

    def tail(self, k: int) -> float:
        """Empirical P(T >= k)."""
        return self.tail_counts[self.tail_ks.index(k)] / self.runs

    def tail_interval(self, k: int, confidence: float = CONFIDENCE_LEVEL) -> tuple[float, float]:
        """Wilson score interval for P(T >= k)."""
        count = self.tail_counts[self.tail_ks.index(k)]
        ci = stats.binomtest(count, self.runs).proportion_ci(confidence_level=confidence, method="wilson")
        return float(ci.low), float(ci.high)

    def tail_sigma(self, k: int) -> float:
        p = self.tail(k)
        return math.sqrt(p * (1 - p) / self.runs)

    def rows(self) -> list[dict]:
        """Tail estimates as report rows."""
        result = []
        for k in self.tail_ks:
            low, high = self.tail_interval(k)
            result.append({"k": k, "p_hat": self.tail(k), "ci_low": low, "ci_high": high})
        return result


@dataclass(frozen=True)
class SimulationTask:
    cfg: Cfg
    sf: SamplingFunction
    entry: StackElement
    scheduler: Scheduler
    max_steps: int
    tail_ks: tuple[int, ...]
    seed: int


def run_once(task: SimulationTask, machine: Machine, run_index: int) -> tuple[int, bool]:
    """
    One run from (entry, 0) on stream (seed, run_index).

    The step's sample is drawn before the scheduler is consulted.

    :return: (steps taken, terminated)
    """
    rng = RngStream(task.seed, run_index)
    stack = [(task.entry.fname, task.entry.label, task.entry.valuation.as_dict())]
    draw, choose = task.sf.draw, task.scheduler.choose
    nondet, advance = machine.is_nondeterministic, machine.advance
    steps = 0
    while stack and steps < task.max_steps:
        mu = draw(rng)
        top = stack[-1]
        action = choose(top[0], top[1], top[2], rng) if nondet(top) else Action.TAU
        advance(stack, mu, action)
        steps += 1
    return steps, not stack


def _simulate_batch(args) -> RunStats:
    task, start, stop = args
    machine = Machine(task.cfg)
    batch = RunStats(task.tail_ks)
    for run_index in range(start, stop):
        batch.add(*run_once(task, machine, run_index))
    return batch


def simulate(
    cfg: Cfg,
    sf: SamplingFunction,
    entry: StackElement,
    sched: Scheduler,
    runs: int,
    max_steps: int,
    k_list=(),
    seed: int = 0,
    workers: int = 1,
    batch_size: int = BATCH_SIZE,
) -> RunStats:
    """
    Estimate the law of the termination time from ``entry``.

    :param cfg: program
    :param sf: sampling function over the program's sampling variables
    :param entry: nonterminal stack element to start from
    :param sched: scheduler for nondeterministic labels
    :param runs: number of independent runs
    :param max_steps: step cap per run
    :param k_list: thresholds k for P(T >= k)
    :param seed: base seed, run i uses stream (seed, i)
    :param workers: process count, the result does not depend on it
    :return: RunStats
    """
    check_entry(cfg, entry)
    if max_steps < 1:
        raise ValueError("max_steps must be at least 1")
    tail_ks = tuple(sorted(set(int(k) for k in k_list)))
    task = SimulationTask(cfg, sf.restricted(cfg.sampling), entry, sched, max_steps, tail_ks, seed)
    batches = [(task, start, min(start + batch_size, runs)) for start in range(0, runs, batch_size)]
    if workers > 1 and len(batches) > 1:
        with Pool(workers) as pool:
            parts = pool.map(_simulate_batch, batches)
    else:
        parts = map(_simulate_batch, batches)
    result = RunStats(tail_ks)
    for part in parts:
        result.merge(part)
    if result.censored:
        logger.warning("%d of %d runs hit the step cap of %d", result.censored, result.runs, max_steps)
    beyond = [k for k in tail_ks if k > max_steps]
    if beyond:
        logger.warning("tail thresholds %s exceed the step cap; censored runs are counted in them", beyond)
    logger.info("simulated %d runs from %r with %r", result.runs, entry, sched)
    return result
