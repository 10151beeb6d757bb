"""
Counterexample processes X_{n+1} = 1[X_n > 0] * (X_n + Y_{n+1}) and their closed forms.

The termination time is T = min{n | X_n <= 0}. Every process here is additive
while positive, so a trajectory is the running sum of its increments.
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from src.errors import UnsupportedQueryError
from src.models import LabQuery, LabTag


@dataclass(frozen=True)
class LabProcess:
    tag: LabTag
    alpha: float = 2.0

    def __post_init__(self):
        object.__setattr__(self, "tag", LabTag(self.tag))
        if self.tag is LabTag.NONCONCENTRATION and self.alpha <= 1:
            raise ValueError(f"alpha must exceed 1, got {self.alpha}")

    @property
    def start(self) -> float:
        return {
            LabTag.NONNEGATIVITY: 0.5,
            LabTag.CBOUNDED: 3.0,
            LabTag.NONCONCENTRATION: 3.0,
            LabTag.RANDOMWALK: 1.0,
            LabTag.POSITIVITY: 1.0,
        }[self.tag]

    def up_probability(self, steps: np.ndarray) -> np.ndarray:
        """Probability of the non-terminating increment at each step n >= 1."""
        steps = np.asarray(steps, dtype=float)
        if self.tag is LabTag.NONNEGATIVITY:
            return np.exp(-1.0 / steps**2)
        if self.tag is LabTag.NONCONCENTRATION:
            return (steps / (steps + 1)) ** self.alpha
        return np.full(steps.shape, 0.5)

    def increments(self, steps: np.ndarray, u: np.ndarray) -> np.ndarray:
        """
        Y_n for a matrix of uniforms, one column per step.

        :param steps: step indices n, shape (width,)
        :param u: uniforms, shape (runs, width)
        :return: increments, shape (runs, width)
        """
        steps = np.asarray(steps, dtype=float)
        up = u < self.up_probability(steps)
        if self.tag is LabTag.NONNEGATIVITY:
            return np.where(up, 1.0, -4.0 * steps**2)
        if self.tag is LabTag.CBOUNDED:
            scale = np.exp2(steps - 1)
            return np.where(up, scale, -scale - 2.0)
        if self.tag is LabTag.NONCONCENTRATION:
            return np.where(up, 2.0, -2.0 * steps - 1.0)
        if self.tag is LabTag.RANDOMWALK:
            return np.where(up, 1.0, -1.0)
        scale = np.exp2(1.0 - steps)
        return np.where(up, scale, -scale)


def exact_tail(process: LabProcess, n: int) -> float:
    """P(T > n)."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    tag = process.tag
    if tag is LabTag.NONNEGATIVITY:
        return math.exp(-sum(1.0 / j**2 for j in range(1, n + 1)))
    if tag is LabTag.CBOUNDED:
        return 2.0**-n
    if tag is LabTag.NONCONCENTRATION:
        return (n + 1.0) ** -process.alpha
    if tag is LabTag.RANDOMWALK:
        m = n // 2
        return float(np.exp(special.gammaln(n + 1) - special.gammaln(m + 1) - special.gammaln(n - m + 1) - n * math.log(2)))
    return 1.0 if n == 0 else 0.5


def analytic(process: LabProcess, query: LabQuery, n: int | None = None) -> float:
    """
    Closed-form value of ``query``.

    :raises UnsupportedQueryError: the query has no finite closed form for this process
    """
    query = LabQuery(query)
    tag = process.tag
    if query is LabQuery.TAIL:
        if n is None:
            raise UnsupportedQueryError("tail query needs n")
        return exact_tail(process, n)
    if query is LabQuery.PROB_NONTERM:
        if tag is LabTag.NONNEGATIVITY:
            return math.exp(-math.pi**2 / 6)
        return 0.5 if tag is LabTag.POSITIVITY else 0.0
    if tag is LabTag.CBOUNDED:
        return 2.0
    if tag is LabTag.NONCONCENTRATION:
        # E[T] = sum_{n>=0} P(T > n) = zeta(alpha)
        return float(special.zeta(process.alpha))
    raise UnsupportedQueryError(f"{tag.value} has an infinite expected termination time")


def supported_queries(process: LabProcess) -> list[LabQuery]:
    queries = [LabQuery.PROB_NONTERM, LabQuery.TAIL]
    if process.tag in (LabTag.CBOUNDED, LabTag.NONCONCENTRATION):
        queries.insert(1, LabQuery.EXPECTED_T)
    return queries
