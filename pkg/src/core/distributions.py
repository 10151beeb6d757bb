import bisect
import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from src.core.rng import RngStream
from src.core.valuation import Valuation
from src.errors import DistributionError, ValuationError
from src.settings.constants import JOINT_SUPPORT_WARNING

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DiscreteDist:
    """Finite distribution over integers with exact rational probabilities."""

    support: tuple[tuple[int, Fraction], ...]
    _cumulative: tuple[float, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        pairs = tuple((int(value), Fraction(prob)) for value, prob in self.support)
        if not pairs:
            raise DistributionError("distribution support is empty")
        values = [value for value, _ in pairs]
        if len(set(values)) != len(values):
            raise DistributionError(f"duplicate support values in {values}")
        for value, prob in pairs:
            if not 0 < prob <= 1:
                raise DistributionError(f"probability {prob} of value {value} is outside (0, 1]")
        total = sum((prob for _, prob in pairs), Fraction(0))
        if total != 1:
            raise DistributionError(f"probabilities sum to {total}, expected exactly 1")
        object.__setattr__(self, "support", pairs)
        running, cumulative = Fraction(0), []
        for _, prob in pairs:
            running += prob
            cumulative.append(float(running))
        cumulative[-1] = 1.0
        object.__setattr__(self, "_cumulative", tuple(cumulative))

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, Fraction | int | str]]) -> "DiscreteDist":
        return cls(tuple((value, Fraction(prob)) for value, prob in pairs))

    @classmethod
    def point(cls, value: int) -> "DiscreteDist":
        return cls(((value, Fraction(1)),))

    @classmethod
    def bernoulli(cls, p: Fraction) -> "DiscreteDist":
        p = Fraction(p)
        if not 0 <= p <= 1:
            raise DistributionError(f"Bernoulli parameter {p} is outside [0, 1]")
        return cls.from_pairs([(v, q) for v, q in ((0, 1 - p), (1, p)) if q > 0])

    @property
    def values(self) -> tuple[int, ...]:
        return tuple(value for value, _ in self.support)

    def probability(self, value: int) -> Fraction:
        for candidate, prob in self.support:
            if candidate == value:
                return prob
        return Fraction(0)

    def mean(self) -> Fraction:
        return sum((value * prob for value, prob in self.support), Fraction(0))

    def index_for(self, u: float) -> int:
        return bisect.bisect_right(self._cumulative, u)


def sample(dist: DiscreteDist, rng: RngStream) -> int:
    """
    Draw one value of ``dist``.

    :param dist: distribution to draw from
    :param rng: stream that supplies the uniform
    :return: a support value
    """
    return dist.support[dist.index_for(rng.random())][0]


class SamplingFunction(Mapping):
    """
    Sampling function: one DiscreteDist per sampling variable, plus the product law over joint valuations.
    """

    def __init__(self, dists: Mapping[str, DiscreteDist] | None = None):
        self._dists = dict(sorted((dists or {}).items()))
        self._joint = None
        self._joint_cumulative = None

    def __getitem__(self, name: str) -> DiscreteDist:
        try:
            return self._dists[name]
        except KeyError:
            raise ValuationError(f"no distribution for sampling variable {name!r}") from None

    def __iter__(self):
        return iter(self._dists)

    def __len__(self) -> int:
        return len(self._dists)

    def __repr__(self) -> str:
        return f"SamplingFunction({self._dists!r})"

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(self._dists)

    def zero(self) -> Valuation:
        return Valuation.zero(self._dists)

    def restricted(self, names: Iterable[str]) -> "SamplingFunction":
        return SamplingFunction({name: self[name] for name in names})

    def joint_support(self) -> list[tuple[Valuation, Fraction]]:
        """
        Product support with exact weights, in lexicographic order of the sorted variables.

        :return: list of (mu, weight)
        """
        if self._joint is None:
            names = list(self._dists)
            size = 1
            for dist in self._dists.values():
                size *= len(dist.support)
            if size > JOINT_SUPPORT_WARNING:
                logger.warning("joint sampling support has %d outcomes; condition checks enumerate all of them", size)
            joint = []
            for combo in itertools.product(*(self._dists[name].support for name in names)):
                weight = Fraction(1)
                for _, prob in combo:
                    weight *= prob
                joint.append((Valuation({name: value for name, (value, _) in zip(names, combo)}), weight))
            self._joint = joint
            running, cumulative = Fraction(0), []
            for _, weight in joint:
                running += weight
                cumulative.append(float(running))
            cumulative[-1] = 1.0
            self._joint_cumulative = cumulative
        return self._joint

    def draw(self, rng: RngStream) -> Valuation:
        """Draw a joint valuation from the product law; a single-outcome law consumes no randomness."""
        joint = self.joint_support()
        if len(joint) == 1:
            return joint[0][0]
        return joint[bisect.bisect_right(self._joint_cumulative, rng.random())][0]


def product_weight(sf: SamplingFunction, mu: Mapping[str, int]) -> Fraction:
    """
    Exact product of per-variable probabilities; 0 when some coordinate is off-support.

    :param sf: sampling function
    :param mu: valuation binding every sampling variable of ``sf``
    :return: Fraction
    """
    weight = Fraction(1)
    for name in sf:
        try:
            value = mu[name]
        except KeyError:
            raise ValuationError(f"sampling variable {name!r} is unbound") from None
        weight *= sf[name].probability(value)
    return weight
