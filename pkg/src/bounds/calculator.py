"""
Termination-time bounds from verified certificates.

Expected-time bounds and the Markov tail are exact rationals; the exponential
and square-root tails are evaluated in double precision.
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction

from src.certificates.certificate import Certificate, eval_cert
from src.core.extreal import ExtReal
from src.errors import BoundHypothesisError, OutsideValidityDomainError
from src.settings.constants import MAX_K_SEARCH, SMALLNESS_MARGIN
from src.simulation.semantics import StackElement

logger = logging.getLogger(__name__)


def _positive(name: str, value) -> Fraction:
    value = Fraction(value)
    if value <= 0:
        raise BoundHypothesisError(f"{name} must be positive, got {value}")
    return value


def upper_expected(h: Certificate, eps, entry: StackElement) -> ExtReal:
    """h(entry)/eps, the expected termination time bound of a ranking measure."""
    return eval_cert(h, entry) / _positive("eps", eps)


def lower_expected(h: Certificate, delta, entry: StackElement) -> ExtReal:
    """
    h(entry)/delta for a conditionally difference-bounded ranking measure.

    :raises BoundHypothesisError: h(entry) is infinite
    """
    value = eval_cert(h, entry)
    if value.is_infinite:
        raise BoundHypothesisError(f"h{entry!r} is infinite; the lower bound needs a finite value")
    return value / _positive("delta", delta)


def markov_tail(h: Certificate, eps, entry: StackElement, k: int) -> Fraction:
    """min(1, h(entry)/(eps*k)) as an exact rational."""
    if k < 1:
        raise BoundHypothesisError(f"k must be at least 1, got {k}")
    return markov_tail_value(eval_cert(h, entry), eps, k)


def markov_tail_value(h_entry: ExtReal, eps, k: int) -> Fraction:
    eps = _positive("eps", eps)
    if h_entry.is_infinite:
        return Fraction(1)
    return min(Fraction(1), h_entry.fraction / (eps * k))


@dataclass(frozen=True)
class ConcentrationBound:
    n: int
    exponent: Fraction
    value: float
    factored_exponent: Fraction
    factored_value: float


def concentration_tail(h: Certificate, eps, zeta, entry: StackElement, n: int) -> ConcentrationBound:
    """Exponential tail P(T > n) of a difference-bounded ranking measure."""
    return concentration_tail_value(eval_cert(h, entry), eps, zeta, n)


def concentration_tail_value(h_entry: ExtReal, eps, zeta, n: int) -> ConcentrationBound:
    """
    exp(-(eps*n - h)^2 / (2*n*(eps + zeta)^2)) together with the looser
    exp(eps*h/(eps + zeta)^2) * exp(-eps^2*n / (2*(eps + zeta)^2)).

    :raises OutsideValidityDomainError: n <= h/eps
    """
    eps, zeta = _positive("eps", eps), _positive("zeta", zeta)
    if h_entry.is_infinite:
        raise BoundHypothesisError("concentration needs a finite h at the entry")
    h_value = h_entry.fraction
    if n <= h_value / eps:
        raise OutsideValidityDomainError(f"n={n} is not above h/eps={h_value / eps}")
    scale = (eps + zeta) ** 2
    exponent = -((eps * n - h_value) ** 2) / (2 * n * scale)
    factored = eps * h_value / scale - eps**2 * n / (2 * scale)
    return ConcentrationBound(
        n=n,
        exponent=exponent,
        value=min(1.0, math.exp(exponent)),
        factored_exponent=factored,
        factored_value=min(1.0, math.exp(factored)) if factored < 700 else 1.0,
    )


def _cubic_remainder(x: float) -> float:
    """e^x - (1 + x + x^2/2) without cancellation for small x."""
    if x >= 0.5:
        return math.expm1(x) - x - x * x / 2
    term, total, j = x**3 / 6, 0.0, 3
    while term > 1e-300 and term > total * 1e-17:
        total += term
        j += 1
        term *= x / j
    return total


def smallness_holds(delta, zeta, k: int) -> bool:
    """e^(zeta*t) - (1 + zeta*t + (zeta*t)^2/2) <= (delta^2/4) t^2 at t = 1/sqrt(k)."""
    t = 1 / math.sqrt(k)
    lhs = _cubic_remainder(float(zeta) * t)
    rhs = float(delta) ** 2 / 4 * t * t
    return lhs * (1 + SMALLNESS_MARGIN) <= rhs


def minimal_valid_k(delta, zeta) -> int:
    """Smallest k >= 1 meeting the smallness condition; doubling, then bisection."""
    delta, zeta = _positive("delta", delta), _positive("zeta", zeta)
    if smallness_holds(delta, zeta, 1):
        return 1
    hi = 2
    while not smallness_holds(delta, zeta, hi):
        hi *= 2
        if hi > MAX_K_SEARCH:
            raise BoundHypothesisError(f"no k up to {MAX_K_SEARCH} satisfies the smallness condition")
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if smallness_holds(delta, zeta, mid):
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True)
class SqrtTail:
    k: int
    value: float | None
    minimal_k: int

    @property
    def valid(self) -> bool:
        return self.value is not None

    def __str__(self) -> str:
        if self.value is None:
            return f"k too small for this bound (needs k >= {self.minimal_k})"
        return f"{self.value:.6g}"


def sqrt_tail(h_entry: ExtReal, delta, zeta, K: int, k: int) -> SqrtTail:
    """
    P(T >= k) <= (1 - e^(-h/sqrt(k))) / (1 - (1 + delta^2/(4k))^(-floor(k/K))) for super-measures.

    :param h_entry: certificate value at the entry, finite and positive
    :param K: step bound from the label fixpoint; values below 1 are taken as 1
    :param k: threshold
    :return: SqrtTail, ``value`` is None when k is below the smallness threshold
    """
    h_entry = ExtReal(h_entry)
    if h_entry.is_infinite or h_entry == 0:
        raise BoundHypothesisError(f"the square-root tail needs h(entry) in (0, inf), got {h_entry}")
    delta, zeta = _positive("delta", delta), _positive("zeta", zeta)
    if k < 1:
        raise BoundHypothesisError(f"k must be at least 1, got {k}")
    threshold = minimal_valid_k(delta, zeta)
    if k < threshold:
        logger.warning("k=%d is below the smallness threshold %d", k, threshold)
        return SqrtTail(k, None, threshold)
    blocks = k // max(K, 1)
    if blocks == 0:
        return SqrtTail(k, 1.0, threshold)
    numerator = -math.expm1(-float(h_entry) / math.sqrt(k))
    denominator = -math.expm1(-blocks * math.log1p(float(delta) ** 2 / (4 * k)))
    return SqrtTail(k, min(1.0, numerator / denominator), threshold)
