from fractions import Fraction
from functools import total_ordering
from typing import Iterable

from src.errors import EvaluationError


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, str)):
        return Fraction(value)
    raise TypeError(f"cannot use {type(value).__name__} as an exact rational")


@total_ordering
class ExtReal:
    """
    Exact rational or +inf.

    Finite values may be negative while an expression is being evaluated;
    certificates reject negative results when they are read at a stack element.
    The conventions 0*inf = 0 and d*inf = inf for d > 0 hold; inf - inf and
    x - inf are errors.
    """

    __slots__ = ("_value",)

    def __init__(self, value=0):
        if isinstance(value, ExtReal):
            self._value = value._value
        elif value is None:
            self._value = None
        else:
            self._value = _as_fraction(value)

    @classmethod
    def parse(cls, text: str) -> "ExtReal":
        text = text.strip()
        if text in ("inf", "∞"):
            return INF
        try:
            return cls(Fraction(text))
        except ValueError as exc:
            raise EvaluationError(f"not an extended real: {text!r}") from exc

    @property
    def is_infinite(self) -> bool:
        return self._value is None

    @property
    def is_finite(self) -> bool:
        return self._value is not None

    @property
    def fraction(self) -> Fraction:
        if self._value is None:
            raise EvaluationError("infinite value has no rational representation")
        return self._value

    def __float__(self) -> float:
        return float("inf") if self._value is None else float(self._value)

    def __hash__(self) -> int:
        return hash(("inf",)) if self._value is None else hash(self._value)

    def __eq__(self, other) -> bool:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._value == other._value

    def __lt__(self, other) -> bool:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self._value is None:
            return False
        if other._value is None:
            return True
        return self._value < other._value

    def __add__(self, other) -> "ExtReal":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self._value is None or other._value is None:
            return INF
        return ExtReal(self._value + other._value)

    __radd__ = __add__

    def __sub__(self, other) -> "ExtReal":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other._value is None:
            raise EvaluationError("subtraction of infinity is undefined")
        if self._value is None:
            return INF
        return ExtReal(self._value - other._value)

    def __rsub__(self, other) -> "ExtReal":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __neg__(self) -> "ExtReal":
        if self._value is None:
            raise EvaluationError("negation of infinity is undefined")
        return ExtReal(-self._value)

    def __mul__(self, other) -> "ExtReal":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self._value is None or other._value is None:
            finite = other._value if self._value is None else self._value
            if finite is None or finite > 0:
                return INF
            if finite == 0:
                return ZERO
            raise EvaluationError("product of infinity with a negative number")
        return ExtReal(self._value * other._value)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "ExtReal":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other._value is None or other._value <= 0:
            raise EvaluationError("division is only defined by a positive finite number")
        if self._value is None:
            return INF
        return ExtReal(self._value / other._value)

    def __abs__(self) -> "ExtReal":
        return self if self._value is None else ExtReal(abs(self._value))

    def __repr__(self) -> str:
        return f"ExtReal({self})"

    def __str__(self) -> str:
        if self._value is None:
            return "inf"
        return str(self._value)


def _coerce(value):
    if isinstance(value, ExtReal):
        return value
    if isinstance(value, (int, Fraction)):
        return ExtReal(value)
    return NotImplemented


INF = ExtReal(None)
ZERO = ExtReal(0)


def extreal_sum_weighted(terms: Iterable[tuple[Fraction, ExtReal]]) -> ExtReal:
    """
    Exact weighted sum with 0*inf = 0 and w*inf = inf for w > 0.

    :param terms: pairs of nonnegative rational weight and value
    :return: ExtReal
    """
    total = Fraction(0)
    for weight, value in terms:
        if weight < 0:
            raise EvaluationError(f"negative weight {weight}")
        if weight == 0:
            continue
        value = _coerce(value)
        if value.is_infinite:
            return INF
        total += weight * value.fraction
    return ExtReal(total)
