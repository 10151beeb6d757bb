"""Piecewise certificates h: (function, label, valuation) -> [0, inf]."""
import hashlib
import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cache
from typing import Callable, Iterator, Mapping

import pyparsing as pp

from src.cfg.graph import Cfg
from src.core.extreal import INF, ExtReal
from src.core.valuation import Valuation
from src.errors import CertificateFormatError, EvaluationError, ParseError, VerifyBoxError
from src.language.ast import Expr, Pred
from src.language.evaluate import compile_ext, compile_pred
from src.language.parser import IDENTIFIER, expression_grammar, predicate_grammar
from src.language.printer import format_expr, format_number, format_pred


@dataclass(frozen=True)
class Piece:
    """``[guard] expr``; a missing guard matches every valuation."""

    guard: Pred | None
    expr: Expr
    _test: Callable | None = field(init=False, repr=False, compare=False)
    _value: Callable = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_test", compile_pred(self.guard) if self.guard is not None else None)
        object.__setattr__(self, "_value", compile_ext(self.expr))

    def __reduce__(self):
        return Piece, (self.guard, self.expr)

    def matches(self, nu: Mapping[str, int]) -> bool:
        return self._test is None or bool(self._test(nu))

    def value(self, nu: Mapping[str, int]) -> ExtReal:
        return self._value(nu)

    def describe(self) -> str:
        body = format_expr(self.expr)
        return body if self.guard is None else f"[{format_pred(self.guard)}] {body}"


@dataclass(frozen=True)
class CertParams:
    eps: Fraction | None = None
    delta: Fraction | None = None
    zeta: Fraction | None = None

    def __post_init__(self):
        for name in ("eps", "delta", "zeta"):
            value = getattr(self, name)
            if value is not None and value <= 0:
                raise CertificateFormatError(f"{name} must be positive, got {value}")
        if self.eps is not None and self.delta is not None and self.eps > self.delta:
            raise CertificateFormatError(f"eps={self.eps} exceeds delta={self.delta}; the decrease conditions are unsatisfiable")

    def merged(self, **overrides) -> "CertParams":
        values = {"eps": self.eps, "delta": self.delta, "zeta": self.zeta}
        values.update({key: Fraction(value) for key, value in overrides.items() if value is not None})
        return CertParams(**values)

    def as_dict(self) -> dict[str, Fraction | None]:
        return {"eps": self.eps, "delta": self.delta, "zeta": self.zeta}


@dataclass(frozen=True)
class Certificate:
    coordinates: Mapping[tuple[str, int], tuple[Piece, ...]]
    params: CertParams = CertParams()

    def evaluate(self, fname: str, label: int, nu: Mapping[str, int]) -> ExtReal:
        """
        First matching piece at (fname, label), inf when no piece matches.

        :raises CertificateFormatError: unknown coordinate or negative value
        """
        try:
            pieces = self.coordinates[(fname, label)]
        except KeyError:
            raise CertificateFormatError(f"certificate has no coordinate for ({fname}, {label})") from None
        for piece in pieces:
            if piece.matches(nu):
                try:
                    value = piece.value(nu)
                except EvaluationError as exc:
                    raise CertificateFormatError(f"cannot evaluate ({fname}, {label}) at {dict(nu)}: {exc}") from exc
                if value < 0:
                    raise CertificateFormatError(f"negative value {value} at ({fname}, {label}, {dict(nu)})")
                return value
        return INF

    def bind(self, cfg: Cfg) -> "Certificate":
        """Check that every label of ``cfg`` has a coordinate and no coordinate is foreign to it."""
        missing = [pair for pair in cfg.label_pairs() if pair not in self.coordinates]
        if missing:
            fname, label = missing[0]
            raise CertificateFormatError(f"certificate has no coordinate for ({fname}, {label})")
        extra = sorted(pair for pair in self.coordinates if pair[0] not in cfg or pair[1] not in cfg[pair[0]].kinds)
        if extra:
            raise CertificateFormatError(f"certificate coordinate {extra[0]} is not a label of the program")
        return self

    def canonical_text(self) -> str:
        lines = []
        header = " ".join(f"{k}={format_number(v)}" for k, v in self.params.as_dict().items() if v is not None)
        if header:
            lines.append(header)
        for fname, label in sorted(self.coordinates):
            pieces = " ; ".join(piece.describe() for piece in self.coordinates[(fname, label)])
            lines.append(f"{fname}@{label}: {pieces}")
        return "\n".join(lines) + "\n"

    def digest(self) -> str:
        return hashlib.sha256(self.canonical_text().encode("utf-8")).hexdigest()


def eval_cert(h: Certificate, c) -> ExtReal:
    """h(c) for a stack element ``c``."""
    return h.evaluate(c.fname, c.label, c.valuation)


@cache
def certificate_grammar() -> pp.ParserElement:
    number = pp.Regex(r"\d+/\d+|\d+\.\d+|\d+").set_parse_action(lambda t: Fraction(t[0]))
    param = pp.Group(pp.one_of("eps delta zeta") + pp.Suppress("=") + number)
    guard = pp.Suppress("[") + predicate_grammar(certificate=True) + pp.Suppress("]")
    piece = pp.Group(pp.Group(pp.Opt(guard)) + expression_grammar(certificate=True))
    integer = pp.Regex(r"\d+").set_parse_action(lambda t: int(t[0]))
    stanza = pp.Group(
        IDENTIFIER + pp.Suppress("@") + integer + pp.Suppress(":")
        + pp.Group(pp.DelimitedList(piece, ";", allow_trailing_delim=True))
    )
    grammar = pp.Group(pp.ZeroOrMore(param)) + pp.Group(pp.ZeroOrMore(stanza))
    grammar.ignore(pp.python_style_comment)
    return grammar


def parse_certificate(text: str) -> Certificate:
    """
    Read a certificate file.

    The optional header holds ``eps=``, ``delta=`` and ``zeta=``; each stanza
    ``f@3: [n >= 1] 12*n - 6 ; [n <= 0] inf`` lists guarded pieces, first match wins.

    :param text: file contents
    :return: Certificate
    """
    try:
        params_raw, stanzas = certificate_grammar().parse_string(text, parse_all=True)
    except pp.ParseBaseException as exc:
        raise ParseError(exc.msg, exc.lineno, exc.col) from None
    params = {}
    for name, value in params_raw:
        if name in params:
            raise CertificateFormatError(f"parameter {name} given twice")
        params[name] = value
    coordinates = {}
    for fname, label, pieces in stanzas:
        key = (fname, label)
        if key in coordinates:
            raise CertificateFormatError(f"coordinate ({fname}, {label}) defined twice")
        coordinates[key] = tuple(Piece(guard[0] if len(guard) else None, expr) for guard, expr in pieces)
    return Certificate(coordinates, CertParams(**params))


_BOX_ITEM = re.compile(r"^\s*([A-Za-z][A-Za-z0-9_]*)\s*=\s*(-?\d+)\s*(?:\.\.\s*(-?\d+))?\s*$")


@dataclass(frozen=True)
class VerifyBox:
    """Inclusive integer interval per program variable."""

    bounds: Mapping[str, tuple[int, int]]

    def __post_init__(self):
        if not self.bounds:
            raise VerifyBoxError("verification box is empty")
        for name, (lo, hi) in self.bounds.items():
            if lo > hi:
                raise VerifyBoxError(f"empty interval for {name}: {lo}..{hi}")
        object.__setattr__(self, "bounds", dict(sorted(self.bounds.items())))

    @classmethod
    def parse(cls, text: str) -> "VerifyBox":
        """``n=-100..100,c=0..1``; a single value ``i=0`` is a one-point interval."""
        bounds = {}
        for item in filter(None, (part.strip() for part in text.split(","))):
            match = _BOX_ITEM.match(item)
            if not match:
                raise VerifyBoxError(f"cannot read box item {item!r}, expected name=lo..hi")
            name, lo, hi = match.group(1), int(match.group(2)), match.group(3)
            bounds[name] = (lo, int(hi) if hi is not None else lo)
        return cls(bounds)

    def size(self, variables) -> int:
        total = 1
        for name in sorted(variables):
            lo, hi = self._interval(name)
            total *= hi - lo + 1
        return total

    def _interval(self, name: str) -> tuple[int, int]:
        try:
            return self.bounds[name]
        except KeyError:
            raise VerifyBoxError(f"verification box does not bound variable {name!r}") from None

    def points(self, variables) -> Iterator[Valuation]:
        """Valuations over ``variables``, lexicographic in sorted variable order."""
        names = sorted(variables)
        ranges = [range(lo, hi + 1) for lo, hi in (self._interval(name) for name in names)]
        for values in itertools.product(*ranges):
            yield Valuation(zip(names, values))

    def __str__(self) -> str:
        return ",".join(f"{name}={lo}..{hi}" for name, (lo, hi) in self.bounds.items())
