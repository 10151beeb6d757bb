"""Control-flow graphs: labelled transition relations per function."""
from dataclasses import dataclass, field
from typing import Callable, Mapping, Union

from src.core.valuation import Valuation
from src.language.ast import Expr, Pred, expr_variables
from src.language.evaluate import compile_expr, compile_pred
from src.language.printer import format_expr, format_pred
from src.models import Branch, LabelKind


@dataclass(frozen=True)
class Update:
    """Assignment payload ``var := expr``; ``var is None`` is the identity update of ``skip``."""

    var: str | None = None
    expr: Expr | None = None
    _fn: Callable = field(init=False, repr=False, compare=False)
    _names: frozenset = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_fn", compile_expr(self.expr) if self.expr is not None else None)
        names = frozenset(expr_variables(self.expr)) if self.expr is not None else frozenset()
        object.__setattr__(self, "_names", names)

    def __reduce__(self):
        return Update, (self.var, self.expr)

    @property
    def is_identity(self) -> bool:
        return self.var is None

    def uses(self, names) -> bool:
        return not self._names.isdisjoint(names)

    def apply(self, nu: Mapping[str, int], mu: Mapping[str, int]) -> dict[str, int]:
        """
        u(nu, mu): new program valuation after the update.

        :param nu: program variable valuation
        :param mu: sampling valuation of this step
        :return: dict of program variables
        """
        result = dict(nu)
        if self.var is not None:
            env = {**nu, **mu} if mu and not self._names.isdisjoint(mu) else nu
            result[self.var] = int(self._fn(env))
        return result

    def describe(self) -> str:
        return "id" if self.var is None else f"{self.var} := {format_expr(self.expr)}"


@dataclass(frozen=True)
class Guard:
    pred: Pred
    _test: Callable = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_test", compile_pred(self.pred))

    def __reduce__(self):
        return Guard, (self.pred,)

    def holds(self, nu: Mapping[str, int]) -> bool:
        return bool(self._test(nu))

    def describe(self) -> str:
        return format_pred(self.pred)


@dataclass(frozen=True)
class CallSpec:
    """Call payload ``callee(args)`` with the callee's signature for value passing."""

    callee: str
    args: tuple[Expr, ...]
    params: tuple[str, ...]
    variables: tuple[str, ...]
    _arg_fns: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_arg_fns", tuple(compile_expr(arg) for arg in self.args))

    def __reduce__(self):
        return CallSpec, (self.callee, self.args, self.params, self.variables)

    def bind(self, nu: Mapping[str, int]) -> dict[str, int]:
        callee_nu = dict.fromkeys(self.variables, 0)
        for param, fn in zip(self.params, self._arg_fns):
            callee_nu[param] = int(fn(nu))
        return callee_nu

    def describe(self) -> str:
        return f"call {self.callee}({', '.join(format_expr(a) for a in self.args)})"


@dataclass(frozen=True)
class Star:
    branch: Branch

    def describe(self) -> str:
        return f"star[{self.branch.value}]"


Payload = Union[Update, Guard, CallSpec, Star]


@dataclass(frozen=True)
class Transition:
    source: int
    payload: Payload
    target: int

    def describe(self) -> str:
        return f"({self.source}, {self.payload.describe()}, {self.target})"


def value_passing(call: CallSpec, nu: Mapping[str, int]) -> Valuation:
    """
    Callee valuation: parameters bound to the argument values, every other callee variable 0.

    :param call: call payload
    :param nu: caller valuation
    :return: Valuation over pvars(callee)
    """
    return Valuation(call.bind(nu))


@dataclass(frozen=True)
class FunctionCfg:
    name: str
    params: tuple[str, ...]
    variables: tuple[str, ...]
    entry: int
    terminal: int
    kinds: Mapping[int, LabelKind]
    transitions: tuple[Transition, ...]
    _outgoing: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        outgoing: dict[int, list[Transition]] = {label: [] for label in self.kinds}
        for transition in self.transitions:
            outgoing[transition.source].append(transition)
        object.__setattr__(self, "_outgoing", {label: tuple(ts) for label, ts in outgoing.items()})

    @property
    def labels(self) -> list[int]:
        return sorted(self.kinds)

    def kind(self, label: int) -> LabelKind:
        return self.kinds[label]

    def outgoing(self, label: int) -> tuple[Transition, ...]:
        return self._outgoing[label]

    def successors(self, label: int) -> tuple[int, ...]:
        return tuple(t.target for t in self._outgoing[label])

    def reachable_labels(self) -> set[int]:
        seen, frontier = {self.entry}, [self.entry]
        while frontier:
            for target in self.successors(frontier.pop()):
                if target not in seen:
                    seen.add(target)
                    frontier.append(target)
        return seen

    def zero_valuation(self) -> Valuation:
        return Valuation.zero(self.variables)


@dataclass(frozen=True)
class Cfg:
    functions: Mapping[str, FunctionCfg]
    sampling: tuple[str, ...] = ()

    def __getitem__(self, name: str) -> FunctionCfg:
        return self.functions[name]

    def __contains__(self, name: str) -> bool:
        return name in self.functions

    @property
    def function_names(self) -> list[str]:
        return sorted(self.functions)

    def label_pairs(self) -> list[tuple[str, int]]:
        """All (function, label) pairs, functions sorted by name, labels ascending."""
        return [(name, label) for name in self.function_names for label in self.functions[name].labels]

    def kind(self, fname: str, label: int) -> LabelKind:
        return self.functions[fname].kind(label)

    def is_terminal(self, fname: str, label: int) -> bool:
        return self.functions[fname].terminal == label

    @property
    def total_labels(self) -> int:
        return sum(len(fn.kinds) for fn in self.functions.values())
