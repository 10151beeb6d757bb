from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

from src.certificates.certificate import VerifyBox
from src.core.extreal import ExtReal
from src.core.valuation import Valuation
from src.models import CertKind


@dataclass(frozen=True)
class Counterexample:
    condition: str
    fname: str
    label: int
    valuation: Valuation
    lhs: ExtReal
    relation: str
    rhs: ExtReal
    description: str = ""

    def __str__(self) -> str:
        return (
            f"{self.condition} fails at ({self.fname}, {self.label}, {self.valuation!r}): "
            f"{self.lhs} {self.relation} {self.rhs} does not hold"
            + (f" [{self.description}]" if self.description else "")
        )

    def as_dict(self) -> dict:
        return {
            "condition": self.condition,
            "function": self.fname,
            "label": self.label,
            "valuation": self.valuation.as_dict(),
            "lhs": str(self.lhs),
            "relation": self.relation,
            "rhs": str(self.rhs),
            "description": self.description,
        }


@dataclass
class CheckReport:
    kind: CertKind
    params: dict[str, Fraction | None]
    box: VerifyBox
    points: int = 0
    checked: Counter = field(default_factory=Counter)
    failed: Counter = field(default_factory=Counter)
    counterexample: Counterexample | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not sum(self.failed.values())

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def record(self, condition: str, holds: bool, counterexample) -> None:
        """
        Count one condition instance; ``counterexample`` is a thunk only called on the first failure.
        """
        self.checked[condition] += 1
        if not holds:
            self.failed[condition] += 1
            if self.counterexample is None:
                self.counterexample = counterexample()

    def merge(self, other: "CheckReport") -> "CheckReport":
        """Combine with a report for later points; the earlier counterexample wins."""
        self.points += other.points
        self.checked.update(other.checked)
        self.failed.update(other.failed)
        if self.counterexample is None:
            self.counterexample = other.counterexample
        self.notes.extend(note for note in other.notes if note not in self.notes)
        return self

    def conditions(self) -> list[tuple[str, int, int]]:
        """(condition, instances checked, instances failed) in condition order."""
        return [(name, self.checked[name], self.failed[name]) for name in sorted(self.checked, key=_condition_key)]


def _condition_key(name: str):
    head = name.split("(")[0].split("*")[0]
    digits = "".join(ch for ch in head if ch.isdigit())
    return head[0], int(digits or 0), name
