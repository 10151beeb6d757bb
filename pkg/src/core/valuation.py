from collections.abc import Iterable, Mapping

from src.errors import ValuationError


class Valuation(Mapping):
    """
    Immutable total map from variable names to integers.

    Lookups of names outside the declared variable set raise ValuationError.
    """

    __slots__ = ("_bindings", "_hash")

    def __init__(self, bindings: Mapping[str, int] | Iterable[tuple[str, int]] = ()):
        self._bindings = {name: int(value) for name, value in dict(bindings).items()}
        self._hash = None

    @classmethod
    def zero(cls, names: Iterable[str]) -> "Valuation":
        return cls({name: 0 for name in names})

    def __getitem__(self, name: str) -> int:
        try:
            return self._bindings[name]
        except KeyError:
            raise ValuationError(f"variable {name!r} is not declared in {self!r}") from None

    def __iter__(self):
        return iter(self._bindings)

    def __len__(self) -> int:
        return len(self._bindings)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._bindings.items()))
        return self._hash

    def __eq__(self, other) -> bool:
        if isinstance(other, Valuation):
            return self._bindings == other._bindings
        if isinstance(other, Mapping):
            return self._bindings == dict(other)
        return NotImplemented

    def __repr__(self) -> str:
        inner = ", ".join(f"{name}={self._bindings[name]}" for name in sorted(self._bindings))
        return "{" + inner + "}"

    @property
    def variables(self) -> frozenset[str]:
        return frozenset(self._bindings)

    def updated(self, changes: Mapping[str, int]) -> "Valuation":
        """
        Return a copy with some bindings replaced; every changed name must already be declared.

        :param changes: new values
        :return: Valuation
        """
        unknown = set(changes) - self._bindings.keys()
        if unknown:
            raise ValuationError(f"variables {sorted(unknown)} are not declared in {self!r}")
        merged = dict(self._bindings)
        merged.update(changes)
        return Valuation(merged)

    def as_dict(self) -> dict[str, int]:
        return dict(self._bindings)
