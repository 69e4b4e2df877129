from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass, field

from qtemporal.algebra.words import IDENTITY, Generator, OperatorWord, multiply


@dataclass(frozen=True)
class MonomialBasis:
    level: int
    words: tuple[OperatorWord, ...]
    _positions: dict[OperatorWord, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "_positions", {word: idx for idx, word in enumerate(self.words)}
        )

    def __len__(self) -> int:
        return len(self.words)

    def __iter__(self):
        return iter(self.words)

    def index(self, word: OperatorWord) -> int:
        return self._positions[word]

    @property
    def generators(self) -> tuple[Generator, ...]:
        return tuple(word.letters[0] for word in self.words if len(word) == 1)


def generators_for(n_outcomes: int, n_settings: int) -> tuple[Generator, ...]:
    """Generators E_{b|y} with b < n_outcomes - 1, ordered by (y, b)."""
    if n_outcomes < 2 or n_settings < 1:
        raise ValueError(
            f"Need at least 2 outcomes and 1 setting, got ({n_outcomes}, {n_settings})"
        )
    return tuple(
        Generator(outcome=b, setting=y, n_outcomes=n_outcomes)
        for y in range(n_settings)
        for b in range(n_outcomes - 1)
    )


def build_basis(generators: Iterable[Generator], level: int) -> MonomialBasis:
    """
    All canonical nonzero words of length <= level, identity first.

    Args:
        generators: the admitted projector symbols.
        level: hierarchy level, at least 1.

    Returns:
        MonomialBasis in graded-lexicographic order.
    """
    if level < 1:
        raise ValueError(f"Hierarchy level must be >= 1, got {level}")

    letters = sorted(set(generators), key=lambda g: g.sort_key)
    if not letters:
        raise ValueError("Generator set must not be empty")

    words: set[OperatorWord] = {IDENTITY}
    frontier: set[OperatorWord] = {IDENTITY}
    for length in range(1, level + 1):
        grown: set[OperatorWord] = set()
        for word in frontier:
            for letter in letters:
                candidate = multiply(word, OperatorWord(letters=(letter,)))
                if not candidate.is_zero and len(candidate) == length:
                    grown.add(candidate)
        words |= grown
        frontier = grown

    ordered = tuple(sorted(words, key=lambda w: w.sort_key))
    return MonomialBasis(level=level, words=ordered)
