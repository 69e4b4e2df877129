"""
Words over projector symbols E_{b|y}.

Letters are projectors of a projective measurement, so two rewrite rules
fully determine the canonical form:
- E_{b|y} E_{b|y} -> E_{b|y}            (idempotence)
- E_{b|y} E_{b'|y} -> 0   for b != b'   (orthogonality)
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass, field


@dataclass(frozen=True)
class Generator:
    outcome: int
    setting: int
    # Outcome count of the measurement; the last outcome is never a letter.
    n_outcomes: int | None = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        if self.outcome < 0 or self.setting < 0:
            raise ValueError(
                f"Generator indices must be non-negative, got E_{{{self.outcome}|{self.setting}}}"
            )
        if self.n_outcomes is not None and self.outcome >= self.n_outcomes - 1:
            raise ValueError(
                f"E_{{{self.outcome}|{self.setting}}} is not a generator for {self.n_outcomes} outcomes; "
                f"the last outcome is the complement of the others"
            )

    @property
    def sort_key(self) -> tuple[int, int]:
        return (self.setting, self.outcome)

    def __str__(self) -> str:
        return f"E{self.outcome}|{self.setting}"


@dataclass(frozen=True)
class OperatorWord:
    letters: tuple[Generator, ...] = ()
    is_zero: bool = False

    @property
    def is_identity(self) -> bool:
        return not self.is_zero and not self.letters

    @property
    def is_self_adjoint(self) -> bool:
        return self.is_zero or self.letters == self.letters[::-1]

    @property
    def sort_key(self) -> tuple[int, tuple[tuple[int, int], ...]]:
        # Graded first, then lexicographic by (setting, outcome).
        return (len(self.letters), tuple(letter.sort_key for letter in self.letters))

    def __len__(self) -> int:
        return len(self.letters)

    def __mul__(self, other: OperatorWord) -> OperatorWord:
        return multiply(self, other)

    def adjoint(self) -> OperatorWord:
        return adjoint(self)

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        if not self.letters:
            return "1"
        return " ".join(str(letter) for letter in self.letters)


ZERO = OperatorWord(is_zero=True)
IDENTITY = OperatorWord()


def reduce_letters(letters: Iterable[Generator]) -> OperatorWord:
    """
    Canonical reduction of a raw letter sequence.

    Single left-to-right pass with a stack; collapsing drops the incoming
    letter, so no new adjacent pair is ever created behind the top.
    """
    stack: list[Generator] = []
    for letter in letters:
        if stack and stack[-1].setting == letter.setting:
            if stack[-1].outcome == letter.outcome:
                continue
            return ZERO
        stack.append(letter)
    return OperatorWord(letters=tuple(stack))


def multiply(left: OperatorWord, right: OperatorWord) -> OperatorWord:
    if left.is_zero or right.is_zero:
        return ZERO
    return reduce_letters(left.letters + right.letters)


def adjoint(word: OperatorWord) -> OperatorWord:
    if word.is_zero:
        return ZERO
    return reduce_letters(reversed(word.letters))


def word_class(word: OperatorWord) -> OperatorWord:
    """Representative of {w, w^dagger}: the one with the smaller sort key."""
    partner = adjoint(word)
    return word if word.sort_key <= partner.sort_key else partner
