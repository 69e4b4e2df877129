"""
Symbolic instrument moment matrices.

Block (a, x) has entries chi[i, j] = tr[I_{a|x}(rho) S_j^dagger S_i] over the
monomial basis S. Each entry is an affine (here: linear) expression over a
shared real variable vector:

- one real variable per self-adjoint word class {w}
- a real and an imaginary variable per class {w, w^dagger} otherwise
- nothing for entries whose word reduces to zero

Blocks never share variables with each other.
"""

from __future__ import annotations

from collections.abc import Hashable, Mapping
from dataclasses import dataclass
from typing import Literal

import numpy as np

from qtemporal.algebra.basis import MonomialBasis, build_basis, generators_for
from qtemporal.algebra.words import IDENTITY, Generator, OperatorWord, adjoint, multiply, word_class
from qtemporal.core.errors import InvalidScenarioError
from qtemporal.moment.scenario import Scenario

# Sparse linear form: variable id -> coefficient.
LinearForm = dict[int, complex]


@dataclass(frozen=True)
class WordVariable:
    word: OperatorWord
    real: int
    imag: int | None = None

    @property
    def ids(self) -> tuple[int, ...]:
        return (self.real,) if self.imag is None else (self.real, self.imag)


@dataclass(frozen=True, eq=False)
class MomentBlock:
    label: Hashable
    basis: MonomialBasis
    entry_words: tuple[tuple[OperatorWord, ...], ...]
    variables: Mapping[OperatorWord, WordVariable]
    positions: Mapping[OperatorWord, tuple[int, int]]

    @property
    def size(self) -> int:
        return len(self.basis)

    @property
    def var_ids(self) -> tuple[int, ...]:
        return tuple(vid for var in self.variables.values() for vid in var.ids)

    @property
    def n_vars(self) -> int:
        return len(self.var_ids)

    def has_word(self, word: OperatorWord) -> bool:
        return word.is_zero or word_class(word) in self.variables

    def word_expr(self, word: OperatorWord) -> LinearForm:
        """tr[state * word] as a complex-linear form in the block variables."""
        if word.is_zero:
            return {}
        rep = word_class(word)
        try:
            var = self.variables[rep]
        except KeyError as exc:
            raise InvalidScenarioError(
                f"Word '{word}' is not an entry of block {self.label} at level {self.basis.level}"
            ) from exc
        if var.imag is None:
            return {var.real: 1.0}
        return {var.real: 1.0, var.imag: 1j if word == rep else -1j}

    def entry_expr(self, row: int, col: int) -> LinearForm:
        return self.word_expr(self.entry_words[row][col])

    def coefficient_matrices(self) -> tuple[np.ndarray, np.ndarray]:
        """
        Returns (var_ids, F) with block = sum_k x[var_ids[k]] * F[k]; every F[k] Hermitian.
        """
        ids = self.var_ids
        local = {vid: k for k, vid in enumerate(ids)}
        coefficients = np.zeros((len(ids), self.size, self.size), dtype=complex)
        for i in range(self.size):
            for j in range(self.size):
                for vid, coef in self.entry_expr(i, j).items():
                    coefficients[local[vid], i, j] += coef
        return np.asarray(ids, dtype=int), coefficients

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        ids, coefficients = self.coefficient_matrices()
        return np.einsum("k,kij->ij", np.asarray(x)[ids], coefficients)

    def values_from(self, matrix: np.ndarray) -> dict[int, float]:
        """Variable assignment reproducing a numeric moment matrix."""
        values: dict[int, float] = {}
        for rep, var in self.variables.items():
            entry = complex(matrix[self.positions[rep]])
            values[var.real] = entry.real
            if var.imag is not None:
                values[var.imag] = entry.imag
        return values

    def symbolic(self) -> list[list[str]]:
        names = {}
        for rep, var in self.variables.items():
            names[rep] = f"v{var.real}" if var.imag is None else f"(v{var.real}+i*v{var.imag})"
        table: list[list[str]] = []
        for row in self.entry_words:
            cells = []
            for word in row:
                if word.is_zero:
                    cells.append("0")
                    continue
                rep = word_class(word)
                cells.append(names[rep] if word == rep else f"conj{names[rep]}")
            table.append(cells)
        return table


def symbolic_block(basis: MonomialBasis, label: Hashable, first_var: int) -> MomentBlock:
    entry_words = tuple(
        tuple(multiply(adjoint(s_j), s_i) for s_j in basis.words) for s_i in basis.words
    )

    positions: dict[OperatorWord, tuple[int, int]] = {}
    for i, row in enumerate(entry_words):
        for j, word in enumerate(row):
            if not word.is_zero and word_class(word) == word:
                positions.setdefault(word, (i, j))

    variables: dict[OperatorWord, WordVariable] = {}
    next_id = first_var
    for rep in sorted(positions, key=lambda w: w.sort_key):
        if rep.is_self_adjoint:
            variables[rep] = WordVariable(rep, next_id)
            next_id += 1
        else:
            variables[rep] = WordVariable(rep, next_id, next_id + 1)
            next_id += 2

    return MomentBlock(
        label=label,
        basis=basis,
        entry_words=entry_words,
        variables=variables,
        positions=positions,
    )


@dataclass(frozen=True)
class EntryRef:
    block: tuple[int, int]
    row: int
    col: int


@dataclass(frozen=True)
class Binding:
    role: Literal["marginal", "joint", "unknown", "zero"]
    a: int
    x: int
    b: int | None = None
    y: int | None = None


@dataclass(frozen=True, eq=False)
class MomentModel:
    scenario: Scenario
    basis: MonomialBasis
    blocks: tuple[MomentBlock, ...]

    @property
    def n_vars(self) -> int:
        return sum(block.n_vars for block in self.blocks)

    @property
    def level(self) -> int:
        return self.basis.level

    def block(self, a: int, x: int) -> MomentBlock:
        if not (0 <= a < self.scenario.nA and 0 <= x < self.scenario.nX):
            raise InvalidScenarioError(f"No moment block for (a, x) = ({a}, {x})")
        return self.blocks[x * self.scenario.nA + a]

    def binding(self, ref: EntryRef) -> Binding:
        a, x = ref.block
        word = self.block(a, x).entry_words[ref.row][ref.col]
        if word.is_zero:
            return Binding("zero", a, x)
        if word.is_identity:
            return Binding("marginal", a, x)
        if len(word) == 1:
            letter = word.letters[0]
            return Binding("joint", a, x, letter.outcome, letter.setting)
        return Binding("unknown", a, x)

    def marginal_expr(self, a: int, x: int) -> dict[int, float]:
        """P(a|x) as a linear form."""
        return _real_form(self.block(a, x).word_expr(IDENTITY))

    def probability_expr(self, a: int, b: int, x: int, y: int) -> dict[int, float]:
        """P(a,b|x,y); the last outcome is P(a|x) minus the others."""
        scenario = self.scenario
        if not (0 <= b < scenario.nB and 0 <= y < scenario.nY):
            raise InvalidScenarioError(f"No probability P({a},{b}|{x},{y}) in {scenario.shape}")
        block = self.block(a, x)
        if b < scenario.nB - 1:
            return _real_form(block.word_expr(_letter(b, y, scenario.nB)))

        form = self.marginal_expr(a, x)
        for other in range(scenario.nB - 1):
            for vid, coef in _real_form(block.word_expr(_letter(other, y, scenario.nB))).items():
                form[vid] = form.get(vid, 0.0) - coef
        return form

    def vector_from(self, moments: Mapping[tuple[int, int], np.ndarray]) -> np.ndarray:
        """Stacked variable vector of numeric moment blocks keyed by (a, x)."""
        vector = np.zeros(self.n_vars)
        for block in self.blocks:
            for vid, value in block.values_from(moments[block.label]).items():
                vector[vid] = value
        return vector


def _letter(b: int, y: int, n_outcomes: int) -> OperatorWord:
    return OperatorWord((Generator(outcome=b, setting=y, n_outcomes=n_outcomes),))


def _real_form(form: LinearForm) -> dict[int, float]:
    # Probabilities are self-adjoint words: every coefficient is real.
    return {vid: float(np.real(coef)) for vid, coef in form.items()}


def build_model(scenario: Scenario, level: int) -> MomentModel:
    basis = build_basis(generators_for(scenario.nB, scenario.nY), level)

    blocks: list[MomentBlock] = []
    next_id = 0
    for label in scenario.block_labels:
        block = symbolic_block(basis, label, next_id)
        blocks.append(block)
        next_id += block.n_vars

    return MomentModel(scenario=scenario, basis=basis, blocks=tuple(blocks))
