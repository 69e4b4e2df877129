"""
Explicit finite-dimensional realizations and the Born-rule oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from qtemporal.algebra.basis import MonomialBasis
from qtemporal.algebra.words import OperatorWord
from qtemporal.core.errors import InvalidRealizationError
from qtemporal.core.tolerances import RANK_TOL, REALIZATION_TOL
from qtemporal.moment.model import MomentModel
from qtemporal.moment.scenario import CorrelationTable, Scenario
from qtemporal.realizations.linalg import dagger, min_eigenvalue, numeric_rank

KrausList = tuple[np.ndarray, ...]


@dataclass(frozen=True, eq=False)
class Realization:
    scenario: Scenario
    state: np.ndarray
    # instruments[x][a] = Kraus operators of the composed map I_{a|x}
    instruments: tuple[tuple[KrausList, ...], ...]
    # povms[y][b] = E_{b|y}
    povms: tuple[tuple[np.ndarray, ...], ...]
    # required rank of every POVM element, None when unconstrained
    rank: int | None = None

    @property
    def dim(self) -> int:
        return int(self.state.shape[0])

    def validate(self, tol: float = REALIZATION_TOL) -> None:
        scenario = self.scenario
        d = self.dim
        identity = np.eye(d)

        if self.state.shape != (d, d):
            raise InvalidRealizationError(f"State must be square, got {self.state.shape}")
        if abs(np.trace(self.state) - 1.0) > tol or min_eigenvalue(self.state) < -tol:
            raise InvalidRealizationError("State must be PSD with unit trace")
        if np.max(np.abs(self.state - dagger(self.state))) > tol:
            raise InvalidRealizationError("State must be Hermitian")

        if len(self.instruments) != scenario.nX or any(len(inst) != scenario.nA for inst in self.instruments):
            raise InvalidRealizationError(f"Need {scenario.nX} instruments with {scenario.nA} outcomes each")
        for x, instrument in enumerate(self.instruments):
            total = sum(dagger(k) @ k for kraus in instrument for k in kraus)
            if np.max(np.abs(total - identity)) > tol:
                raise InvalidRealizationError(f"Instrument {x} is not trace preserving")

        if len(self.povms) != scenario.nY or any(len(povm) != scenario.nB for povm in self.povms):
            raise InvalidRealizationError(f"Need {scenario.nY} POVMs with {scenario.nB} outcomes each")
        for y, povm in enumerate(self.povms):
            if np.max(np.abs(np.sum(povm, axis=0) - identity)) > tol:
                raise InvalidRealizationError(f"POVM {y} does not sum to identity")
            for b, element in enumerate(povm):
                if min_eigenvalue(element) < -tol:
                    raise InvalidRealizationError(f"E_{{{b}|{y}}} is not PSD")
                if self.rank is not None and numeric_rank(element, RANK_TOL) != self.rank:
                    raise InvalidRealizationError(f"E_{{{b}|{y}}} does not have rank {self.rank}")

    def post_measurement(self, a: int, x: int) -> np.ndarray:
        """Unnormalized state I_{a|x}(rho)."""
        return sum(k @ self.state @ dagger(k) for k in self.instruments[x][a])

    def word_operator(self, word: OperatorWord) -> np.ndarray:
        operator = np.eye(self.dim, dtype=complex)
        if word.is_zero:
            return 0.0 * operator
        for letter in word.letters:
            operator = operator @ self.povms[letter.setting][letter.outcome]
        return operator


def born_probabilities(realization: Realization) -> CorrelationTable:
    """P(a,b|x,y) = tr[E_{b|y} I_{a|x}(rho)]."""
    scenario = realization.scenario
    values = np.zeros(scenario.shape)
    for a, x in scenario.block_labels:
        post = realization.post_measurement(a, x)
        for y, povm in enumerate(realization.povms):
            for b, element in enumerate(povm):
                values[a, b, x, y] = np.trace(element @ post).real
    return CorrelationTable(scenario, values)


def numeric_moments(
    realization: Realization, basis: MonomialBasis
) -> dict[tuple[int, int], np.ndarray]:
    """chi_{a|x}[i, j] = tr[I_{a|x}(rho) S_j^dagger S_i] for every block."""
    operators = [realization.word_operator(word) for word in basis.words]
    moments: dict[tuple[int, int], np.ndarray] = {}
    for a, x in realization.scenario.block_labels:
        post = realization.post_measurement(a, x)
        size = len(operators)
        matrix = np.empty((size, size), dtype=complex)
        for i, s_i in enumerate(operators):
            for j, s_j in enumerate(operators):
                matrix[i, j] = np.trace(post @ dagger(s_j) @ s_i)
        moments[(a, x)] = matrix
    return moments


def moment_vector(model: MomentModel, realization: Realization) -> np.ndarray:
    return model.vector_from(numeric_moments(realization, model.basis))
