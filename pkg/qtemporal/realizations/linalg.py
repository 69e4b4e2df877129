"""
Dense complex linear algebra helpers for explicit realizations.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np
from scipy.linalg import inv, sqrtm
from scipy.stats import unitary_group

from qtemporal.core.errors import InvalidRealizationError
from qtemporal.core.tolerances import RANK_TOL

MEASUREMENT_ATTEMPTS = 10


def dagger(matrix: np.ndarray) -> np.ndarray:
    return matrix.conj().T


def hermitian_part(matrix: np.ndarray) -> np.ndarray:
    return 0.5 * (matrix + dagger(matrix))


def min_eigenvalue(matrix: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(hermitian_part(matrix))[0])


def numeric_rank(matrix: np.ndarray, tol: float = RANK_TOL) -> int:
    return int(np.sum(np.linalg.eigvalsh(hermitian_part(matrix)) > tol))


def ket(vector: Sequence[complex]) -> np.ndarray:
    return np.asarray(vector, dtype=complex).reshape(-1, 1)


def projector(vector: Sequence[complex]) -> np.ndarray:
    column = ket(vector)
    column = column / np.linalg.norm(column)
    return column @ dagger(column)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    return np.asarray(unitary_group.rvs(dim, random_state=rng), dtype=complex).reshape(dim, dim)


def random_isometry(dim_in: int, dim_out: int, rng: np.random.Generator) -> np.ndarray:
    """dim_out x dim_in matrix V with V^dagger V = 1."""
    return random_unitary(dim_out, rng)[:, :dim_in]


def random_density_matrix(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Ginibre-distributed state of the given rank (full rank by default)."""
    rank = dim if rank is None else rank
    ginibre = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    state = ginibre @ dagger(ginibre)
    return hermitian_part(state / np.trace(state).real)


def projective_measurement(
    dim: int, ranks: Sequence[int], rng: np.random.Generator
) -> tuple[np.ndarray, ...]:
    """Projectors onto consecutive column groups of a random unitary."""
    if sum(ranks) != dim or min(ranks) < 0:
        raise InvalidRealizationError(f"Ranks {tuple(ranks)} do not partition dimension {dim}")
    unitary = random_unitary(dim, rng)
    elements = []
    start = 0
    for rank in ranks:
        columns = unitary[:, start : start + rank]
        elements.append(columns @ dagger(columns))
        start += rank
    return tuple(elements)


def rank_k_povm(
    dim: int, rank: int, n_outcomes: int, rng: np.random.Generator
) -> tuple[np.ndarray, ...]:
    """
    Random POVM whose elements all have rank `rank`.

    Random positive rank-k operators are rescaled by the inverse square
    root of their sum; congruence by an invertible matrix keeps the rank.
    """
    for _ in range(MEASUREMENT_ATTEMPTS):
        partial = []
        for _ in range(n_outcomes):
            factor = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
            partial.append(factor @ dagger(factor))
        total = np.sum(partial, axis=0)
        if numeric_rank(total) < dim:
            continue

        inv_sqrt = inv(sqrtm(total))
        elements = tuple(hermitian_part(inv_sqrt @ element @ inv_sqrt) for element in partial)
        if all(numeric_rank(element) == rank for element in elements) and np.allclose(
            np.sum(elements, axis=0), np.eye(dim), atol=1e-10
        ):
            return elements

    raise InvalidRealizationError(
        f"Could not generate a rank-{rank} POVM in dimension {dim} "
        f"after {MEASUREMENT_ATTEMPTS} attempts"
    )


def preparation_kraus(state: np.ndarray, n_inputs: int) -> tuple[np.ndarray, ...]:
    """Kraus operators of rho -> tr(rho) * state / n_inputs (measure and prepare)."""
    dim = state.shape[0]
    weights, vectors = np.linalg.eigh(hermitian_part(state))
    kraus = []
    for weight, vector in zip(np.clip(weights, 0.0, None), vectors.T):
        if weight <= 0:
            continue
        for j in range(dim):
            bra = np.zeros((1, dim))
            bra[0, j] = 1.0
            kraus.append(np.sqrt(weight / n_inputs) * (vector.reshape(-1, 1) @ bra))
    return tuple(kraus)
