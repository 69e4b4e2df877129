from __future__ import annotations

import numpy as np

from qtemporal.core.errors import InvalidRealizationError
from qtemporal.moment.scenario import Scenario
from qtemporal.realizations.linalg import (
    preparation_kraus,
    projective_measurement,
    random_density_matrix,
    random_isometry,
    rank_k_povm,
)
from qtemporal.realizations.model import KrausList, Realization

SeedLike = int | np.random.SeedSequence | np.random.Generator


def _as_generator(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def check_rank_parameters(dim: int, rank: int | None, n_outcomes: int) -> None:
    if dim < 1:
        raise InvalidRealizationError(f"Dimension must be >= 1, got {dim}")
    if rank is None:
        return
    if not 1 <= rank <= dim:
        raise InvalidRealizationError(f"Rank {rank} must lie in [1, {dim}]")
    if rank * n_outcomes < dim:
        raise InvalidRealizationError(
            f"{n_outcomes} elements of rank {rank} cannot sum to the identity in dimension {dim}"
        )


def _random_composition(total: int, parts: int, rng: np.random.Generator) -> list[int]:
    """Uniform over compositions of `total` into `parts` non-negative integers."""
    bars = np.sort(rng.choice(total + parts - 1, size=parts - 1, replace=False))
    edges = np.concatenate([[-1], bars, [total + parts - 1]])
    return [int(n) for n in np.diff(edges) - 1]


def _sample_povm(dim: int, rank: int | None, n_outcomes: int, rng: np.random.Generator):
    if rank is None:
        return projective_measurement(dim, _random_composition(dim, n_outcomes, rng), rng)
    if rank * n_outcomes == dim:
        return projective_measurement(dim, [rank] * n_outcomes, rng)
    return rank_k_povm(dim, rank, n_outcomes, rng)


def _sample_instrument(dim: int, n_outcomes: int, rng: np.random.Generator) -> tuple[KrausList, ...]:
    # Stinespring: rows of one isometry split into n_outcomes * dim Kraus operators.
    isometry = random_isometry(dim, dim * dim * n_outcomes, rng)
    blocks = isometry.reshape(n_outcomes, dim, dim, dim)
    return tuple(tuple(blocks[a, n] for n in range(dim)) for a in range(n_outcomes))


def _sample_preparations(dim: int, n_inputs: int, rng: np.random.Generator) -> tuple[KrausList, ...]:
    return tuple(preparation_kraus(random_density_matrix(dim, rng), n_inputs) for _ in range(n_inputs))


def sample_realization(
    dim: int,
    rank: int | None,
    scenario: Scenario,
    seed: SeedLike,
) -> Realization:
    """
    Random d-dimensional realization, fully determined by the seed.

    Args:
        dim: Hilbert-space dimension d.
        rank: rank of every POVM element; None samples projective
            measurements with uniformly random rank compositions.
        scenario: shape of the instruments and measurements.
        seed: integer seed, SeedSequence, or a Generator to draw from.
    """
    check_rank_parameters(dim, rank, scenario.nB)
    rng = _as_generator(seed)

    state = random_density_matrix(dim, rng)
    if scenario.prepare_and_measure:
        instruments = tuple(_sample_preparations(dim, scenario.nA, rng) for _ in range(scenario.nX))
    else:
        instruments = tuple(_sample_instrument(dim, scenario.nA, rng) for _ in range(scenario.nX))
    povms = tuple(_sample_povm(dim, rank, scenario.nB, rng) for _ in range(scenario.nY))

    return Realization(
        scenario=scenario,
        state=state,
        instruments=instruments,
        povms=povms,
        rank=rank,
    )
