"""
Linear span of sampled moment vectors (dimension- and rank-restricted sets).

Coordinates are the model's real variable vector, so span membership is a
set of linear equalities on exactly the decision variables of the SDP.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, Field

from qtemporal.core.errors import InvalidScenarioError, SpanNotSaturatedError
from qtemporal.core.tolerances import (
    SPAN_BATCH_SIZE,
    SPAN_MAX_BATCHES,
    SPAN_RANK_TOL,
    SPAN_STABLE_BATCHES,
)
from qtemporal.moment.constraints import LinearEquality
from qtemporal.moment.model import MomentModel, build_model
from qtemporal.moment.scenario import Scenario
from qtemporal.realizations.model import moment_vector
from qtemporal.realizations.sampling import check_rank_parameters, sample_realization

logger = logging.getLogger(__name__)

SPAN_FORMAT_VERSION = 1


class SpanRecipe(BaseModel):
    """Everything that determines a span; its hash is the span id."""

    dim: int = Field(ge=1)
    rank: int | None = None
    nA: int
    nX: int
    nB: int
    nY: int
    prepare_and_measure: bool = False
    level: int = Field(ge=1)
    seed: int
    batch_size: int = Field(ge=0)
    max_batches: int = Field(ge=1)
    stable_batches: int = Field(ge=1)

    @property
    def scenario(self) -> Scenario:
        return Scenario(self.nA, self.nX, self.nB, self.nY, self.prepare_and_measure)

    def span_id(self) -> str:
        canonical = json.dumps(self.model_dump(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


class SpanMetadata(BaseModel):
    format_version: int = SPAN_FORMAT_VERSION
    span_id: str
    recipe: SpanRecipe
    ambient_dim: int
    rank: int
    samples: int
    saturated: bool
    # rank after every batch
    rank_trace: list[int] = Field(default_factory=list)


@dataclass(frozen=True, eq=False)
class SpanBasis:
    vectors: np.ndarray
    metadata: SpanMetadata

    @property
    def rank(self) -> int:
        return int(self.vectors.shape[0])

    @property
    def ambient_dim(self) -> int:
        return self.metadata.ambient_dim

    @property
    def span_id(self) -> str:
        return self.metadata.span_id

    def distance(self, vector: np.ndarray) -> float:
        """Euclidean distance of a vector from the span."""
        projected = self.vectors.T @ (self.vectors @ vector)
        return float(np.linalg.norm(vector - projected))

    def complement(self) -> np.ndarray:
        """Orthonormal rows spanning the orthogonal complement."""
        if self.rank == 0:
            return np.eye(self.ambient_dim)
        _, _, vt = np.linalg.svd(self.vectors, full_matrices=True)
        return vt[self.rank :]


def make_recipe(
    dim: int,
    rank: int | None,
    scenario: Scenario,
    level: int,
    seed: int,
    batch_size: int = SPAN_BATCH_SIZE,
    max_batches: int = SPAN_MAX_BATCHES,
    stable_batches: int = SPAN_STABLE_BATCHES,
) -> SpanRecipe:
    return SpanRecipe(
        dim=dim,
        rank=rank,
        nA=scenario.nA,
        nX=scenario.nX,
        nB=scenario.nB,
        nY=scenario.nY,
        prepare_and_measure=scenario.prepare_and_measure,
        level=level,
        seed=seed,
        batch_size=batch_size,
        max_batches=max_batches,
        stable_batches=stable_batches,
    )


def _extend(basis: np.ndarray, batch: np.ndarray) -> np.ndarray:
    if batch.size == 0:
        return basis
    residual = batch - (batch @ basis.T) @ basis
    # second pass restores orthogonality lost to cancellation
    residual = residual - (residual @ basis.T) @ basis
    scale = max(1.0, float(np.max(np.linalg.norm(batch, axis=1))))
    _, s, vt = np.linalg.svd(residual, full_matrices=False)
    fresh = vt[s > SPAN_RANK_TOL * scale]
    if len(fresh) == 0:
        return basis
    return np.vstack([basis, fresh])


def _is_saturated(trace: list[int], stable_batches: int) -> bool:
    return len(trace) > stable_batches and trace[-1] == trace[-1 - stable_batches]


def build_span(recipe: SpanRecipe, strict: bool = True) -> SpanBasis:
    """
    Accumulate moment vectors of sampled realizations batch by batch.

    Stops once the rank has not changed over `stable_batches` consecutive
    batches, or after `max_batches`.

    Raises:
        SpanNotSaturatedError: max_batches reached while the rank still grew
            (only when strict).
    """
    scenario = recipe.scenario
    if recipe.rank is not None and recipe.rank * scenario.nB != recipe.dim:
        raise InvalidScenarioError(
            f"Rank-{recipe.rank} spans need projective measurements: "
            f"rank * nB must equal d = {recipe.dim}"
        )
    check_rank_parameters(recipe.dim, recipe.rank, scenario.nB)

    model = build_model(scenario, recipe.level)
    basis = np.zeros((0, model.n_vars))
    trace: list[int] = []
    samples = 0

    batch_seeds = np.random.SeedSequence(recipe.seed).spawn(recipe.max_batches)
    for batch_seed in batch_seeds:
        rng = np.random.default_rng(batch_seed)
        batch = np.array(
            [
                moment_vector(model, sample_realization(recipe.dim, recipe.rank, scenario, rng))
                for _ in range(recipe.batch_size)
            ]
        ).reshape(recipe.batch_size, model.n_vars)
        samples += recipe.batch_size
        basis = _extend(basis, batch)
        trace.append(int(basis.shape[0]))
        if _is_saturated(trace, recipe.stable_batches):
            break

    saturated = _is_saturated(trace, recipe.stable_batches)
    logger.info("span %s: rank %d of %d after %d samples", recipe.span_id(), basis.shape[0], model.n_vars, samples)
    if strict and not saturated:
        raise SpanNotSaturatedError(
            f"Span rank still growing after {recipe.max_batches} batches (trace {trace})"
        )

    metadata = SpanMetadata(
        span_id=recipe.span_id(),
        recipe=recipe,
        ambient_dim=model.n_vars,
        rank=int(basis.shape[0]),
        samples=samples,
        saturated=saturated,
        rank_trace=trace,
    )
    return SpanBasis(vectors=basis, metadata=metadata)


def span_constraints(span: SpanBasis, model: MomentModel) -> list[LinearEquality]:
    """Complement rows c with c.x = 0; empty when the span is full."""
    recipe = span.metadata.recipe
    if recipe.scenario != model.scenario or recipe.level != model.level:
        raise InvalidScenarioError(
            f"Span {span.span_id} was sampled for {recipe.scenario.describe()} level {recipe.level}, "
            f"model is {model.scenario.describe()} level {model.level}"
        )
    if span.ambient_dim != model.n_vars:
        raise InvalidScenarioError(
            f"Span ambient dimension {span.ambient_dim} differs from model size {model.n_vars}"
        )

    equalities = []
    for index, row in enumerate(span.complement()):
        coefficients = {int(k): float(row[k]) for k in np.flatnonzero(np.abs(row) > 1e-14)}
        equalities.append(LinearEquality(coefficients, 0.0, f"span[{index}]"))
    return equalities
