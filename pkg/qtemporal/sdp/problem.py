"""
Solver-ready standard forms.

SdpProblem: optimize c.x + c0 over x subject to
    F0_b + sum_k x_k F_k^b  PSD   for every block b   (Hermitian F)
    A x = beta
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from qtemporal.core.tolerances import HERMITIAN_TOL
from qtemporal.moment.model import MomentBlock

Sense = Literal["maximize", "minimize"]
SolveStatus = Literal["optimal", "infeasible", "unbounded", "numerical-failure"]


@dataclass(frozen=True, eq=False)
class LmiBlock:
    constant: np.ndarray
    var_ids: np.ndarray
    coefficients: np.ndarray
    label: str = ""

    @property
    def size(self) -> int:
        return int(self.constant.shape[0])

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        if len(self.var_ids) == 0:
            return np.array(self.constant, dtype=complex)
        return self.constant + np.einsum("k,kij->ij", np.asarray(x)[self.var_ids], self.coefficients)

    @classmethod
    def from_moment_block(cls, block: MomentBlock, label: str | None = None) -> LmiBlock:
        ids, coefficients = block.coefficient_matrices()
        return cls(
            constant=np.zeros((block.size, block.size), dtype=complex),
            var_ids=ids,
            coefficients=coefficients,
            label=label if label is not None else str(block.label),
        )

    @classmethod
    def combine(cls, terms: Sequence[tuple[float, LmiBlock]], label: str = "") -> LmiBlock:
        """Weighted sum of same-sized blocks, merging shared variables."""
        if not terms:
            raise ValueError("combine() needs at least one block")
        size = terms[0][1].size
        constant = np.zeros((size, size), dtype=complex)
        merged: dict[int, np.ndarray] = {}
        for weight, block in terms:
            if block.size != size:
                raise ValueError(f"Cannot combine blocks of size {size} and {block.size}")
            constant += weight * block.constant
            for vid, matrix in zip(block.var_ids, block.coefficients):
                key = int(vid)
                if key in merged:
                    merged[key] = merged[key] + weight * matrix
                else:
                    merged[key] = weight * matrix
        ids = np.array(sorted(merged), dtype=int)
        coefficients = (
            np.stack([merged[int(k)] for k in ids])
            if len(ids)
            else np.zeros((0, size, size), dtype=complex)
        )
        return cls(constant=constant, var_ids=ids, coefficients=coefficients, label=label)


@dataclass(frozen=True, eq=False)
class SdpProblem:
    n_vars: int
    objective: np.ndarray
    blocks: tuple[LmiBlock, ...]
    eq_matrix: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    eq_rhs: np.ndarray = field(default_factory=lambda: np.zeros(0))
    sense: Sense = "maximize"
    objective_constant: float = 0.0

    def __post_init__(self) -> None:
        if self.eq_matrix.size == 0:
            object.__setattr__(self, "eq_matrix", np.zeros((0, self.n_vars)))
            object.__setattr__(self, "eq_rhs", np.zeros(0))

    def validate(self) -> None:
        if self.objective.shape != (self.n_vars,):
            raise ValueError(f"Objective has shape {self.objective.shape}, expected ({self.n_vars},)")
        if self.eq_matrix.shape != (len(self.eq_rhs), self.n_vars):
            raise ValueError(
                f"Equality matrix {self.eq_matrix.shape} inconsistent with "
                f"{len(self.eq_rhs)} right-hand sides and {self.n_vars} variables"
            )
        if self.sense not in ("maximize", "minimize"):
            raise ValueError(f"Unknown sense {self.sense!r}")
        for block in self.blocks:
            n = block.size
            if block.constant.shape != (n, n) or block.coefficients.shape != (len(block.var_ids), n, n):
                raise ValueError(f"Block {block.label!r} has inconsistent dimensions")
            if len(block.var_ids) and (block.var_ids.min() < 0 or block.var_ids.max() >= self.n_vars):
                raise ValueError(f"Block {block.label!r} references unknown variables")
            for matrix in (block.constant, *block.coefficients):
                scale = 1.0 + float(np.max(np.abs(matrix), initial=0.0))
                if np.max(np.abs(matrix - matrix.conj().T), initial=0.0) > HERMITIAN_TOL * scale:
                    raise ValueError(f"Block {block.label!r} is not Hermitian")

    def objective_value(self, x: np.ndarray) -> float:
        return float(self.objective @ x + self.objective_constant)

    def scaled(self, factor: float) -> SdpProblem:
        return SdpProblem(
            n_vars=self.n_vars,
            objective=factor * self.objective,
            blocks=self.blocks,
            eq_matrix=self.eq_matrix,
            eq_rhs=self.eq_rhs,
            sense=self.sense,
            objective_constant=factor * self.objective_constant,
        )


@dataclass(frozen=True, eq=False)
class SdpSolution:
    status: SolveStatus
    value: float
    x: np.ndarray | None
    # Bound from the dual iterate: >= value when maximizing, <= value when minimizing.
    dual_bound: float
    # |value - dual_bound|
    gap: float
    equality_residual: float
    min_eigenvalue: float
    iterations: int

    @property
    def is_optimal(self) -> bool:
        return self.status == "optimal"


def check_certificate(problem: SdpProblem, x: np.ndarray) -> tuple[float, float]:
    """Independent recomputation: (max |A x - beta|, min eigenvalue over blocks)."""
    residual = (
        float(np.max(np.abs(problem.eq_matrix @ x - problem.eq_rhs)))
        if len(problem.eq_rhs)
        else 0.0
    )
    eigenvalues = [float(np.linalg.eigvalsh(block.evaluate(x)).min()) for block in problem.blocks]
    return residual, min(eigenvalues, default=0.0)


@dataclass(frozen=True, eq=False)
class LpProblem:
    """Optimize c.x subject to A_ub x <= b_ub, A_eq x = b_eq, bounds."""

    objective: np.ndarray
    ub_matrix: np.ndarray | None = None
    ub_rhs: np.ndarray | None = None
    eq_matrix: np.ndarray | None = None
    eq_rhs: np.ndarray | None = None
    bounds: Sequence[tuple[float | None, float | None]] | None = None
    sense: Sense = "maximize"

    def validate(self) -> None:
        arrays: Iterable[np.ndarray | None] = (
            self.objective,
            self.ub_matrix,
            self.ub_rhs,
            self.eq_matrix,
            self.eq_rhs,
        )
        for array in arrays:
            if array is not None and not np.all(np.isfinite(array)):
                raise ValueError("LP data must be finite")


@dataclass(frozen=True, eq=False)
class LpSolution:
    status: SolveStatus
    value: float
    x: np.ndarray | None
