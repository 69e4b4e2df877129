from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass, field

from qtemporal.core.errors import SolverError
from qtemporal.core.tolerances import SOLVER_TOL_DEFAULT
from qtemporal.moment.constraints import AffineObjective, LinearEquality, stack_equalities
from qtemporal.moment.model import MomentBlock, MomentModel
from qtemporal.sdp.ipm import solve_sdp
from qtemporal.sdp.problem import LmiBlock, SdpProblem, SdpSolution, Sense


@dataclass
class MomentProgram:
    """Collects PSD blocks and equalities over one shared variable vector."""

    n_vars: int = 0
    blocks: list[LmiBlock] = field(default_factory=list)
    equalities: list[LinearEquality] = field(default_factory=list)

    @classmethod
    def from_model(cls, model: MomentModel) -> MomentProgram:
        program = cls(n_vars=model.n_vars)
        for block in model.blocks:
            program.add_moment_block(block)
        return program

    def add_moment_block(self, block: MomentBlock) -> LmiBlock:
        lmi = LmiBlock.from_moment_block(block)
        self.add_block(lmi)
        return lmi

    def add_block(self, block: LmiBlock) -> None:
        if len(block.var_ids):
            self.n_vars = max(self.n_vars, int(block.var_ids.max()) + 1)
        self.blocks.append(block)

    def extend(self, equalities: Iterable[LinearEquality]) -> None:
        self.equalities.extend(equalities)

    def to_problem(self, objective: AffineObjective, sense: Sense) -> SdpProblem:
        eq_matrix, eq_rhs = stack_equalities(self.equalities, self.n_vars)
        return SdpProblem(
            n_vars=self.n_vars,
            objective=objective.dense(self.n_vars),
            blocks=tuple(self.blocks),
            eq_matrix=eq_matrix,
            eq_rhs=eq_rhs,
            sense=sense,
            objective_constant=objective.constant,
        )

    def solve(
        self,
        objective: AffineObjective,
        sense: Sense,
        tol: float = SOLVER_TOL_DEFAULT,
    ) -> SdpSolution:
        return solve_sdp(self.to_problem(objective, sense), tol=tol)


def require_optimal(solution: SdpSolution, context: str) -> SdpSolution:
    if not solution.is_optimal:
        raise SolverError(
            f"{context}: solver finished with status {solution.status} after "
            f"{solution.iterations} iterations (gap {solution.gap:.3e}, "
            f"equality residual {solution.equality_residual:.3e})",
            status=solution.status,
        )
    return solution
