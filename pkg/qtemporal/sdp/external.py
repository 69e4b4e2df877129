"""
Re-solve an SdpProblem with cvxpy (optional dependency) as a cross-check.
"""

from __future__ import annotations

import numpy as np

from qtemporal.core.errors import SolverError
from qtemporal.sdp.embedding import embed_stack
from qtemporal.sdp.problem import SdpProblem


def solve_with_cvxpy(problem: SdpProblem) -> float:
    try:
        import cvxpy as cp
    except ImportError as exc:
        raise SolverError("cvxpy is not installed; the cross-check is unavailable") from exc

    problem.validate()
    x = cp.Variable(problem.n_vars)
    constraints = []
    for block in problem.blocks:
        constant = embed_stack(block.constant[None])[0]
        size = constant.shape[0]
        expression = constant
        if len(block.var_ids):
            stacked = embed_stack(block.coefficients).reshape(len(block.var_ids), -1)
            expression = constant + cp.reshape(stacked.T @ x[block.var_ids], (size, size), order="C")
        constraints.append(0.5 * (expression + expression.T) >> 0)
    if len(problem.eq_rhs):
        constraints.append(problem.eq_matrix @ x == problem.eq_rhs)

    objective = problem.objective @ x + problem.objective_constant
    goal = cp.Maximize(objective) if problem.sense == "maximize" else cp.Minimize(objective)
    program = cp.Problem(goal, constraints)
    value = program.solve()
    if program.status not in ("optimal", "optimal_inaccurate"):
        raise SolverError(f"cvxpy finished with status {program.status}", status=program.status)
    return float(value)
