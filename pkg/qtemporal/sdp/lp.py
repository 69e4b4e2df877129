from __future__ import annotations

import logging

import numpy as np
from scipy.optimize import linprog

from qtemporal.sdp.problem import LpProblem, LpSolution

logger = logging.getLogger(__name__)

# scipy.optimize.linprog status codes
_STATUS = {0: "optimal", 1: "numerical-failure", 2: "infeasible", 3: "unbounded", 4: "numerical-failure"}


def solve_lp(problem: LpProblem) -> LpSolution:
    """Solve a small dense LP with HiGHS."""
    problem.validate()
    sign = -1.0 if problem.sense == "maximize" else 1.0
    bounds = problem.bounds if problem.bounds is not None else (0, None)

    result = linprog(
        sign * np.asarray(problem.objective, dtype=float),
        A_ub=problem.ub_matrix,
        b_ub=problem.ub_rhs,
        A_eq=problem.eq_matrix,
        b_eq=problem.eq_rhs,
        bounds=bounds,
        method="highs",
    )
    status = _STATUS.get(result.status, "numerical-failure")
    logger.debug("lp %s: %s", status, result.message)
    if status != "optimal":
        return LpSolution(status=status, value=float("nan"), x=None)
    return LpSolution(status="optimal", value=float(sign * result.fun), x=np.asarray(result.x))
