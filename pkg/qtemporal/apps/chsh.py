"""
Upper bounds on the temporal CHSH value.
"""

from __future__ import annotations

import numpy as np

from qtemporal.apps.program import MomentProgram, require_optimal
from qtemporal.apps.records import BoundResult
from qtemporal.apps.regimes import ConstraintRegime
from qtemporal.core.tolerances import SOLVER_TOL_DEFAULT
from qtemporal.moment.constraints import functional, normalization
from qtemporal.moment.model import build_model
from qtemporal.moment.scenario import CHSH_SCENARIO, chsh_coefficients
from qtemporal.realizations.store import SpanStore
from qtemporal.runlog.tracker import track_solve

CHSH_CLASSICAL = 2.0
CHSH_QUANTUM = float(2.0 * np.sqrt(2.0))
CHSH_ALGEBRAIC = 4.0


def chsh_bound(
    regime: ConstraintRegime,
    level: int,
    tol: float = SOLVER_TOL_DEFAULT,
    store: SpanStore | None = None,
) -> BoundResult:
    """max K_CHSH over PSD instrument moment blocks under `regime`."""
    model = build_model(CHSH_SCENARIO, level)
    program = MomentProgram.from_model(model)
    program.extend(normalization(model))
    regime_equalities, span = regime.constraints(model, store)
    program.extend(regime_equalities)

    solution = require_optimal(
        program.solve(functional(model, chsh_coefficients()), "maximize", tol),
        f"chsh {regime.label} level {level}",
    )
    span_id = span.span_id if span is not None else None
    track_solve(
        application="chsh",
        status=solution.status,
        value=solution.dual_bound,
        gap=solution.gap,
        iterations=solution.iterations,
        span_id=span_id,
    )
    return BoundResult(
        application="chsh",
        regime=regime.label,
        level=level,
        value=solution.dual_bound,
        gap=solution.gap,
        status=solution.status,
        span_id=span_id,
        seed=regime.seed if span is not None else None,
    )
