"""
n -> 1 random access codes as prepare-and-measure temporal scenarios.

The first bit x0 plays the role of the first-time outcome a' and the
remaining bits are packed into the first-time setting x'. With uniform
inputs, P(a', b | x', y) = P(b | x0..x_{n-1}, y) / 2.
"""

from __future__ import annotations

from itertools import product

import numpy as np

from qtemporal.apps.program import MomentProgram, require_optimal
from qtemporal.apps.records import BoundResult
from qtemporal.apps.regimes import ConstraintRegime
from qtemporal.core.errors import InvalidScenarioError
from qtemporal.core.tolerances import SOLVER_TOL_DEFAULT
from qtemporal.moment.constraints import AffineObjective, functional, normalization
from qtemporal.moment.model import MomentModel, build_model
from qtemporal.moment.scenario import CorrelationTable
from qtemporal.realizations.reference import qrac_block, qrac_scenario
from qtemporal.realizations.store import SpanStore
from qtemporal.runlog.tracker import track_solve

QRAC_CLASSICAL = 0.75
DEFAULT_QRAC_REGIME = ConstraintRegime("dim-rank", dim=2, rank=1)


def qrac_quantum_value(n: int) -> float:
    return 0.5 * (1.0 + 1.0 / np.sqrt(n))


def qrac_coefficients(n: int) -> dict[tuple[int, int, int, int], float]:
    """Average success probability as weights on P(a', b | x', y)."""
    qrac_scenario(n)
    weight = 2.0 / (2**n * n)
    coefficients: dict[tuple[int, int, int, int], float] = {}
    for bits in product((0, 1), repeat=n):
        a, x = qrac_block(bits)
        for y in range(n):
            key = (a, bits[y], x, y)
            coefficients[key] = coefficients.get(key, 0.0) + weight
    return coefficients


def qrac_success(table: CorrelationTable) -> float:
    n = table.scenario.nY
    if table.scenario != qrac_scenario(n):
        raise InvalidScenarioError(f"Table scenario {table.scenario.describe()} is not a {n}->1 code")
    return float(sum(c * table.p(*key) for key, c in qrac_coefficients(n).items()))


def qrac_objective(model: MomentModel, n: int) -> AffineObjective:
    return functional(model, qrac_coefficients(n))


def qrac_bound(
    n: int,
    regime: ConstraintRegime = DEFAULT_QRAC_REGIME,
    level: int = 1,
    tol: float = SOLVER_TOL_DEFAULT,
    store: SpanStore | None = None,
) -> BoundResult:
    """Upper bound on the n -> 1 success probability under `regime`."""
    model = build_model(qrac_scenario(n), level)
    program = MomentProgram.from_model(model)
    program.extend(normalization(model))
    regime_equalities, span = regime.constraints(model, store)
    program.extend(regime_equalities)

    solution = require_optimal(
        program.solve(qrac_objective(model, n), "maximize", tol),
        f"qrac {n}->1 {regime.label} level {level}",
    )
    span_id = span.span_id if span is not None else None
    track_solve(
        application="qrac",
        status=solution.status,
        value=solution.dual_bound,
        gap=solution.gap,
        iterations=solution.iterations,
        span_id=span_id,
        parameter=float(n),
    )
    return BoundResult(
        application="qrac",
        regime=regime.label,
        level=level,
        parameter=float(n),
        value=solution.dual_bound,
        gap=solution.gap,
        status=solution.status,
        span_id=span_id,
        seed=regime.seed if span is not None else None,
    )
