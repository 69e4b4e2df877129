"""
Self-testing the optimal 2 -> 1 encoding from the observed success rate.

The average fidelity between the reference encodings and the actual states,
after the best extraction channel, is bounded through a channel built from
the measurements E0 = E_{0|0} and E1 = E_{0|1} themselves. The resulting
expression is linear in the moments of the 2 -> 1 scenario (bits (x0, x1)
live in block (a', x') = (x0, x1)):

    1/4 [ 2 + sum_{x0,x1} ( (-1)^x0 (c^2 - s^2) m(E0)
                            - (-1)^x1 4cs m(E0 E1 E0)
                            + (-1)^x1 2cs (m(E1 E0) + m(E0 E1)) ) ]

with c = cos(pi/8), s = sin(pi/8) and m(w) = nA * chi_{x0|x1}(w).
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from itertools import product

import numpy as np

from qtemporal.algebra.words import Generator, OperatorWord
from qtemporal.apps.program import MomentProgram, require_optimal
from qtemporal.apps.qrac import QRAC_CLASSICAL, qrac_objective, qrac_quantum_value
from qtemporal.apps.records import BoundResult
from qtemporal.apps.regimes import ConstraintRegime
from qtemporal.apps.sweep import run_grid
from qtemporal.core.errors import InvalidRealizationError, InvalidScenarioError, SolverError
from qtemporal.core.tolerances import CURVE_POINTS, REALIZATION_TOL, SOLVER_TOL_DEFAULT
from qtemporal.moment.constraints import AffineObjective, LinearEquality, bind_data, normalization, word_functional
from qtemporal.moment.model import MomentModel, build_model
from qtemporal.moment.scenario import CorrelationTable
from qtemporal.realizations.model import Realization
from qtemporal.realizations.reference import COS_PI_8, SIN_PI_8, qrac_realization, qrac_reference_states, qrac_scenario
from qtemporal.realizations.span import SpanBasis
from qtemporal.realizations.store import SpanStore
from qtemporal.runlog.tracker import track_solve
from qtemporal.sdp.lp import solve_lp
from qtemporal.sdp.problem import LpProblem

logger = logging.getLogger(__name__)

MIN_SELFTEST_LEVEL = 2

E0 = OperatorWord((Generator(outcome=0, setting=0, n_outcomes=2),))
E1 = OperatorWord((Generator(outcome=0, setting=1, n_outcomes=2),))


@dataclass(frozen=True)
class FidelityFunctional:
    c: float = COS_PI_8
    s: float = SIN_PI_8

    @property
    def constant(self) -> float:
        return 0.5

    @property
    def weights(self) -> dict[tuple[tuple[int, int], OperatorWord], float]:
        # 1/4 * nA = 1/2 in front of every moment
        c, s = self.c, self.s
        weights: dict[tuple[tuple[int, int], OperatorWord], float] = {}
        for x0, x1 in product((0, 1), repeat=2):
            block = (x0, x1)
            sign0 = (-1.0) ** x0
            sign1 = (-1.0) ** x1
            weights[(block, E0)] = 0.5 * sign0 * (c * c - s * s)
            weights[(block, E0 * E1 * E0)] = -0.5 * sign1 * 4.0 * c * s
            weights[(block, E1 * E0)] = 0.5 * sign1 * 2.0 * c * s
            weights[(block, E0 * E1)] = 0.5 * sign1 * 2.0 * c * s
        return weights

    def objective(self, model: MomentModel) -> AffineObjective:
        if model.scenario != qrac_scenario(2):
            raise InvalidScenarioError("The fidelity functional is defined on the 2->1 scenario")
        if model.level < MIN_SELFTEST_LEVEL:
            raise InvalidScenarioError(
                f"The fidelity functional needs words of length 3; level {model.level} < {MIN_SELFTEST_LEVEL}"
            )
        return word_functional(model, self.weights, self.constant)

    def evaluate(self, realization: Realization) -> float:
        """Value on an explicit realization, no relaxation involved."""
        total = self.constant
        for ((a, x), word), weight in self.weights.items():
            post = realization.post_measurement(a, x)
            total += weight * float(np.real(np.trace(post @ realization.word_operator(word))))
        return total


def reference_fidelity(functional: FidelityFunctional | None = None) -> float:
    return (functional or FidelityFunctional()).evaluate(qrac_realization(2))


def selftest_program(
    model: MomentModel,
    observed: float | CorrelationTable,
    span_equalities: Sequence[LinearEquality],
    functional: FidelityFunctional | None = None,
) -> tuple[MomentProgram, AffineObjective]:
    """Moment program pinned to the observation, with the fidelity functional to minimize."""
    program = MomentProgram.from_model(model)
    program.extend(normalization(model))
    program.extend(span_equalities)
    if isinstance(observed, CorrelationTable):
        program.extend(bind_data(model, observed))
    else:
        if not 0.0 <= observed <= 1.0:
            raise InvalidScenarioError(f"Success probability must lie in [0, 1], got {observed}")
        success = qrac_objective(model, 2)
        program.extend([LinearEquality(dict(success.coefficients), observed - success.constant, "success")])
    return program, (functional or FidelityFunctional()).objective(model)


def selftest_fidelity(
    observed: float | CorrelationTable,
    level: int = MIN_SELFTEST_LEVEL,
    dim: int = 2,
    rank: int = 1,
    seed: int = 0,
    tol: float = SOLVER_TOL_DEFAULT,
    store: SpanStore | None = None,
    *,
    functional: FidelityFunctional | None = None,
    model: MomentModel | None = None,
    span_equalities: Sequence[LinearEquality] | None = None,
    span: SpanBasis | None = None,
) -> BoundResult:
    """
    Lower bound on the fidelity with the reference encodings.

    Args:
        observed: the observed 2 -> 1 success probability, or a full table.
        level: hierarchy level, at least 2.
        dim, rank, seed: parameters of the dimension/rank span.
    """
    if level < MIN_SELFTEST_LEVEL:
        raise InvalidScenarioError(
            f"Self-testing needs level >= {MIN_SELFTEST_LEVEL} (length-3 words), got {level}"
        )
    regime = ConstraintRegime("dim-rank", dim=dim, rank=rank, seed=seed)
    if model is None:
        model = build_model(qrac_scenario(2), level)
    if span_equalities is None:
        span_equalities, span = regime.constraints(model, store)

    program, objective = selftest_program(model, observed, span_equalities, functional)
    parameter = None if isinstance(observed, CorrelationTable) else float(observed)
    solution = require_optimal(
        program.solve(objective, "minimize", tol),
        f"selftest level {level}" + (f" at P={parameter:.9g}" if parameter is not None else ""),
    )
    span_id = span.span_id if span is not None else None
    track_solve(
        application="selftest",
        status=solution.status,
        value=solution.dual_bound,
        gap=solution.gap,
        iterations=solution.iterations,
        span_id=span_id,
        parameter=parameter,
    )
    return BoundResult(
        application="selftest",
        regime=regime.label,
        level=level,
        parameter=parameter,
        value=solution.dual_bound,
        gap=solution.gap,
        status=solution.status,
        span_id=span_id,
        seed=seed,
    )


def selftest_curve(
    values: Sequence[float] | None = None,
    level: int = MIN_SELFTEST_LEVEL,
    dim: int = 2,
    rank: int = 1,
    seed: int = 0,
    tol: float = SOLVER_TOL_DEFAULT,
    store: SpanStore | None = None,
    workers: int | None = None,
) -> list[BoundResult]:
    """Fidelity lower bound over observed success rates from 3/4 to the quantum maximum."""
    if level < MIN_SELFTEST_LEVEL:
        raise InvalidScenarioError(f"Self-testing needs level >= {MIN_SELFTEST_LEVEL}, got {level}")
    grid = (
        np.linspace(QRAC_CLASSICAL, qrac_quantum_value(2), CURVE_POINTS)
        if values is None
        else np.asarray(values, dtype=float)
    )
    regime = ConstraintRegime("dim-rank", dim=dim, rank=rank, seed=seed)
    model = build_model(qrac_scenario(2), level)
    span_equalities, span = regime.constraints(model, store)

    def task(value: float) -> BoundResult:
        return selftest_fidelity(
            value,
            level,
            dim,
            rank,
            seed,
            tol,
            model=model,
            span_equalities=span_equalities,
            span=span,
        )

    return run_grid("selftest", regime.label, level, list(grid), task, workers)


def _check_states(states: Sequence[np.ndarray]) -> list[np.ndarray]:
    if not states:
        raise InvalidRealizationError("No reference states given")
    checked = []
    dim = np.asarray(states[0]).shape[0]
    for index, state in enumerate(states):
        state = np.asarray(state, dtype=complex)
        if state.shape != (dim, dim):
            raise InvalidRealizationError(f"State {index} has shape {state.shape}, expected ({dim}, {dim})")
        if np.max(np.abs(state - state.conj().T)) > REALIZATION_TOL:
            raise InvalidRealizationError(f"State {index} is not Hermitian")
        if abs(np.trace(state).real - 1.0) > REALIZATION_TOL:
            raise InvalidRealizationError(f"State {index} does not have unit trace")
        if np.linalg.eigvalsh(state).min() < -REALIZATION_TOL:
            raise InvalidRealizationError(f"State {index} is not positive semidefinite")
        checked.append(state)
    return checked


def classical_fidelity_closed_form(states: Sequence[np.ndarray]) -> float:
    """Average of the largest diagonal entry of every state."""
    return float(np.mean([np.max(np.real(np.diag(state))) for state in _check_states(states)]))


def classical_fidelity(states: Sequence[np.ndarray] | None = None) -> float:
    """
    Best average overlap tr(rho_ref sigma) reachable with states diagonal in
    the computational basis, as a linear program over their diagonals.
    """
    if states is None:
        states = list(qrac_reference_states(2).values())
    checked = _check_states(states)
    count = len(checked)
    dim = checked[0].shape[0]

    # alpha[k, i]: weight of |i><i| in the k-th classical state
    objective = np.concatenate([np.real(np.diag(state)) for state in checked]) / count
    eq_matrix = np.kron(np.eye(count), np.ones((1, dim)))
    solution = solve_lp(
        LpProblem(
            objective=objective,
            eq_matrix=eq_matrix,
            eq_rhs=np.ones(count),
            bounds=[(0.0, None)] * (count * dim),
            sense="maximize",
        )
    )
    if solution.status != "optimal":
        raise SolverError(f"classical fidelity LP finished with status {solution.status}", status=solution.status)

    closed_form = classical_fidelity_closed_form(checked)
    if abs(solution.value - closed_form) > 1e-7:
        raise SolverError(
            f"classical fidelity LP value {solution.value:.12f} disagrees with closed form {closed_form:.12f}"
        )
    logger.debug("classical fidelity %.12f over %d states", solution.value, count)
    return solution.value
