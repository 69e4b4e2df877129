"""
Temporal steering robustness.

The robustness of an assemblage {I_{a|x}(rho)} is the least total weight
sum_lambda tr(sigma_lambda) - 1 of unnormalized hidden states with

    sum_lambda delta_{a, lambda(x)} sigma_lambda  >=  I_{a|x}(rho)   for all a, x.

Moment relaxation: every sigma_lambda gets its own moment block Gamma_lambda on
the same monomial basis, and the operator inequalities become

    sum_lambda delta_{a, lambda(x)} Gamma_lambda - chi_{a|x}  PSD.

Minimizing sum_lambda Gamma_lambda[1, 1] - 1 then lower-bounds the robustness of
every realization compatible with the constraints on chi.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from itertools import product

import numpy as np

from qtemporal.algebra.words import IDENTITY
from qtemporal.apps.chsh import CHSH_ALGEBRAIC, CHSH_CLASSICAL, CHSH_QUANTUM
from qtemporal.apps.program import MomentProgram, require_optimal
from qtemporal.apps.records import BoundResult
from qtemporal.apps.regimes import ConstraintRegime
from qtemporal.apps.sweep import run_grid
from qtemporal.core.errors import ConfigError, InvalidScenarioError
from qtemporal.core.tolerances import CURVE_POINTS, SOLVER_TOL_DEFAULT
from qtemporal.moment.constraints import (
    AffineObjective,
    LinearEquality,
    bind_data,
    functional,
    normalization,
)
from qtemporal.moment.model import MomentModel, build_model, symbolic_block
from qtemporal.moment.scenario import CHSH_SCENARIO, CorrelationTable, Scenario, chsh_coefficients, chsh_value
from qtemporal.realizations.span import SpanBasis
from qtemporal.realizations.store import SpanStore
from qtemporal.runlog.tracker import track_solve
from qtemporal.sdp.problem import LmiBlock, SdpSolution

logger = logging.getLogger(__name__)

_GRID_SLACK = 1e-9


@dataclass(frozen=True)
class DeterministicStrategySet:
    """All maps lambda: first-time setting -> outcome."""

    n_outcomes: int
    n_settings: int

    @property
    def strategies(self) -> tuple[tuple[int, ...], ...]:
        return tuple(product(range(self.n_outcomes), repeat=self.n_settings))

    def __len__(self) -> int:
        return self.n_outcomes**self.n_settings

    def indicator(self, index: int, a: int, x: int) -> int:
        return int(self.strategies[index][x] == a)

    def compatible(self, a: int, x: int) -> list[int]:
        """Indices of the strategies with lambda(x) = a."""
        return [index for index, strategy in enumerate(self.strategies) if strategy[x] == a]

    @classmethod
    def for_scenario(cls, scenario: Scenario) -> DeterministicStrategySet:
        return cls(n_outcomes=scenario.nA, n_settings=scenario.nX)


def steering_program(model: MomentModel) -> tuple[MomentProgram, AffineObjective]:
    """chi blocks, one hidden block per strategy, and the dominance blocks."""
    strategies = DeterministicStrategySet.for_scenario(model.scenario)
    program = MomentProgram.from_model(model)
    chi_blocks = list(program.blocks)

    hidden: list[LmiBlock] = []
    weight: dict[int, float] = {}
    next_var = model.n_vars
    for strategy in strategies.strategies:
        block = symbolic_block(model.basis, ("hidden", strategy), next_var)
        next_var += block.n_vars
        hidden.append(program.add_moment_block(block))
        for vid, coef in block.word_expr(IDENTITY).items():
            weight[vid] = float(np.real(coef))

    for (a, x), chi in zip(model.scenario.block_labels, chi_blocks):
        terms = [(1.0, hidden[index]) for index in strategies.compatible(a, x)]
        terms.append((-1.0, chi))
        program.add_block(LmiBlock.combine(terms, label=f"dominance[{a}|{x}]"))

    return program, AffineObjective(weight, -1.0)


def robustness_program(
    model: MomentModel, equalities: Sequence[LinearEquality]
) -> tuple[MomentProgram, AffineObjective]:
    """steering_program with normalization and the given equalities on chi."""
    program, objective = steering_program(model)
    program.extend(normalization(model))
    program.extend(equalities)
    return program, objective


def chsh_target(model: MomentModel, value: float) -> LinearEquality:
    """K_CHSH of the chi blocks pinned to `value`."""
    chsh = functional(model, chsh_coefficients())
    return LinearEquality(dict(chsh.coefficients), value - chsh.constant, "chsh")


def _solve(
    model: MomentModel,
    equalities: Sequence[LinearEquality],
    context: str,
    tol: float,
) -> SdpSolution:
    program, objective = robustness_program(model, equalities)
    return require_optimal(program.solve(objective, "minimize", tol), context)


def tsr_bound(
    data: CorrelationTable,
    regime: ConstraintRegime,
    level: int,
    tol: float = SOLVER_TOL_DEFAULT,
    store: SpanStore | None = None,
) -> BoundResult:
    """Lower bound on the temporal steering robustness behind an observed table."""
    model = build_model(data.scenario, level)
    regime_equalities, span = regime.constraints(model, store)
    solution = _solve(
        model,
        [*bind_data(model, data), *regime_equalities],
        f"tsr {regime.label} level {level}",
        tol,
    )
    parameter = chsh_value(data) if data.scenario.shape == CHSH_SCENARIO.shape else None
    return _record("tsr", regime, level, parameter, solution, span)


def chsh_grid(regime: ConstraintRegime, points: int = CURVE_POINTS) -> np.ndarray:
    """Evenly spaced K_CHSH values from the classical value to the regime's maximum."""
    if points < 2:
        raise ConfigError(f"A curve needs at least 2 points, got {points}")
    return np.linspace(CHSH_CLASSICAL, _chsh_ceiling(regime), points)


def _chsh_ceiling(regime: ConstraintRegime) -> float:
    return CHSH_QUANTUM if regime.tag in ("dim-rank", "nsit") else CHSH_ALGEBRAIC


def tsr_at_chsh(
    value: float,
    regime: ConstraintRegime,
    level: int,
    tol: float = SOLVER_TOL_DEFAULT,
    store: SpanStore | None = None,
    *,
    model: MomentModel | None = None,
    regime_equalities: Sequence[LinearEquality] | None = None,
    span: SpanBasis | None = None,
) -> BoundResult:
    """Minimal robustness over all tables with K_CHSH = value."""
    if model is None:
        model = build_model(CHSH_SCENARIO, level)
    if regime_equalities is None:
        regime_equalities, span = regime.constraints(model, store)

    solution = _solve(
        model,
        [chsh_target(model, value), *regime_equalities],
        f"tsr {regime.label} level {level} at K={value:.9g}",
        tol,
    )
    return _record("tsr-curve", regime, level, value, solution, span)


def tsr_curve(
    regime: ConstraintRegime,
    level: int,
    values: Sequence[float] | None = None,
    tol: float = SOLVER_TOL_DEFAULT,
    store: SpanStore | None = None,
    workers: int | None = None,
) -> list[BoundResult]:
    """
    tsr_at_chsh over a grid of K_CHSH values, one SDP per point.

    The span (if any) is resolved once and shared read-only by all points.
    """
    grid = chsh_grid(regime) if values is None else np.asarray(values, dtype=float)
    ceiling = _chsh_ceiling(regime)
    if grid.size == 0 or grid.min() < CHSH_CLASSICAL - _GRID_SLACK or grid.max() > ceiling + _GRID_SLACK:
        raise InvalidScenarioError(
            f"K_CHSH grid must lie in [{CHSH_CLASSICAL:g}, {ceiling:.9g}] for regime {regime.label}"
        )

    model = build_model(CHSH_SCENARIO, level)
    regime_equalities, span = regime.constraints(model, store)
    logger.info("tsr curve %s level %d: %d points", regime.label, level, grid.size)

    def task(value: float) -> BoundResult:
        return tsr_at_chsh(
            value,
            regime,
            level,
            tol,
            model=model,
            regime_equalities=regime_equalities,
            span=span,
        )

    return run_grid("tsr-curve", regime.label, level, list(grid), task, workers)


def straight_line(value: float) -> float:
    """Robustness of the optimal qubit strategy mixed with a classical one."""
    return (value - CHSH_CLASSICAL) * (np.sqrt(2.0) - 1.0) / 2.0


def _record(
    application: str,
    regime: ConstraintRegime,
    level: int,
    parameter: float | None,
    solution: SdpSolution,
    span: SpanBasis | None,
) -> BoundResult:
    span_id = span.span_id if span is not None else None
    track_solve(
        application=application,
        status=solution.status,
        value=solution.dual_bound,
        gap=solution.gap,
        iterations=solution.iterations,
        span_id=span_id,
        parameter=parameter,
    )
    return BoundResult(
        application=application,
        regime=regime.label,
        level=level,
        parameter=parameter,
        value=solution.dual_bound,
        gap=solution.gap,
        status=solution.status,
        span_id=span_id,
        seed=regime.seed if span is not None else None,
    )
