import json

import numpy as np
import pytest

from qtemporal.apps import (
    CHSH_QUANTUM,
    QRAC_CLASSICAL,
    BoundResult,
    ConstraintRegime,
    DeterministicStrategySet,
    FidelityFunctional,
    chsh_bound,
    classical_fidelity,
    qrac_bound,
    qrac_coefficients,
    qrac_quantum_value,
    qrac_success,
    reference_fidelity,
    selftest_fidelity,
    straight_line,
    tsr_at_chsh,
    tsr_bound,
    tsr_curve,
    write_results_csv,
)
from qtemporal.apps.program import MomentProgram
from qtemporal.apps.qrac import qrac_objective
from qtemporal.apps.selftest import classical_fidelity_closed_form, selftest_curve, selftest_program
from qtemporal.apps.steering import chsh_grid, chsh_target, robustness_program
from qtemporal.apps.sweep import run_grid
from qtemporal.core.errors import (
    ConfigError,
    InvalidRealizationError,
    InvalidScenarioError,
    SolverError,
)
from qtemporal.moment import (
    CHSH_SCENARIO,
    CorrelationTable,
    build_model,
    chsh_coefficients,
    deterministic_table,
    functional,
    normalization,
)
from qtemporal.realizations import born_probabilities
from qtemporal.realizations.linalg import projector
from qtemporal.realizations.reference import (
    COS_PI_8,
    SIN_PI_8,
    chsh_realization,
    qrac_realization,
    qrac_reference_states,
    qrac_scenario,
)
from qtemporal.sdp import SdpProblem, solve_sdp

DI = ConstraintRegime("di")
NSIT = ConstraintRegime("nsit")
DIM = ConstraintRegime("dim", dim=2)
DIM_RANK = ConstraintRegime("dim-rank", dim=2, rank=1)


def _read_events(path):
    if not path.exists():
        return []
    return [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines() if line.strip()]


def _local_table(seed: int) -> CorrelationTable:
    rng = np.random.default_rng(seed)
    strategies = [
        deterministic_table(CHSH_SCENARIO, (a0, a1), (b0, b1))
        for a0 in (0, 1)
        for a1 in (0, 1)
        for b0 in (0, 1)
        for b1 in (0, 1)
    ]
    weights = rng.dirichlet(np.ones(len(strategies)))
    values = sum(w * table.values for w, table in zip(weights, strategies))
    return CorrelationTable(CHSH_SCENARIO, values)


# ==========================================================
# Regimes
# ==========================================================


def test_regime_validation() -> None:
    assert DI.label == "di"
    assert DIM.label == "dim(d=2)"
    assert DIM_RANK.label == "dim-rank(d=2,k=1)"
    assert DIM.uses_span and not NSIT.uses_span

    with pytest.raises(ConfigError):
        ConstraintRegime("dim")
    with pytest.raises(ConfigError):
        ConstraintRegime("dim-rank", dim=2)
    with pytest.raises(ConfigError):
        ConstraintRegime("dim-rank", dim=2, rank=3)
    with pytest.raises(ConfigError):
        ConstraintRegime("nsit", dim=2)
    with pytest.raises(ConfigError):
        ConstraintRegime("dim", dim=2, rank=1)
    with pytest.raises(ConfigError):
        ConstraintRegime("bogus")


# ==========================================================
# Temporal CHSH
# ==========================================================


@pytest.mark.parametrize("level", [1, 2, 3])
def test_chsh_device_independent_is_algebraic(level: int) -> None:
    result = chsh_bound(DI, level)
    assert result.status == "optimal"
    assert result.value == pytest.approx(4.0, abs=1e-6)
    assert result.span_id is None


def test_chsh_nsit_is_tsirelson() -> None:
    assert chsh_bound(NSIT, 1).value == pytest.approx(CHSH_QUANTUM, abs=1e-4)


def test_chsh_dimension_regimes() -> None:
    dim = chsh_bound(DIM, 1)
    rank = chsh_bound(DIM_RANK, 1)
    assert dim.value == pytest.approx(4.0, abs=1e-3)
    assert rank.value == pytest.approx(CHSH_QUANTUM, abs=1e-3)
    assert rank.span_id is not None and rank.seed == 0


def test_chsh_regime_ordering_and_soundness() -> None:
    bounds = {regime.label: chsh_bound(regime, 1).value for regime in (DI, DIM, DIM_RANK, NSIT)}
    slack = 1e-6
    assert bounds["di"] >= bounds["dim(d=2)"] - slack
    assert bounds["dim(d=2)"] >= bounds["dim-rank(d=2,k=1)"] - slack
    assert bounds["nsit"] <= bounds["di"] + slack
    for value in bounds.values():
        assert value >= CHSH_QUANTUM - 1e-4


def test_chsh_level_monotonicity() -> None:
    assert chsh_bound(NSIT, 2).value <= chsh_bound(NSIT, 1).value + 1e-6


# ==========================================================
# Temporal steering robustness
# ==========================================================


def test_strategy_set() -> None:
    strategies = DeterministicStrategySet(n_outcomes=2, n_settings=2)
    assert len(strategies) == 4
    assert len(strategies.strategies) == 4
    assert strategies.compatible(0, 0) == [0, 1]
    assert strategies.compatible(1, 1) == [1, 3]
    assert strategies.indicator(2, 1, 0) == 1
    assert strategies.indicator(2, 1, 1) == 0

    assert len(DeterministicStrategySet(n_outcomes=3, n_settings=2)) == 9


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_local_tables_have_zero_robustness(seed: int) -> None:
    result = tsr_bound(_local_table(seed), DI, 1)
    assert result.status == "optimal"
    assert result.value == pytest.approx(0.0, abs=1e-6)


def test_quantum_table_is_steerable() -> None:
    table = born_probabilities(chsh_realization(maximally_mixed=True))
    result = tsr_bound(table, NSIT, 1)
    assert result.parameter == pytest.approx(CHSH_QUANTUM, abs=1e-9)
    assert result.value >= straight_line(CHSH_QUANTUM) - 1e-3


def test_nsit_rejects_signalling_data() -> None:
    table = born_probabilities(chsh_realization())
    with pytest.raises(SolverError):
        tsr_bound(table, NSIT, 1)


def test_robustness_at_the_classical_value_vanishes() -> None:
    assert tsr_at_chsh(2.0, DI, 1).value == pytest.approx(0.0, abs=1e-5)


def test_robustness_at_tsirelson_under_nsit() -> None:
    result = tsr_at_chsh(CHSH_QUANTUM, NSIT, 1)
    assert result.value == pytest.approx((np.sqrt(2.0) - 1.0) ** 2, abs=1e-3)


def test_nsit_curve_follows_the_straight_line() -> None:
    grid = [2.0, 2.2, 2.4, 2.6, 2.8]
    results = tsr_curve(NSIT, 1, grid, workers=2)
    assert [r.parameter for r in results] == grid
    for result in results:
        assert result.status == "optimal"
        assert result.value == pytest.approx(straight_line(result.parameter), abs=1e-3)


def test_curve_grid_limits() -> None:
    assert chsh_grid(DI)[-1] == pytest.approx(4.0)
    assert chsh_grid(NSIT)[-1] == pytest.approx(CHSH_QUANTUM)
    assert len(chsh_grid(NSIT)) == 41
    with pytest.raises(InvalidScenarioError):
        tsr_curve(NSIT, 1, [3.0])
    with pytest.raises(InvalidScenarioError):
        tsr_curve(DI, 1, [1.5, 2.0])
    with pytest.raises(ConfigError):
        chsh_grid(DI, points=1)


def test_grid_records_failed_points(run_log_file) -> None:
    def task(value: float) -> BoundResult:
        if value > 1.0:
            raise SolverError("no convergence", status="numerical-failure")
        return BoundResult("demo", "di", 1, value=value, gap=0.0, status="optimal", parameter=value)

    results = run_grid("demo", "di", 1, [0.5, 1.5, 0.75], task, workers=2)
    assert [r.parameter for r in results] == [0.5, 1.5, 0.75]
    assert results[0].ok and results[2].ok
    assert results[1].status == "numerical-failure"
    assert np.isnan(results[1].value)

    events = _read_events(run_log_file)
    assert [e["action"] for e in events] == ["curve_point_failed"]
    assert events[0]["payload"]["parameter"] == 1.5


# ==========================================================
# Random access codes
# ==========================================================


def test_qrac_coefficients_average_success() -> None:
    for n in (2, 3):
        assert sum(qrac_coefficients(n).values()) == pytest.approx(2.0)
        uniform = CorrelationTable.uniform(qrac_scenario(n))
        assert qrac_success(uniform) == pytest.approx(0.5)
        assert qrac_success(born_probabilities(qrac_realization(n))) == pytest.approx(qrac_quantum_value(n), abs=1e-10)


@pytest.mark.parametrize("n", [2, 3])
def test_qrac_bound_matches_quantum_value(n: int) -> None:
    result = qrac_bound(n, DIM_RANK, 1)
    assert result.value == pytest.approx(qrac_quantum_value(n), abs=1e-4)
    assert result.value > QRAC_CLASSICAL
    assert result.parameter == n


def test_qrac_without_dimension_is_trivial() -> None:
    assert qrac_bound(2, DI, 1).value == pytest.approx(1.0, abs=1e-5)


# ==========================================================
# Self-testing
# ==========================================================


def test_fidelity_functional_constants() -> None:
    functional = FidelityFunctional()
    c, s = functional.c, functional.s
    assert c * c - s * s == pytest.approx(1.0 / np.sqrt(2.0), abs=1e-15)
    assert 2.0 * c * s == pytest.approx(1.0 / np.sqrt(2.0), abs=1e-15)
    assert 4.0 * c * s == pytest.approx(np.sqrt(2.0), abs=1e-15)
    assert len(functional.weights) == 16


def test_reference_fidelity_is_one() -> None:
    assert reference_fidelity() == pytest.approx(1.0, abs=1e-10)


def test_selftest_rejects_low_levels() -> None:
    with pytest.raises(InvalidScenarioError):
        selftest_fidelity(qrac_quantum_value(2), level=1)
    with pytest.raises(InvalidScenarioError):
        selftest_fidelity(1.5, level=2)


def test_selftest_at_the_quantum_maximum() -> None:
    result = selftest_fidelity(qrac_quantum_value(2), level=2)
    assert result.value == pytest.approx(1.0, abs=1e-3)
    assert result.span_id is not None


def test_selftest_from_a_full_table() -> None:
    table = born_probabilities(qrac_realization(2))
    result = selftest_fidelity(table, level=2)
    assert result.parameter is None
    assert result.value == pytest.approx(1.0, abs=1e-3)


def test_selftest_bound_weakens_with_the_success_rate() -> None:
    low = selftest_fidelity(0.80, level=2).value
    high = selftest_fidelity(0.84, level=2).value
    assert low <= high + 1e-6
    assert high <= 1.0 + 1e-6


def test_classical_fidelity_of_the_reference_states() -> None:
    assert classical_fidelity() == pytest.approx(COS_PI_8**2, abs=1e-8)
    assert classical_fidelity_closed_form(list(qrac_reference_states(2).values())) == pytest.approx(COS_PI_8**2)
    assert COS_PI_8**2 == pytest.approx(1.0 - SIN_PI_8**2)


def test_classical_fidelity_edge_cases() -> None:
    diagonal = [projector([1, 0]), projector([0, 1]), np.eye(2) / 2]
    assert classical_fidelity(diagonal) == pytest.approx(2.5 / 3.0)
    assert classical_fidelity([projector([1, 0]), projector([0, 1])]) == pytest.approx(1.0)

    rng = np.random.default_rng(9)
    states = []
    for _ in range(5):
        vector = rng.normal(size=3) + 1j * rng.normal(size=3)
        states.append(projector(vector / np.linalg.norm(vector)))
    assert classical_fidelity(states) == pytest.approx(classical_fidelity_closed_form(states), abs=1e-9)

    with pytest.raises(InvalidRealizationError):
        classical_fidelity([np.eye(2)])
    with pytest.raises(InvalidRealizationError):
        classical_fidelity([])


# ==========================================================
# Records
# ==========================================================


def test_results_csv_is_stable(tmp_path) -> None:
    results = [
        BoundResult("chsh", "di", 1, value=4.0000000001234, gap=1e-9, status="optimal"),
        BoundResult("tsr-curve", "nsit", 1, value=0.17157287525, gap=2e-9, status="optimal", parameter=2.8284271247),
    ]
    first = write_results_csv(results, tmp_path / "a.csv").read_bytes()
    second = write_results_csv(results, tmp_path / "b.csv").read_bytes()
    assert first == second

    lines = first.decode().splitlines()
    assert lines[0] == "application,regime,level,parameter,value,gap,status,span_id,seed,config_hash"
    assert lines[1].startswith("chsh,di,1,,4,1e-09,optimal")
    assert "0.171572875" in lines[2]


# ==========================================================
# Certified side of the reported bounds
# ==========================================================


def _chsh_problem(regime: ConstraintRegime) -> SdpProblem:
    model = build_model(CHSH_SCENARIO, 1)
    program = MomentProgram.from_model(model)
    program.extend(normalization(model))
    program.extend(regime.constraints(model)[0])
    return program.to_problem(functional(model, chsh_coefficients()), "maximize")


def _qrac_problem(n: int) -> SdpProblem:
    model = build_model(qrac_scenario(n), 1)
    program = MomentProgram.from_model(model)
    program.extend(normalization(model))
    program.extend(DIM_RANK.constraints(model)[0])
    return program.to_problem(qrac_objective(model, n), "maximize")


def _tsr_problem(value: float) -> SdpProblem:
    model = build_model(CHSH_SCENARIO, 1)
    program, objective = robustness_program(model, [chsh_target(model, value)])
    return program.to_problem(objective, "minimize")


def _selftest_problem(observed: float) -> SdpProblem:
    model = build_model(qrac_scenario(2), 2)
    program, objective = selftest_program(model, observed, DIM_RANK.constraints(model)[0])
    return program.to_problem(objective, "minimize")


BOUND_CASES = {
    "chsh nsit": lambda: _chsh_problem(NSIT),
    "chsh dim-rank": lambda: _chsh_problem(DIM_RANK),
    "qrac 2->1": lambda: _qrac_problem(2),
    "qrac 3->1": lambda: _qrac_problem(3),
    "tsr at 2.2": lambda: _tsr_problem(2.2),
    "tsr at 3.6": lambda: _tsr_problem(3.6),
    "selftest at 0.80": lambda: _selftest_problem(0.80),
    "selftest at 0.84": lambda: _selftest_problem(0.84),
    "selftest at the quantum maximum": lambda: _selftest_problem(qrac_quantum_value(2)),
}


@pytest.mark.parametrize("case", sorted(BOUND_CASES))
def test_dual_bound_lies_on_the_certified_side(case: str) -> None:
    problem = BOUND_CASES[case]()
    solution = solve_sdp(problem)
    assert solution.status == "optimal"
    if problem.sense == "minimize":
        assert solution.dual_bound <= solution.value
    else:
        assert solution.dual_bound >= solution.value
    assert solution.gap <= 1e-3


def test_apps_report_the_dual_bound() -> None:
    maximized = solve_sdp(_chsh_problem(NSIT))
    assert chsh_bound(NSIT, 1).value == pytest.approx(maximized.dual_bound, abs=1e-12)

    minimized = solve_sdp(_selftest_problem(qrac_quantum_value(2)))
    result = selftest_fidelity(qrac_quantum_value(2), level=2)
    assert result.value == pytest.approx(minimized.dual_bound, abs=1e-12)
    assert result.value <= minimized.value


# ==========================================================
# Long-running curves
# ==========================================================


@pytest.mark.slow
def test_device_independent_level5_curve_near_the_straight_line() -> None:
    grid = np.linspace(2.0, CHSH_QUANTUM, 41)
    results = tsr_curve(DI, 5, grid)
    assert len(results) == 41
    assert all(r.status == "optimal" for r in results)
    worst = max(abs(r.value - straight_line(r.parameter)) for r in results)
    assert worst <= 5e-3


@pytest.mark.slow
def test_rank_one_qubit_curve_matches_the_straight_line() -> None:
    results = tsr_curve(DIM_RANK, 1)
    assert len(results) == 41
    for result in results:
        assert result.status == "optimal"
        assert result.value == pytest.approx(straight_line(result.parameter), abs=1e-3)


@pytest.mark.slow
def test_selftest_crosses_the_classical_fidelity_near_0823() -> None:
    grid = np.linspace(0.815, 0.835, 21)
    values = np.array([r.value for r in selftest_curve(grid)])
    threshold = COS_PI_8**2
    above = np.flatnonzero(values > threshold)
    assert len(above) and above[0] > 0
    i = above[0]
    t = (threshold - values[i - 1]) / (values[i] - values[i - 1])
    crossing = grid[i - 1] + t * (grid[i] - grid[i - 1])
    assert crossing == pytest.approx(0.823, abs=2e-3)
