from itertools import combinations

import numpy as np
import pytest

from qtemporal.apps.program import MomentProgram
from qtemporal.apps.steering import chsh_target, robustness_program
from qtemporal.moment import CHSH_SCENARIO, build_model, chsh_coefficients, functional, normalization, nsit_constraints
from qtemporal.sdp import (
    LmiBlock,
    LpProblem,
    SdpProblem,
    check_certificate,
    dump_problem,
    embed_hermitian,
    load_problem,
    solve_lp,
    solve_sdp,
)
from qtemporal.sdp import ipm

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)


def _block(constant, *coefficients, var_ids=None) -> LmiBlock:
    constant = np.asarray(constant, dtype=complex)
    ids = np.arange(len(coefficients)) if var_ids is None else np.asarray(var_ids)
    stacked = (
        np.stack([np.asarray(c, dtype=complex) for c in coefficients])
        if coefficients
        else np.zeros((0, *constant.shape), dtype=complex)
    )
    return LmiBlock(constant=constant, var_ids=ids, coefficients=stacked)


def _problem(n_vars, objective, blocks, eq_matrix=None, eq_rhs=None, sense="maximize") -> SdpProblem:
    return SdpProblem(
        n_vars=n_vars,
        objective=np.asarray(objective, dtype=float),
        blocks=tuple(blocks),
        eq_matrix=np.zeros((0, n_vars)) if eq_matrix is None else np.asarray(eq_matrix, dtype=float),
        eq_rhs=np.zeros(0) if eq_rhs is None else np.asarray(eq_rhs, dtype=float),
        sense=sense,
    )


def _nsit_chsh_problem() -> SdpProblem:
    model = build_model(CHSH_SCENARIO, 1)
    program = MomentProgram.from_model(model)
    program.extend(normalization(model))
    program.extend(nsit_constraints(model))
    return program.to_problem(functional(model, chsh_coefficients()), "maximize")


def test_embedding_doubles_the_spectrum() -> None:
    rng = np.random.default_rng(7)
    for _ in range(20):
        raw = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        hermitian = raw + raw.conj().T
        expected = np.sort(np.repeat(np.linalg.eigvalsh(hermitian), 2))
        assert np.allclose(np.linalg.eigvalsh(embed_hermitian(hermitian)), expected)


def test_embedding_rejects_bad_input() -> None:
    with pytest.raises(ValueError):
        embed_hermitian(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        embed_hermitian(np.array([[0, 1], [0, 0]], dtype=complex))


def test_real_two_by_two() -> None:
    # [[1, x], [x, 1]] PSD  <=>  |x| <= 1
    problem = _problem(1, [1.0], [_block(np.eye(2), SIGMA_X)])
    solution = solve_sdp(problem)
    assert solution.status == "optimal"
    assert solution.value == pytest.approx(1.0, abs=1e-6)
    assert solution.dual_bound == pytest.approx(1.0, abs=1e-6)
    assert solution.min_eigenvalue > -1e-6


def test_complex_entry_with_equality() -> None:
    # [[1, x0 - i x1], [x0 + i x1, 1]] PSD with x1 = 1/2
    problem = _problem(
        2,
        [1.0, 0.0],
        [_block(np.eye(2), SIGMA_X, SIGMA_Y)],
        eq_matrix=[[0.0, 1.0]],
        eq_rhs=[0.5],
    )
    solution = solve_sdp(problem)
    assert solution.status == "optimal"
    assert solution.value == pytest.approx(np.sqrt(0.75), abs=1e-6)
    assert solution.x[1] == pytest.approx(0.5, abs=1e-8)


def test_minimize_with_constant_offset() -> None:
    problem = SdpProblem(
        n_vars=1,
        objective=np.array([1.0]),
        blocks=(_block([[0, 1], [1, 0]], np.eye(2)),),
        sense="minimize",
        objective_constant=-1.0,
    )
    solution = solve_sdp(problem)
    assert solution.status == "optimal"
    assert solution.value == pytest.approx(0.0, abs=1e-6)


def test_fully_determined_problems() -> None:
    feasible = _problem(1, [2.0], [_block([[0.0]], [[1.0]])], eq_matrix=[[1.0]], eq_rhs=[3.0])
    solution = solve_sdp(feasible)
    assert solution.status == "optimal"
    assert solution.value == pytest.approx(6.0)

    infeasible = _problem(1, [1.0], [_block([[0.0]], [[1.0]])], eq_matrix=[[1.0]], eq_rhs=[-1.0])
    assert solve_sdp(infeasible).status == "infeasible"


def test_inconsistent_equalities_are_infeasible() -> None:
    problem = _problem(1, [1.0], [_block(np.eye(2), SIGMA_X)], eq_matrix=[[1.0], [1.0]], eq_rhs=[0.1, 0.2])
    solution = solve_sdp(problem)
    assert solution.status == "infeasible"
    assert solution.x is None


def test_detects_infeasible_lmi() -> None:
    # x >= 0 and -x - 1 >= 0
    problem = _problem(1, [1.0], [_block(np.diag([0.0, -1.0]), np.diag([1.0, -1.0]))])
    assert solve_sdp(problem).status in ("infeasible", "numerical-failure")


def test_detects_unbounded_objective() -> None:
    unseen = _problem(2, [0.0, 1.0], [_block(np.eye(2), SIGMA_X, var_ids=[0])])
    assert solve_sdp(unseen).status == "unbounded"

    ray = _problem(1, [1.0], [_block([[0.0]], [[1.0]])])
    assert solve_sdp(ray).status in ("unbounded", "numerical-failure")


def test_tolerance_range_is_enforced() -> None:
    problem = _problem(1, [1.0], [_block(np.eye(2), SIGMA_X)])
    with pytest.raises(ValueError):
        solve_sdp(problem, tol=1e-12)
    with pytest.raises(ValueError):
        solve_sdp(problem, tol=1e-2)


def test_validate_rejects_non_hermitian_blocks() -> None:
    problem = _problem(1, [1.0], [_block(np.eye(2), [[0, 1], [0, 0]])])
    with pytest.raises(ValueError, match="Hermitian"):
        problem.validate()


def test_nsit_chsh_certificate() -> None:
    problem = _nsit_chsh_problem()
    solution = solve_sdp(problem)
    assert solution.status == "optimal"
    assert solution.value == pytest.approx(2.0 * np.sqrt(2.0), abs=1e-4)
    residual, min_eig = check_certificate(problem, solution.x)
    assert residual < 1e-6
    assert min_eig > -1e-6
    assert solution.dual_bound >= solution.value - 1e-6


def test_combine_merges_shared_variables() -> None:
    first = _block(np.eye(2), SIGMA_X, var_ids=[3])
    second = _block(np.zeros((2, 2)), np.eye(2), SIGMA_X, var_ids=[1, 3])
    merged = LmiBlock.combine([(1.0, first), (-2.0, second)], label="diff")
    assert list(merged.var_ids) == [1, 3]
    x = np.array([0.0, 0.7, 0.0, 0.4])
    assert np.allclose(merged.evaluate(x), first.evaluate(x) - 2.0 * second.evaluate(x))


def test_dump_and_reload_give_the_same_bound(tmp_path) -> None:
    problem = _nsit_chsh_problem()
    path = tmp_path / "chsh.sdp"
    dump_problem(problem, path)
    assert path.read_text().startswith("qtemporal-sdp 1\n")

    loaded = load_problem(path)
    assert loaded.n_vars == problem.n_vars
    assert np.array_equal(loaded.eq_matrix, problem.eq_matrix)
    assert solve_sdp(loaded).value == pytest.approx(solve_sdp(problem).value, abs=1e-7)


def test_load_rejects_foreign_files(tmp_path) -> None:
    path = tmp_path / "other.txt"
    path.write_text("something else\n")
    with pytest.raises(ValueError):
        load_problem(path)


def test_cvxpy_agrees_with_interior_point() -> None:
    pytest.importorskip("cvxpy")
    from qtemporal.sdp.external import solve_with_cvxpy

    problem = _nsit_chsh_problem()
    assert solve_with_cvxpy(problem) == pytest.approx(solve_sdp(problem).value, abs=1e-4)


def test_lp_vertex() -> None:
    solution = solve_lp(
        LpProblem(
            objective=np.array([1.0, 1.0]),
            ub_matrix=np.array([[1.0, 2.0], [3.0, 1.0]]),
            ub_rhs=np.array([4.0, 6.0]),
        )
    )
    assert solution.status == "optimal"
    assert solution.value == pytest.approx(2.8)
    assert np.allclose(solution.x, [1.6, 1.2])


def test_lp_infeasible() -> None:
    solution = solve_lp(
        LpProblem(
            objective=np.array([1.0]),
            eq_matrix=np.array([[1.0]]),
            eq_rhs=np.array([-1.0]),
        )
    )
    assert solution.status == "infeasible"


def _tsr_problem(value: float, level: int = 2) -> SdpProblem:
    model = build_model(CHSH_SCENARIO, level)
    program, objective = robustness_program(model, [chsh_target(model, value)])
    return program.to_problem(objective, "minimize")


@pytest.mark.parametrize("factor", [1e-3, 1.0, 1e3])
def test_objective_scaling_commutes_with_the_solve(factor: float) -> None:
    problem = _tsr_problem(2.6)
    reference = solve_sdp(problem)
    scaled = solve_sdp(problem.scaled(factor))
    assert reference.status == scaled.status == "optimal"
    assert scaled.value / factor == pytest.approx(reference.value, abs=1e-7)
    assert scaled.dual_bound / factor == pytest.approx(reference.dual_bound, abs=1e-7)


def test_unbounded_detection_ignores_objective_scale() -> None:
    unseen = _problem(2, [1.0, 1.0], [_block(np.eye(2), SIGMA_X, var_ids=[0])])
    for factor in (1e-12, 1.0, 1e6):
        assert solve_sdp(unseen.scaled(factor)).status == "unbounded"

    seen = _problem(2, [1.0, 0.0], [_block(np.eye(2), SIGMA_X, var_ids=[0])]).scaled(1e-12)
    solution = solve_sdp(seen)
    assert solution.status == "optimal"
    assert solution.value / 1e-12 == pytest.approx(1.0, abs=1e-6)


def test_uncertified_iterate_is_downgraded(monkeypatch) -> None:
    problem = _problem(1, [1.0], [_block(np.eye(2), SIGMA_X)])
    reduced = ipm._reduce(problem)
    # x = 1.5 puts an eigenvalue of [[1, x], [x, 1]] at -0.5
    y = np.linalg.lstsq(reduced.basis, np.array([1.5]) - reduced.x0, rcond=None)[0]
    monkeypatch.setattr(ipm, "_hkm", lambda **kwargs: ipm._Iterate("optimal", y, -1.5, -1.5, 7, 0.0))

    solution = solve_sdp(problem)
    assert solution.status == "numerical-failure"
    assert solution.min_eigenvalue == pytest.approx(-0.5)
    assert solution.dual_bound >= solution.value


def test_minimize_bound_never_exceeds_the_value() -> None:
    for value in (2.0, 2.2, 2.6, 3.0):
        solution = solve_sdp(_tsr_problem(value, level=1))
        assert solution.status == "optimal"
        assert solution.dual_bound <= solution.value
        assert solution.gap == pytest.approx(solution.value - solution.dual_bound)


def _vertex_optimum(c: np.ndarray, A: np.ndarray, b: np.ndarray) -> float:
    """max c.x over {A x <= b, x >= 0} by trying every basis."""
    n = len(c)
    rows = np.vstack([A, -np.eye(n)])
    rhs = np.concatenate([b, np.zeros(n)])
    best = -np.inf
    for active in combinations(range(len(rows)), n):
        system = rows[list(active)]
        if abs(np.linalg.det(system)) < 1e-10:
            continue
        x = np.linalg.solve(system, rhs[list(active)])
        if np.all(rows @ x <= rhs + 1e-9):
            best = max(best, float(c @ x))
    return best


def test_random_lps_match_vertex_enumeration() -> None:
    rng = np.random.default_rng(314)
    for _ in range(60):
        n = int(rng.integers(1, 5))
        m = int(rng.integers(1, 7))
        # positive rows with positive rhs: the origin is feasible and the region bounded
        A = rng.uniform(0.1, 1.0, size=(m, n))
        b = rng.uniform(0.5, 2.0, size=m)
        c = rng.normal(size=n)
        solution = solve_lp(LpProblem(objective=c, ub_matrix=A, ub_rhs=b))
        assert solution.status == "optimal"
        assert solution.value == pytest.approx(_vertex_optimum(c, A, b), abs=1e-7)
        assert np.all(A @ solution.x <= b + 1e-7)
        assert np.all(solution.x >= -1e-9)
