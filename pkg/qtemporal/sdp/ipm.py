"""
Primal-dual interior-point solver for small block LMI problems.

Pipeline:
1. eliminate the linear equalities: x = x0 + N z (SVD nullspace)
2. embed every Hermitian block in a real symmetric one
3. drop z-directions no block can see (unbounded if the objective can)
4. run an infeasible-start HKM path-following method with Mehrotra
   predictor-corrector on the pair

    (P)  min <C, X>   s.t. <A_i, X> = b_i,  X PSD
    (D)  max b.y      s.t. Z = C - sum_i y_i A_i PSD

   where (D) is the reduced LMI problem: C = G0, A_i = -G_i, b = -c / |c|.
5. gate an optimal status on check_certificate and bound the value from
   <C, X>, corrected by the residual of X

Infeasibility and unboundedness are detected from diverging iterates via
Farkas-type certificate checks.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace

import numpy as np
from scipy import linalg

from qtemporal.core.tolerances import SOLVER_MAX_ITERATIONS, SOLVER_TOL_DEFAULT, SOLVER_TOL_MAX, SOLVER_TOL_MIN
from qtemporal.sdp.embedding import embed_stack
from qtemporal.sdp.problem import SdpProblem, SdpSolution, SolveStatus, check_certificate

logger = logging.getLogger(__name__)

_RANK_RTOL = 1e-10


@dataclass
class _Reduced:
    x0: np.ndarray
    basis: np.ndarray
    constants: list[np.ndarray]
    directions: list[np.ndarray]
    cost: np.ndarray


@dataclass
class _Iterate:
    status: SolveStatus
    y: np.ndarray
    primal_objective: float
    dual_objective: float
    iterations: int
    primal_residual: float = 0.0


def _eliminate_equalities(
    matrix: np.ndarray, rhs: np.ndarray, n_vars: int
) -> tuple[np.ndarray, np.ndarray] | None:
    if len(rhs) == 0:
        return np.zeros(n_vars), np.eye(n_vars)

    u, s, vt = np.linalg.svd(matrix, full_matrices=True)
    rank = int(np.sum(s > _RANK_RTOL * max(s.max(initial=0.0), 1.0)))
    x0 = vt[:rank].T @ ((u[:, :rank].T @ rhs) / s[:rank])
    residual = float(np.max(np.abs(matrix @ x0 - rhs)))
    if residual > 1e-9 * (1.0 + float(np.max(np.abs(rhs)))):
        logger.debug("equalities inconsistent, residual %.3e", residual)
        return None
    return x0, vt[rank:].T


def _embed_blocks(
    problem: SdpProblem, x0: np.ndarray, basis: np.ndarray
) -> tuple[list[np.ndarray], list[np.ndarray]]:
    constants: list[np.ndarray] = []
    directions: list[np.ndarray] = []
    for block in problem.blocks:
        constant = block.evaluate(x0)
        if len(block.var_ids):
            local = np.einsum("kr,kij->rij", basis[block.var_ids], block.coefficients)
        else:
            local = np.zeros((basis.shape[1], block.size, block.size), dtype=complex)
        constants.append(embed_stack(constant[None])[0])
        directions.append(embed_stack(local))
    return constants, directions


def _reduce(problem: SdpProblem) -> _Reduced | SolveStatus:
    affine = _eliminate_equalities(problem.eq_matrix, problem.eq_rhs, problem.n_vars)
    if affine is None:
        return "infeasible"
    x0, basis = affine

    sign = 1.0 if problem.sense == "minimize" else -1.0
    cost = basis.T @ (sign * problem.objective)
    constants, directions = _embed_blocks(problem, x0, basis)

    r = basis.shape[1]
    if r == 0:
        return _Reduced(x0, basis, constants, directions, cost)

    image = (
        np.concatenate([d.reshape(r, -1) for d in directions], axis=1)
        if directions
        else np.zeros((r, 0))
    )
    u, s, _ = np.linalg.svd(image, full_matrices=True)
    rank = int(np.sum(s > _RANK_RTOL * max(s.max(initial=0.0), 1.0)))
    invisible = u[:, rank:]
    if invisible.shape[1] and np.linalg.norm(invisible.T @ cost) > 1e-9 * np.linalg.norm(cost):
        return "unbounded"

    keep = u[:, :rank]
    return _Reduced(
        x0=x0,
        basis=basis @ keep,
        constants=constants,
        directions=[np.einsum("ri,rpq->ipq", keep, d) for d in directions],
        cost=keep.T @ cost,
    )


def _apply(matrices: list[np.ndarray], blocks: list[np.ndarray]) -> np.ndarray:
    total = np.zeros(matrices[0].shape[0])
    for a_b, w_b in zip(matrices, blocks):
        total += a_b.reshape(a_b.shape[0], -1) @ w_b.reshape(-1)
    return total


def _adjoint(matrices: list[np.ndarray], y: np.ndarray) -> list[np.ndarray]:
    return [np.tensordot(y, a_b, axes=1) for a_b in matrices]


def _inner(left: list[np.ndarray], right: list[np.ndarray]) -> float:
    return float(sum(np.vdot(l_b, r_b) for l_b, r_b in zip(left, right)))


def _sym(matrix: np.ndarray) -> np.ndarray:
    return 0.5 * (matrix + matrix.T)


def _max_step(current: list[np.ndarray], step: list[np.ndarray]) -> float:
    """Largest alpha keeping current + alpha * step PSD."""
    smallest = np.inf
    for cur_b, step_b in zip(current, step):
        eigenvalues = linalg.eigh(_sym(step_b), _sym(cur_b), eigvals_only=True)
        smallest = min(smallest, float(eigenvalues.min()))
    return np.inf if smallest >= 0 else -1.0 / smallest


def _hkm(
    constants: list[np.ndarray],
    matrices: list[np.ndarray],
    rhs: np.ndarray,
    tol: float,
    max_iterations: int,
) -> _Iterate:
    sizes = [c.shape[0] for c in constants]
    n_total = sum(sizes)
    n_max = max(sizes)
    r = len(rhs)

    norm_c = float(np.sqrt(sum(np.sum(c**2) for c in constants)))
    norm_a = np.sqrt(sum(np.sum(a_b**2, axis=(1, 2)) for a_b in matrices))
    norm_b = float(np.linalg.norm(rhs))

    xi = max(10.0, np.sqrt(n_max), n_max * float(np.max((1.0 + np.abs(rhs)) / (1.0 + norm_a))))
    eta = max(10.0, np.sqrt(n_max), float(norm_a.max()), norm_c)
    X = [xi * np.eye(n) for n in sizes]
    Z = [eta * np.eye(n) for n in sizes]
    y = np.zeros(r)

    pobj = dobj = 0.0
    best = _Iterate("numerical-failure", y, pobj, dobj, 0, np.inf)
    best_accuracy = np.inf
    for iteration in range(1, max_iterations + 1):
        AX = _apply(matrices, X)
        rp = rhs - AX
        Aty = _adjoint(matrices, y)
        Rd = [c_b - z_b - a_b for c_b, z_b, a_b in zip(constants, Z, Aty)]

        pobj = _inner(constants, X)
        dobj = float(rhs @ y)
        mu = _inner(X, Z) / n_total
        relgap = abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj))
        norm_rp = float(np.linalg.norm(rp))
        pinf = norm_rp / (1.0 + norm_b)
        dinf = float(np.sqrt(sum(np.sum(d**2) for d in Rd))) / (1.0 + norm_c)

        logger.debug(
            "iter %3d  pobj % .10e  dobj % .10e  gap %.2e  pinf %.2e  dinf %.2e",
            iteration, pobj, dobj, relgap, pinf, dinf,
        )
        if max(relgap, pinf, dinf) <= tol:
            return _Iterate("optimal", y, pobj, dobj, iteration, norm_rp)
        if max(relgap, pinf, dinf) < best_accuracy:
            best_accuracy = max(relgap, pinf, dinf)
            best = _Iterate("numerical-failure", y, pobj, dobj, iteration, norm_rp)

        # X PSD, A(X) ~ 0, <C, X> < 0: no y makes C - A*(y) PSD.
        norm_x = float(np.sqrt(sum(np.sum(x_b**2) for x_b in X)))
        if -pobj > tol * (1.0 + norm_x) and np.linalg.norm(AX) <= tol * -pobj:
            return _Iterate("infeasible", y, pobj, dobj, iteration, norm_rp)
        # A*(y) + Z ~ 0 with b.y > 0: a recession direction improving (D).
        rd_gap = float(np.sqrt(sum(np.sum((c_b - d_b) ** 2) for c_b, d_b in zip(constants, Rd))))
        if dobj > 0 and rd_gap <= tol * dobj and np.linalg.norm(y) > 1e6:
            return _Iterate("unbounded", y, pobj, dobj, iteration, norm_rp)

        try:
            Zinv = [linalg.cho_solve(linalg.cho_factor(z_b), np.eye(z_b.shape[0])) for z_b in Z]
            Zinv = [_sym(zi) for zi in Zinv]

            schur = np.zeros((r, r))
            for a_b, x_b, zi_b in zip(matrices, X, Zinv):
                flat = a_b.reshape(r, -1)
                scaled = (zi_b @ a_b @ x_b).reshape(r, -1)
                schur += flat @ scaled.T
            schur = _sym(schur)
            try:
                factor = linalg.cho_factor(schur)

                def solve_schur(v: np.ndarray) -> np.ndarray:
                    return linalg.cho_solve(factor, v)

            except linalg.LinAlgError:

                def solve_schur(v: np.ndarray) -> np.ndarray:
                    return np.linalg.lstsq(schur, v, rcond=None)[0]

            XRdZi = [x_b @ d_b @ zi_b for x_b, d_b, zi_b in zip(X, Rd, Zinv)]
            base_rhs = rp + _apply(matrices, XRdZi)

            def direction(sigma: float, correction: list[np.ndarray] | None):
                H = [sigma * mu * zi_b - x_b for zi_b, x_b in zip(Zinv, X)]
                if correction is not None:
                    H = [h_b - k_b for h_b, k_b in zip(H, correction)]
                dy = solve_schur(base_rhs - _apply(matrices, H))
                dZ = [d_b - a_b for d_b, a_b in zip(Rd, _adjoint(matrices, dy))]
                dX = [_sym(h_b - x_b @ dz_b @ zi_b) for h_b, x_b, dz_b, zi_b in zip(H, X, dZ, Zinv)]
                return dX, dy, dZ

            # predictor
            dX, dy, dZ = direction(0.0, None)
            alpha_p = min(1.0, _max_step(X, dX))
            alpha_d = min(1.0, _max_step(Z, dZ))
            mu_aff = _inner(
                [x_b + alpha_p * s_b for x_b, s_b in zip(X, dX)],
                [z_b + alpha_d * s_b for z_b, s_b in zip(Z, dZ)],
            ) / n_total
            exponent = max(1.0, 3.0 * min(alpha_p, alpha_d) ** 2)
            sigma = min(1.0, max(0.0, mu_aff / mu) ** exponent)

            # corrector
            correction = [dx_b @ dz_b @ zi_b for dx_b, dz_b, zi_b in zip(dX, dZ, Zinv)]
            dX, dy, dZ = direction(sigma, correction)
            gamma = 0.9 + 0.09 * min(alpha_p, alpha_d)
            alpha_p = min(1.0, gamma * _max_step(X, dX))
            alpha_d = min(1.0, gamma * _max_step(Z, dZ))
        except (linalg.LinAlgError, ValueError) as exc:
            logger.debug("iteration %d aborted: %s", iteration, exc)
            return _stalled(best, best_accuracy, tol, iteration)

        X = [x_b + alpha_p * s_b for x_b, s_b in zip(X, dX)]
        y = y + alpha_d * dy
        Z = [z_b + alpha_d * s_b for z_b, s_b in zip(Z, dZ)]

    return _stalled(best, best_accuracy, tol, max_iterations)


def _stalled(best: _Iterate, accuracy: float, tol: float, iterations: int) -> _Iterate:
    # Problems without a strictly feasible point stall short of tol.
    if accuracy <= np.sqrt(tol):
        logger.warning("solver stalled at accuracy %.2e (target %.0e); accepting best iterate", accuracy, tol)
        return replace(best, status="optimal", iterations=iterations)
    return replace(best, status="numerical-failure", iterations=iterations)


def _certified(problem: SdpProblem, reduced: _Reduced, residual: float, min_eig: float, tol: float) -> bool:
    slack = 10.0 * tol
    rhs_scale = 1.0 + float(np.max(np.abs(problem.eq_rhs), initial=0.0))
    norm_c = float(np.sqrt(sum(np.sum(c**2) for c in reduced.constants)))
    return residual <= slack * rhs_scale and min_eig >= -slack * (1.0 + norm_c)


def _failed(status: SolveStatus, iterations: int = 0) -> SdpSolution:
    nan = float("nan")
    return SdpSolution(
        status=status,
        value=nan,
        x=None,
        dual_bound=nan,
        gap=nan,
        equality_residual=nan,
        min_eigenvalue=nan,
        iterations=iterations,
    )


def solve_sdp(
    problem: SdpProblem,
    tol: float = SOLVER_TOL_DEFAULT,
    max_iterations: int = SOLVER_MAX_ITERATIONS,
) -> SdpSolution:
    """
    Solve a block LMI problem with linear equalities.

    Args:
        problem: the standard-form problem.
        tol: target for relative gap and both infeasibilities, in [1e-10, 1e-4].
        max_iterations: cap before reporting numerical-failure.

    Returns:
        SdpSolution; non-optimal outcomes are reported through its status.
        An optimal status means the iterate passed check_certificate at 10 * tol.
    """
    if not SOLVER_TOL_MIN <= tol <= SOLVER_TOL_MAX:
        raise ValueError(f"Solver tolerance {tol:g} outside [{SOLVER_TOL_MIN:g}, {SOLVER_TOL_MAX:g}]")
    problem.validate()

    reduced = _reduce(problem)
    if isinstance(reduced, str):
        return _failed(reduced)

    sign = 1.0 if problem.sense == "minimize" else -1.0
    shift = float(sign * problem.objective @ reduced.x0)

    if reduced.basis.shape[1] == 0:
        x = reduced.x0
        residual, min_eig = check_certificate(problem, x)
        if min_eig < -tol * (1.0 + max((np.abs(c).max() for c in reduced.constants), default=0.0)):
            return _failed("infeasible")
        value = problem.objective_value(x)
        return SdpSolution("optimal", value, x, value, 0.0, residual, min_eig, 0)

    # unit-norm cost keeps the stopping rule independent of objective scale
    scale = float(np.linalg.norm(reduced.cost)) or 1.0
    iterate = _hkm(
        constants=reduced.constants,
        matrices=[-d for d in reduced.directions],
        rhs=-reduced.cost / scale,
        tol=tol,
        max_iterations=max_iterations,
    )
    if iterate.status in ("infeasible", "unbounded"):
        return _failed(iterate.status, iterate.iterations)

    x = reduced.x0 + reduced.basis @ iterate.y
    residual, min_eig = check_certificate(problem, x)
    value = problem.objective_value(x)
    status = iterate.status
    if status == "optimal" and not _certified(problem, reduced, residual, min_eig, tol):
        logger.warning(
            "iterate fails the certificate (residual %.2e, min eigenvalue %.2e); reporting numerical-failure",
            residual, min_eig,
        )
        status = "numerical-failure"

    # <C, X> bounds the min-form objective up to the primal residual of X
    slack = float(np.linalg.norm(iterate.y)) * iterate.primal_residual
    lower = shift - scale * (iterate.primal_objective + slack)
    dual_bound = sign * lower + problem.objective_constant
    dual_bound = min(dual_bound, value) if problem.sense == "minimize" else max(dual_bound, value)
    solution = SdpSolution(
        status=status,
        value=value,
        x=x,
        dual_bound=dual_bound,
        gap=abs(value - dual_bound),
        equality_residual=residual,
        min_eigenvalue=min_eig,
        iterations=iterate.iterations,
    )
    logger.debug(
        "sdp %s after %d iterations: value %.10f bound %.10f",
        solution.status, solution.iterations, solution.value, solution.dual_bound,
    )
    return solution
