"""Sparse recovery from noiseless linear measurements.

Three solvers share one operator contract (apply/adjoint only, never a
dense matrix): greedy atom selection with least-squares refitting, gradient
descent with hard thresholding, and the equality-constrained l1 program
solved by operator splitting.  A phase-transition harness sweeps sparsity
levels and reports empirical exact-recovery rates.

Determinism: atom selection and thresholding break ties toward the lowest
index, and every randomized trial derives its seed from the master seed and
its grid cell, so identical configurations reproduce identical tables.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import LinearOperator, as_vector
from .parallel import pmap
from .rng import derive_seed, make_rng

SUCCESS_REL_ERROR = 1e-4
RESIDUAL_TOL = 1e-10


@dataclass
class RecoveryProblem:
    """One noiseless instance y = A x with optional ground truth."""

    operator: LinearOperator
    y: np.ndarray
    s: int | None = None
    ground_truth: np.ndarray | None = None

    def __post_init__(self):
        m, n = self.operator.shape
        self.y = as_vector(self.y, m, "y")
        if self.ground_truth is not None:
            self.ground_truth = as_vector(self.ground_truth, n, "ground_truth")

    def require_sparsity(self) -> int:
        m, _ = self.operator.shape
        if self.s is None or not 1 <= self.s <= m:
            raise ValueError(f"solver needs a target sparsity in 1..{m}, got {self.s}")
        return self.s


@dataclass
class RecoveryResult:
    x_hat: np.ndarray
    support: tuple[int, ...]
    residual: float
    iterations: int
    relative_error: float | None = None
    success: bool | None = None
    converged: bool = True
    message: str = ""


def _finish(problem, x_hat, iterations, converged=True, message="") -> RecoveryResult:
    residual = float(np.linalg.norm(problem.y - problem.operator.apply(x_hat)))
    support = tuple(int(i) for i in np.flatnonzero(x_hat))
    relative_error = None
    success = None
    if problem.ground_truth is not None:
        truth_norm = float(np.linalg.norm(problem.ground_truth))
        gap = float(np.linalg.norm(x_hat - problem.ground_truth))
        relative_error = gap / truth_norm if truth_norm > 0 else gap
        success = bool(relative_error <= SUCCESS_REL_ERROR)
    return RecoveryResult(
        x_hat=x_hat,
        support=support,
        residual=residual,
        iterations=iterations,
        relative_error=relative_error,
        success=success,
        converged=converged,
        message=message,
    )


def hard_threshold(x: np.ndarray, s: int) -> np.ndarray:
    """Keep the s largest magnitudes; ties keep the lowest index."""
    if s >= x.size:
        return x.copy()
    out = np.zeros_like(x)
    if s <= 0:
        return out
    order = np.argsort(-np.abs(x), kind="stable")
    keep = order[:s]
    out[keep] = x[keep]
    return out


def omp(problem: RecoveryProblem, residual_tol: float = RESIDUAL_TOL) -> RecoveryResult:
    """Greedy support identification with least-squares refitting.

    Selects the column most correlated with the residual, refits on the
    current support, and repeats until ``s`` atoms are placed or the
    residual norm drops below ``residual_tol``.
    """
    s = problem.require_sparsity()
    op = problem.operator
    _, n = op.shape
    support: list[int] = []
    columns: list[np.ndarray] = []
    coef = np.zeros(0)
    residual = problem.y.copy()
    converged = True
    message = ""
    iterations = 0
    for _ in range(s):
        if np.linalg.norm(residual) < residual_tol:
            break
        correlation = op.adjoint_apply(residual)
        atom = int(np.argmax(np.abs(correlation)))
        if atom in support:
            # residual is numerically orthogonal to anything new
            break
        support.append(atom)
        columns.append(op.column(atom))
        basis = np.column_stack(columns)
        coef, _, rank, _ = np.linalg.lstsq(basis, problem.y, rcond=None)
        iterations += 1
        if rank < len(support):
            converged = False
            message = "rank-deficient least squares on the selected support"
            break
        residual = problem.y - basis @ coef
    x_hat = np.zeros(n)
    if support:
        x_hat[support] = coef
    return _finish(problem, x_hat, iterations, converged, message)


def iht(
    problem: RecoveryProblem,
    step: float = 1.0,
    max_iters: int = 500,
    x0: np.ndarray | None = None,
    residual_tol: float = RESIDUAL_TOL,
    divergence_factor: float = 10.0,
) -> RecoveryResult:
    """Hard-thresholded gradient iteration x <- T_s(x + step * A.T (y - A x)).

    Flags failure when the residual grows past ``divergence_factor`` times
    its starting value or the iteration cap is hit without convergence.
    """
    s = problem.require_sparsity()
    op = problem.operator
    _, n = op.shape
    x = np.zeros(n) if x0 is None else as_vector(x0, n, "x0").copy()
    residual = problem.y - op.apply(x)
    start_norm = float(np.linalg.norm(residual))
    if start_norm < residual_tol:
        return _finish(problem, x, 0)
    iterations = 0
    for iterations in range(1, max_iters + 1):
        x = hard_threshold(x + step * op.adjoint_apply(residual), s)
        residual = problem.y - op.apply(x)
        norm = float(np.linalg.norm(residual))
        if norm < residual_tol:
            return _finish(problem, x, iterations)
        if norm > divergence_factor * start_norm:
            return _finish(problem, x, iterations, converged=False, message="diverged")
    return _finish(
        problem, x, iterations, converged=False, message="iteration cap reached"
    )


def _project_onto_constraint(op, y, v, warm, cg_tol, cg_max_iters):
    """Project v onto {x : A x = y} by solving A A.T w = A v - y with CG."""
    rhs = op.apply(v) - y
    w = warm
    r = rhs - op.apply(op.adjoint_apply(w))
    p = r.copy()
    rr = float(r @ r)
    rhs_norm = float(np.linalg.norm(rhs))
    threshold = max(cg_tol * max(rhs_norm, 1.0), 1e-300)
    for _ in range(cg_max_iters):
        if np.sqrt(rr) <= threshold:
            break
        ap = op.apply(op.adjoint_apply(p))
        denom = float(p @ ap)
        if denom <= 0:
            break
        alpha = rr / denom
        w = w + alpha * p
        r = r - alpha * ap
        rr_new = float(r @ r)
        p = r + (rr_new / rr) * p
        rr = rr_new
    return v - op.adjoint_apply(w), w


def _soft_threshold(x: np.ndarray, kappa: float) -> np.ndarray:
    return np.sign(x) * np.maximum(np.abs(x) - kappa, 0.0)


def basis_pursuit(
    problem: RecoveryProblem,
    tol_primal: float = 1e-7,
    tol_dual: float = 1e-7,
    max_iters: int = 2000,
    rho: float = 1.0,
    cg_tol: float = 1e-10,
) -> RecoveryResult:
    """Minimum-l1 solution of A x = y by operator splitting.

    Alternates projection onto the equality constraint (a conjugate-gradient
    solve on A A.T, warm-started and capped at m iterations) with soft
    thresholding.  Stops when the thresholded iterate satisfies the
    constraint to ``tol_primal`` and its successive change falls below
    ``tol_dual``.  Requires y to lie in the range of A.
    """
    op = problem.operator
    m, n = op.shape
    if float(np.linalg.norm(problem.y)) == 0.0:
        return _finish(problem, np.zeros(n), 0)
    z = np.zeros(n)
    u = np.zeros(n)
    warm = np.zeros(m)
    kappa = 1.0 / rho
    for iterations in range(1, max_iters + 1):
        x, warm = _project_onto_constraint(
            op, problem.y, z - u, warm, cg_tol, cg_max_iters=m
        )
        z_new = _soft_threshold(x + u, kappa)
        u = u + x - z_new
        change = float(np.linalg.norm(z_new - z))
        z = z_new
        primal = float(np.linalg.norm(op.apply(z) - problem.y))
        if primal <= tol_primal and change <= tol_dual:
            return _finish(problem, z, iterations)
    return _finish(
        problem, z, max_iters, converged=False, message="iteration cap reached"
    )


_SOLVERS = {
    "omp": omp,
    "iht": iht,
    "basis_pursuit": basis_pursuit,
}


def get_solver(name: str):
    try:
        return _SOLVERS[name]
    except KeyError:
        raise ValueError(
            f"unknown solver {name!r}; expected one of {sorted(_SOLVERS)}"
        ) from None


def random_sparse_signal(n: int, s: int, seed: int) -> np.ndarray:
    """s-sparse vector with a uniform support and +-1 amplitudes."""
    rng = make_rng(seed)
    x = np.zeros(n)
    support = rng.choice(n, size=s, replace=False)
    x[support] = rng.integers(0, 2, size=s) * 2.0 - 1.0
    return x


@dataclass(frozen=True)
class PhaseRow:
    s: int
    trials: int
    successes: int
    rate: float
    mean_iterations: float
    mean_residual: float
    solver: str


def phase_transition(
    operator_factory,
    s_grid,
    trials: int,
    solver: str,
    seed: int,
    threads: int = 1,
    solver_kwargs: dict | None = None,
) -> list[PhaseRow]:
    """Empirical exact-recovery rate as sparsity varies.

    ``operator_factory(seed)`` must return a fresh measurement operator; each
    (s, trial) cell derives one seed for the operator and one for the signal
    from the master seed, so the table is reproducible cell by cell.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    solve = get_solver(solver)
    kwargs = solver_kwargs or {}
    rows = []
    for s in s_grid:
        def one_trial(t, s=s):
            op = operator_factory(derive_seed(seed, "phase-matrix", s, t))
            x_true = random_sparse_signal(
                op.shape[1], s, derive_seed(seed, "phase-signal", s, t)
            )
            problem = RecoveryProblem(op, op.apply(x_true), s=s, ground_truth=x_true)
            result = solve(problem, **kwargs)
            return bool(result.success), result.iterations, result.residual

        outcomes = pmap(one_trial, range(trials), threads)
        successes = sum(1 for ok, _, _ in outcomes if ok)
        rows.append(
            PhaseRow(
                s=s,
                trials=trials,
                successes=successes,
                rate=successes / trials,
                mean_iterations=float(np.mean([it for _, it, _ in outcomes])),
                mean_residual=float(np.mean([r for _, _, r in outcomes])),
                solver=solver,
            )
        )
    return rows
