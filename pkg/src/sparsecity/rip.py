"""Restricted-isometry diagnostics.

The central quantity is the restricted operator norm of I - A.T A: the
maximum, over index sets Gamma of size at most s, of the spectral norm of
the Gamma-by-Gamma principal submatrix.  A matrix whose restricted norm is
at most delta preserves the squared length of every s-sparse vector to
within a factor 1 +- delta.

Principal-submatrix spectral norms are monotone under support inclusion, so
the exact evaluator enumerates only |Gamma| = s (verified separately against
full enumeration at tiny sizes).  Beyond the enumeration budget a sampling
estimator gives a certified lower bound.  Two experiment drivers sweep
problem sizes: ``expectation_scan`` tracks the mean restricted norm against
a sqrt(s * log^2(s) * log(mb) * log(nb) / m) proxy, and ``tail_estimate``
measures exceedance probabilities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, islice

import numpy as np

from .ensemble import SparseCityMatrix, ThetaDistribution, theta_fourpoint
from .errors import BudgetError
from .operators import DENSE_ENTRY_BUDGET, LinearOperator
from .parallel import pmap
from .rng import derive_seed, make_rng

ENUMERATION_BUDGET = 10**6
_EIG_BATCH = 2048
_SYMMETRY_TOL = 1e-10
_FORMULATION_TOL = 1e-10


@dataclass(frozen=True)
class RipReport:
    """Result of one restricted-norm evaluation."""

    s: int
    value: float
    method: str  # "exact" | "monte_carlo"
    supports_evaluated: int
    extremal_support: tuple[int, ...]
    in_theorem_regime: bool

    def to_dict(self) -> dict:
        return {
            "s": self.s,
            "value": self.value,
            "method": self.method,
            "supports_evaluated": self.supports_evaluated,
            "extremal_support": list(self.extremal_support),
            "in_theorem_regime": self.in_theorem_regime,
        }


@dataclass(frozen=True)
class ScalingRow:
    """One grid point of an expectation scan."""

    m: int
    n: int
    b: int
    s: int
    trials: int
    mean_value: float
    std_value: float
    bound_proxy: float
    method: str
    degenerate: bool = False


@dataclass(frozen=True)
class TailEstimate:
    """Empirical exceedance probability of the restricted norm."""

    probability: float
    exceed_count: int
    trials: int
    method: str


def bound_proxy(m: int, n: int, b: int, s: int) -> float:
    """sqrt(s * log^2(s) * log(mb) * log(nb) / m); zero for s <= 1."""
    if s <= 1:
        return 0.0
    return math.sqrt(s * math.log(s) ** 2 * math.log(m * b) * math.log(n * b) / m)


def _check_symmetric(mat: np.ndarray) -> np.ndarray:
    arr = np.asarray(mat, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {arr.shape}")
    if arr.size and np.max(np.abs(arr - arr.T)) > _SYMMETRY_TOL:
        raise ValueError("matrix is not symmetric within 1e-10")
    return arr


def _batched_supports(n: int, s: int, batch: int = _EIG_BATCH):
    """Size-s supports in lexicographic order, grouped into index arrays."""
    it = combinations(range(n), s)
    while True:
        chunk = list(islice(it, batch))
        if not chunk:
            return
        yield np.asarray(chunk, dtype=np.intp)


def _submatrix_spectral_norms(mat: np.ndarray, supports: np.ndarray) -> np.ndarray:
    subs = mat[supports[:, :, None], supports[:, None, :]]
    eigs = np.linalg.eigvalsh(subs)
    return np.max(np.abs(eigs), axis=1)


def restricted_norm_exact(
    mat,
    s: int,
    enumeration_budget: int = ENUMERATION_BUDGET,
) -> tuple[float, tuple[int, ...]]:
    """Exact restricted norm of a symmetric matrix by support enumeration.

    Returns (value, extremal_support); ties go to the lexicographically first
    support.  Raises BudgetError when C(N, s) exceeds the budget.
    """
    arr = _check_symmetric(mat)
    n = arr.shape[0]
    s_eff = min(s, n)
    if s_eff <= 0:
        return 0.0, ()
    count = math.comb(n, s_eff)
    if count > enumeration_budget:
        raise BudgetError(
            f"C({n},{s_eff}) = {count} supports exceed the enumeration budget "
            f"{enumeration_budget}; use delta_monte_carlo instead"
        )
    best = -1.0
    best_support: tuple[int, ...] = ()
    for supports in _batched_supports(n, s_eff):
        values = _submatrix_spectral_norms(arr, supports)
        i = int(np.argmax(values))
        if values[i] > best:
            best = float(values[i])
            best_support = tuple(int(v) for v in supports[i])
    return best, best_support


def _gram_deviation_exact(gram: np.ndarray, s: int) -> float:
    """Same quantity via the eigenvalue-displacement form max(|l-1|) of Gram
    submatrices; used as an internal cross-check of the I - G formulation."""
    n = gram.shape[0]
    s_eff = min(s, n)
    if s_eff <= 0:
        return 0.0
    worst = 0.0
    for supports in _batched_supports(n, s_eff):
        subs = gram[supports[:, :, None], supports[:, None, :]]
        eigs = np.linalg.eigvalsh(subs)
        worst = max(worst, float(np.max(np.abs(eigs - 1.0))))
    return worst


def _regime_flag(op: LinearOperator) -> bool:
    m, n = op.shape
    return m <= n


def delta_exact(
    op: LinearOperator,
    s: int,
    enumeration_budget: int = ENUMERATION_BUDGET,
    dense_budget: int = DENSE_ENTRY_BUDGET,
) -> RipReport:
    """Exact restricted-isometry constant of an operator.

    Evaluates the restricted norm of I - A.T A and, as a self-check, the
    equivalent max eigenvalue displacement of the Gram submatrices; the two
    must agree to 1e-10.
    """
    dense = op.to_dense(dense_budget)
    gram = dense.T @ dense
    deviation = np.eye(gram.shape[0]) - gram
    value, support = restricted_norm_exact(deviation, s, enumeration_budget)
    alt = _gram_deviation_exact(gram, s)
    if abs(value - alt) > _FORMULATION_TOL:
        raise AssertionError(
            f"restricted-norm formulations disagree: {value!r} vs {alt!r}"
        )
    n = gram.shape[0]
    s_eff = min(s, n)
    return RipReport(
        s=s,
        value=value,
        method="exact",
        supports_evaluated=math.comb(n, s_eff) if s_eff > 0 else 0,
        extremal_support=support,
        in_theorem_regime=_regime_flag(op),
    )


def delta_monte_carlo(
    op: LinearOperator,
    s: int,
    trials: int,
    seed: int,
    dense_budget: int = DENSE_ENTRY_BUDGET,
) -> RipReport:
    """Sampled lower bound on the restricted-isometry constant.

    Draws ``trials`` uniform size-s supports and takes the worst submatrix.
    Uses a dense Gram while the operator fits the budget, otherwise pulls the
    needed columns through ``apply``.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    m, n = op.shape
    s_eff = min(s, n)
    if s_eff <= 0:
        return RipReport(s, 0.0, "monte_carlo", 0, (), _regime_flag(op))
    rng = make_rng(seed)
    gram = None
    if m * n <= dense_budget:
        dense = op.to_dense(dense_budget)
        gram = dense.T @ dense
    best = -1.0
    best_support: tuple[int, ...] = ()
    ident = np.eye(s_eff)
    for _ in range(trials):
        support = np.sort(rng.choice(n, size=s_eff, replace=False))
        if gram is not None:
            sub = gram[np.ix_(support, support)]
        else:
            cols = np.column_stack([op.column(int(j)) for j in support])
            sub = cols.T @ cols
        value = float(np.max(np.abs(np.linalg.eigvalsh(ident - sub))))
        if value > best:
            best = value
            best_support = tuple(int(v) for v in support)
    return RipReport(
        s=s,
        value=best,
        method="monte_carlo",
        supports_evaluated=trials,
        extremal_support=best_support,
        in_theorem_regime=_regime_flag(op),
    )


def _estimate(
    op: LinearOperator,
    s: int,
    seed: int,
    enumeration_budget: int,
    mc_supports: int,
) -> RipReport:
    n = op.shape[1]
    s_eff = min(s, n)
    if s_eff > 0 and math.comb(n, s_eff) <= enumeration_budget:
        return delta_exact(op, s, enumeration_budget)
    return delta_monte_carlo(op, s, mc_supports, seed)


def expectation_scan(
    grid,
    s: int,
    trials: int,
    seed: int,
    dist: ThetaDistribution | None = None,
    enumeration_budget: int = ENUMERATION_BUDGET,
    mc_supports: int = 2000,
    threads: int = 1,
) -> list[ScalingRow]:
    """Mean/stddev of the restricted-isometry constant over fresh draws.

    ``grid`` is a list of (m, n, b) triples; each grid point runs ``trials``
    independent constructions with sub-seeds derived from (seed, m, n, b,
    trial).  s = 0 rows are degenerate by convention and evaluate to zero.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    dist = dist if dist is not None else theta_fourpoint()
    rows = []
    for m, n, b in grid:
        if s == 0:
            rows.append(
                ScalingRow(m, n, b, 0, trials, 0.0, 0.0, 0.0, "exact", degenerate=True)
            )
            continue

        def one_trial(t, m=m, n=n, b=b):
            matrix_seed = derive_seed(seed, "scan", m, n, b, t)
            op = SparseCityMatrix(m, n, b, matrix_seed, dist)
            report = _estimate(
                op, s, derive_seed(matrix_seed, "mc"), enumeration_budget, mc_supports
            )
            return report.value, report.method

        outcomes = pmap(one_trial, range(trials), threads)
        values = np.array([v for v, _ in outcomes])
        methods = {method for _, method in outcomes}
        rows.append(
            ScalingRow(
                m=m,
                n=n,
                b=b,
                s=s,
                trials=trials,
                mean_value=float(values.mean()),
                std_value=float(values.std(ddof=1)) if trials > 1 else 0.0,
                bound_proxy=bound_proxy(m, n, b, s),
                method="+".join(sorted(methods)),
            )
        )
    return rows


def tail_estimate(
    m: int,
    n: int,
    b: int,
    s: int,
    delta: float,
    trials: int,
    seed: int,
    dist: ThetaDistribution | None = None,
    enumeration_budget: int = ENUMERATION_BUDGET,
    mc_supports: int = 2000,
    threads: int = 1,
) -> TailEstimate:
    """Fraction of fresh constructions whose constant reaches ``delta``."""
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    dist = dist if dist is not None else theta_fourpoint()

    def one_trial(t):
        matrix_seed = derive_seed(seed, "tail", m, n, b, t)
        op = SparseCityMatrix(m, n, b, matrix_seed, dist)
        report = _estimate(
            op, s, derive_seed(matrix_seed, "mc"), enumeration_budget, mc_supports
        )
        return report.value, report.method

    outcomes = pmap(one_trial, range(trials), threads)
    exceed = sum(1 for value, _ in outcomes if value >= delta)
    methods = {method for _, method in outcomes}
    return TailEstimate(
        probability=exceed / trials,
        exceed_count=exceed,
        trials=trials,
        method="+".join(sorted(methods)),
    )
