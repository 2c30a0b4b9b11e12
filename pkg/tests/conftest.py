"""Shared test oracles.

These deliberately re-derive quantities through paths independent of the
library: full support enumeration with a generic eigensolver, LP vertex
enumeration for the l1 program, and a literal-recursion Hadamard builder.
"""

from itertools import combinations

import numpy as np
import pytest

from sparsecity.ensemble import construct, theta_rademacher


def brute_restricted_norm(mat, s):
    """Max spectral norm over ALL principal submatrices of size <= s,
    via the generic (non-symmetric) eigensolver."""
    n = mat.shape[0]
    best, best_support = 0.0, ()
    for size in range(1, min(s, n) + 1):
        for support in combinations(range(n), size):
            sub = mat[np.ix_(support, support)]
            value = float(np.max(np.abs(np.linalg.eigvals(sub))))
            if value > best:
                best, best_support = value, support
    return best, best_support


def l1_vertex_oracle(matrix, y, feas_tol=1e-9):
    """Minimum-l1 solution of A x = y by enumerating basic feasible solutions
    of the equivalent LP in the split variables [x+; x-].

    Returns (objective, solutions) where solutions collects every optimal
    vertex; the instance has a unique minimizer iff they all coincide.
    """
    m, n = matrix.shape
    ext = np.hstack([matrix, -matrix])
    best_val = None
    solutions = []
    for cols in combinations(range(2 * n), m):
        basis = ext[:, list(cols)]
        try:
            v = np.linalg.solve(basis, y)
        except np.linalg.LinAlgError:
            continue
        if not np.all(np.isfinite(v)) or np.linalg.norm(basis @ v - y) > 1e-8:
            continue
        if np.min(v) < -feas_tol:
            continue
        v = np.maximum(v, 0.0)
        x_ext = np.zeros(2 * n)
        x_ext[list(cols)] = v
        x = x_ext[:n] - x_ext[n:]
        val = float(np.sum(np.abs(x)))
        if best_val is None or val < best_val - 1e-12:
            best_val, solutions = val, [x]
        elif abs(val - best_val) <= 1e-9:
            solutions.append(x)
    return best_val, solutions


def literal_hadamard(k):
    """The recursion expanded entry-by-entry in pure Python."""
    h = [[1.0]]
    for _ in range(k):
        size = len(h)
        new = [[0.0] * (2 * size) for _ in range(2 * size)]
        for i in range(size):
            for j in range(size):
                v = h[i][j] / np.sqrt(2.0)
                new[i][j] = v
                new[i][j + size] = -v
                new[i + size][j] = v
                new[i + size][j + size] = v
        h = new
    return np.array(h)


_ALL_ONES_CACHE = {}


def all_ones_seed(m, b=1):
    """A seed for which the +-1 diagonal law draws all +1 entries; makes the
    block operator coincide with the plain partial Walsh map."""
    key = (m, b)
    if key not in _ALL_ONES_CACHE:
        dist = theta_rademacher()
        for seed in range(1_000_000):
            if np.all(construct(m, m, b, seed, dist).theta == 1.0):
                _ALL_ONES_CACHE[key] = seed
                break
        else:  # pragma: no cover
            pytest.fail(f"no all-ones seed found for m={m}, b={b}")
    return _ALL_ONES_CACHE[key]
