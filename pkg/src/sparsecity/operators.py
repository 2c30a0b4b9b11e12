"""Matrix-free linear operator contract shared by every measurement ensemble.

Solvers and diagnostics touch measurement matrices only through ``apply`` /
``adjoint_apply`` (plus ``shape``), so an operator never has to exist as a
dense array unless a diagnostic explicitly materializes it under a budget.
"""

from __future__ import annotations

import numpy as np

from .errors import BudgetError

# Default cap on dense materialization, in matrix entries.
DENSE_ENTRY_BUDGET = 2**22


def as_vector(x, length: int, name: str = "x") -> np.ndarray:
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1 or v.shape[0] != length:
        raise ValueError(f"{name} must be a 1-d vector of length {length}, got shape {v.shape}")
    return v


class LinearOperator:
    """Base class: an m-by-N real linear map with an explicit adjoint."""

    shape: tuple[int, int]

    def apply(self, x) -> np.ndarray:
        """Forward map, length-N input to length-m output."""
        raise NotImplementedError

    def adjoint_apply(self, y) -> np.ndarray:
        """Adjoint (transpose) map, length-m input to length-N output."""
        raise NotImplementedError

    def to_dense(self, max_entries: int = DENSE_ENTRY_BUDGET) -> np.ndarray:
        """Materialize column by column.  Guarded by an entry budget."""
        m, n = self.shape
        if m * n > max_entries:
            raise BudgetError(
                f"dense materialization of a {m}x{n} operator exceeds the "
                f"{max_entries}-entry budget"
            )
        cols = np.zeros((m, n))
        e = np.zeros(n)
        for j in range(n):
            e[j] = 1.0
            cols[:, j] = self.apply(e)
            e[j] = 0.0
        return cols

    def column(self, j: int) -> np.ndarray:
        """Single column, fetched through ``apply``."""
        m, n = self.shape
        e = np.zeros(n)
        e[j] = 1.0
        return self.apply(e)


class DenseOperator(LinearOperator):
    """Wrap an explicit matrix in the operator contract."""

    def __init__(self, matrix):
        self._mat = np.array(matrix, dtype=np.float64)
        if self._mat.ndim != 2:
            raise ValueError("matrix must be 2-d")
        self._mat.setflags(write=False)
        self.shape = self._mat.shape

    def apply(self, x) -> np.ndarray:
        return self._mat @ as_vector(x, self.shape[1])

    def adjoint_apply(self, y) -> np.ndarray:
        return self._mat.T @ as_vector(y, self.shape[0], "y")

    def to_dense(self, max_entries: int = DENSE_ENTRY_BUDGET) -> np.ndarray:
        return self._mat.copy()


class CountingOperator(LinearOperator):
    """Test helper: forwards apply/adjoint while counting calls, and treats
    any dense materialization as a contract violation."""

    def __init__(self, inner: LinearOperator):
        self.inner = inner
        self.shape = inner.shape
        self.apply_calls = 0
        self.adjoint_calls = 0

    def apply(self, x) -> np.ndarray:
        self.apply_calls += 1
        return self.inner.apply(x)

    def adjoint_apply(self, y) -> np.ndarray:
        self.adjoint_calls += 1
        return self.inner.adjoint_apply(y)

    def to_dense(self, max_entries: int = DENSE_ENTRY_BUDGET) -> np.ndarray:
        raise AssertionError("solver materialized the operator")
