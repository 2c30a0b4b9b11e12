"""Block-concatenated randomly signed partial Walsh measurement operators.

An operator here is b copies of the same m-by-n partial Walsh matrix, each
premultiplied by its own random diagonal: A = [D_1 W | D_2 W | ... | D_b W],
giving m rows and N = n*b columns.  The diagonals are filled i.i.d. from a
bounded zero-mean law; with the default normalization (second moment one)
the Gram matrix satisfies E[A.T A] = I, which is the regime the isometry
diagnostics in :mod:`sparsecity.rip` are calibrated against.

The diagonal table is never serialized: a matrix is persisted as the tuple
(format_version, m, n, b, seed, dist_name, normalized) and regenerated
bit-identically from the seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetError, OverflowRiskError
from .operators import DENSE_ENTRY_BUDGET, LinearOperator, as_vector
from .rng import make_rng
from .walsh import (
    HadamardOrder,
    PartialWalsh,
    fwht_apply_unnormalized,
    hadamard_matrix,
    partial_adjoint_apply,
    partial_apply,
)

FORMAT_VERSION = 1

# Accumulator headroom for the integer kernel (int64 with safety margin).
_INT_ACCUM_LIMIT = 2**62


@dataclass(frozen=True)
class ThetaDistribution:
    """Bounded zero-mean law for the diagonal entries.

    ``values``/``probabilities`` define the support; ``integer_values`` with
    ``integer_scale`` factor the support as scale * integers, which is what
    lets the integer measurement kernel defer all irrational arithmetic to a
    single trailing scalar.
    """

    values: tuple[float, ...]
    probabilities: tuple[float, ...]
    name: str = "custom"
    integer_values: tuple[int, ...] | None = None
    integer_scale: float = 1.0

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        probs = np.asarray(self.probabilities, dtype=np.float64)
        if vals.shape != probs.shape or vals.ndim != 1 or vals.size == 0:
            raise ValueError("values and probabilities must be matching nonempty tuples")
        if np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-12:
            raise ValueError("probabilities must be nonnegative and sum to 1")
        if abs(float(probs @ vals)) > 1e-12:
            raise ValueError("distribution must have zero mean")
        if self.integer_values is not None:
            ints = np.asarray(self.integer_values, dtype=np.int64)
            if ints.shape != vals.shape:
                raise ValueError("integer_values must match values in length")
            if np.max(np.abs(ints * self.integer_scale - vals)) > 1e-12:
                raise ValueError("integer_values * integer_scale must reproduce values")

    @property
    def bound(self) -> float:
        return float(np.max(np.abs(self.values)))

    @property
    def second_moment(self) -> float:
        vals = np.asarray(self.values)
        return float(np.asarray(self.probabilities) @ (vals * vals))

    @property
    def normalized(self) -> bool:
        return abs(self.second_moment - 1.0) <= 1e-12


def theta_fourpoint(normalized: bool = True) -> ThetaDistribution:
    """The equiprobable four-value law on {+-1, +-3}.

    The raw values have second moment 5; the default mode rescales them by
    1/sqrt(5) so the Gram expectation is the identity.  Pass
    ``normalized=False`` for the raw integer-valued law.
    """
    ints = (1, -1, 3, -3)
    scale = 5.0**-0.5 if normalized else 1.0
    return ThetaDistribution(
        values=tuple(v * scale for v in ints),
        probabilities=(0.25, 0.25, 0.25, 0.25),
        name="fourpoint",
        integer_values=ints,
        integer_scale=scale,
    )


def theta_rademacher() -> ThetaDistribution:
    """Fair +-1 signs; already unit second moment."""
    return ThetaDistribution(
        values=(1.0, -1.0),
        probabilities=(0.5, 0.5),
        name="rademacher",
        integer_values=(1, -1),
        integer_scale=1.0,
    )


_NAMED_DISTRIBUTIONS = {
    ("fourpoint", True): lambda: theta_fourpoint(normalized=True),
    ("fourpoint", False): lambda: theta_fourpoint(normalized=False),
    ("rademacher", True): lambda: theta_rademacher(),
}


def distribution_from_name(name: str, normalized: bool = True) -> ThetaDistribution:
    try:
        return _NAMED_DISTRIBUTIONS[(name, normalized)]()
    except KeyError:
        raise ValueError(f"unknown distribution {name!r} (normalized={normalized})") from None


@dataclass(frozen=True)
class RankOneIndex:
    """1-based (block, row) address of one embedded Walsh row."""

    k: int
    w: int

    def validate(self, b: int, m: int) -> None:
        if not 1 <= self.k <= b:
            raise IndexError(f"block index {self.k} out of range 1..{b}")
        if not 1 <= self.w <= m:
            raise IndexError(f"row index {self.w} out of range 1..{m}")


class SparseCityMatrix(LinearOperator):
    """The implicit m-by-(n*b) block operator; immutable after construction."""

    def __init__(self, m: int, n: int, b: int, seed: int, dist: ThetaDistribution):
        order = HadamardOrder.from_side(m)
        if b < 1:
            raise ValueError(f"block count must be >= 1, got {b}")
        self.partial = PartialWalsh(order, n)  # validates 1 <= n <= m
        self.m = m
        self.n = n
        self.b = b
        self.N = n * b
        self.seed = int(seed)
        self.dist = dist
        self.shape = (m, self.N)

        # One uniform draw per (block, row), mapped through the inverse CDF.
        rng = make_rng(self.seed)
        u = rng.random((b, m))
        cum = np.cumsum(np.asarray(dist.probabilities, dtype=np.float64))
        self._indices = np.searchsorted(cum, u, side="right").astype(np.uint8)
        self.theta = np.asarray(dist.values, dtype=np.float64)[self._indices]
        self.theta.setflags(write=False)

    @property
    def in_theorem_regime(self) -> bool:
        """Whether m <= n*b, the regime the isometry guarantees assume."""
        return self.m <= self.N

    def _segments(self, x: np.ndarray):
        return x.reshape(self.b, self.n)

    def apply(self, x) -> np.ndarray:
        x = as_vector(x, self.N)
        out = np.zeros(self.m)
        for j, xj in enumerate(self._segments(x)):
            out += self.theta[j] * partial_apply(self.partial, xj)
        return out

    def adjoint_apply(self, y) -> np.ndarray:
        y = as_vector(y, self.m, "y")
        out = np.empty(self.N)
        for j in range(self.b):
            out[j * self.n : (j + 1) * self.n] = partial_adjoint_apply(
                self.partial, self.theta[j] * y
            )
        return out

    def integer_apply(self, x) -> tuple[np.ndarray, float]:
        """Accumulate the measurement in pure integer arithmetic.

        Requires a distribution that factors over the integers.  Returns
        (z, scale) with z an int64 vector and scale * z equal to apply(x).
        """
        if self.dist.integer_values is None:
            raise ValueError("integer kernel requires an integer-valued distribution")
        arr = np.asarray(x)
        if arr.ndim != 1 or arr.shape[0] != self.N:
            raise ValueError(f"expected a length-{self.N} vector, got shape {arr.shape}")
        if not np.issubdtype(arr.dtype, np.integer):
            raise ValueError("integer kernel requires an integer input vector")
        arr = arr.astype(np.int64)
        max_abs_x = int(np.max(np.abs(arr))) if arr.size else 0
        max_abs_theta = int(np.max(np.abs(np.asarray(self.dist.integer_values))))
        if self.b * self.n * max_abs_theta * max_abs_x >= _INT_ACCUM_LIMIT:
            raise OverflowRiskError(
                "integer accumulation bound "
                f"b*n*{max_abs_theta}*max|x| = {self.b * self.n * max_abs_theta * max_abs_x} "
                "does not fit the 64-bit accumulator"
            )
        theta_int = np.asarray(self.dist.integer_values, dtype=np.int64)[self._indices]
        z = np.zeros(self.m, dtype=np.int64)
        padded = np.zeros(self.m, dtype=np.int64)
        for j, xj in enumerate(arr.reshape(self.b, self.n)):
            padded[: self.n] = xj
            padded[self.n :] = 0
            z += theta_int[j] * fwht_apply_unnormalized(self.partial.order, padded)
        scale = self.dist.integer_scale / math.sqrt(self.m)
        return z, scale

    def to_dense(self, max_entries: int = DENSE_ENTRY_BUDGET) -> np.ndarray:
        if self.m * self.N > max_entries:
            raise BudgetError(
                f"dense materialization of {self.m}x{self.N} exceeds the "
                f"{max_entries}-entry budget"
            )
        w = hadamard_matrix(self.partial.order)[:, : self.n]
        blocks = [self.theta[j][:, None] * w for j in range(self.b)]
        return np.hstack(blocks)

    def walsh_row_vector(self, idx: RankOneIndex) -> np.ndarray:
        """Length-N vector: zero except that segment ``idx.k`` carries row
        ``idx.w`` of the shared partial Walsh block (both indices 1-based)."""
        idx.validate(self.b, self.m)
        out = np.zeros(self.N)
        row = hadamard_matrix(self.partial.order)[idx.w - 1, : self.n]
        out[(idx.k - 1) * self.n : idx.k * self.n] = row
        return out

    def gram_decomposition_deviation(self, max_entries: int = DENSE_ENTRY_BUDGET) -> float:
        """Max entry gap between A.T A and its rank-one expansion.

        The expansion runs over all block pairs (k, j) and rows w, weighting
        the outer product of the embedded Walsh rows by the matching diagonal
        entries.  It should agree with the dense Gram to rounding error.
        """
        dense = self.to_dense(max_entries)
        gram = dense.T @ dense
        expansion = np.zeros_like(gram)
        rows = [
            [self.walsh_row_vector(RankOneIndex(k + 1, w + 1)) for w in range(self.m)]
            for k in range(self.b)
        ]
        for k in range(self.b):
            for j in range(self.b):
                for w in range(self.m):
                    coeff = self.theta[k, w] * self.theta[j, w]
                    expansion += coeff * np.outer(rows[j][w], rows[k][w])
        return float(np.max(np.abs(gram - expansion)))

    def manifest_dict(self) -> dict:
        """JSON-ready record that reconstructs this matrix exactly."""
        if self.dist.name not in {"fourpoint", "rademacher"}:
            raise ValueError("only named distributions can be serialized")
        return {
            "format_version": FORMAT_VERSION,
            "kind": "sparse_city",
            "m": self.m,
            "n": self.n,
            "b": self.b,
            "seed": self.seed,
            "dist_name": self.dist.name,
            "normalized": self.dist.normalized,
        }

    @classmethod
    def from_manifest_dict(cls, data: dict) -> "SparseCityMatrix":
        if data.get("format_version") != FORMAT_VERSION:
            raise ValueError(f"unsupported format_version {data.get('format_version')!r}")
        dist = distribution_from_name(data["dist_name"], bool(data["normalized"]))
        return cls(int(data["m"]), int(data["n"]), int(data["b"]), int(data["seed"]), dist)

    def __repr__(self):
        return (
            f"SparseCityMatrix(m={self.m}, n={self.n}, b={self.b}, seed={self.seed}, "
            f"dist={self.dist.name}, normalized={self.dist.normalized})"
        )


def construct(m: int, n: int, b: int, seed: int, dist: ThetaDistribution) -> SparseCityMatrix:
    """Build the operator; the diagonal table is a pure function of the seed."""
    return SparseCityMatrix(m, n, b, seed, dist)
