"""Hadamard-Walsh matrices, fast transforms, and the Walsh function system.

Sign convention
---------------
The order-k matrix is defined by the recursion

    H_0 = [1],    H_k = 1/sqrt(2) * [[H_{k-1}, -H_{k-1}],
                                     [H_{k-1},  H_{k-1}]],

i.e. the negated block sits in the *top-right* corner.  Most FWHT references
use the [[1, 1], [1, -1]] kernel instead; the two conventions disagree column
by column, and "keep the first n columns" below depends on which one is in
force, so the recursion above is normative throughout this package.  H_k is
orthogonal but not symmetric, hence the explicit adjoint kernels.

Normalization: the 1/sqrt(2) factor is applied at every butterfly stage (not
deferred to a single trailing scale) so intermediate magnitudes stay bounded.
``fwht_apply_unnormalized`` skips it entirely and works on integers; it is
the kernel behind the integer measurement path.

Function system
---------------
``rademacher(n, x)`` is the sign of sin(2^(n+1) * pi * x) with the convention
sign(0) = +1 at the measure-zero set where the sine vanishes.  ``walsh_function``
multiplies Rademacher factors along the binary expansion of its index.  The
correspondence between matrix columns and Walsh functions is *observed*, not
defined: empirically, column j of sqrt(m) * H_k sampled at the cell midpoints
x = (i + 0.5)/m equals (-1)**popcount(j) times the Walsh function whose index
is j bit-reversed over k bits.  ``column_function_index`` records that map.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BudgetError

# Largest exponent allowed for dense materialization (m = 2**k entries per side).
DENSE_MAX_K = 12

ZERO_TOL = 1e-10


@dataclass(frozen=True)
class HadamardOrder:
    """Transform size as an exponent: side length m = 2**k."""

    k: int

    def __post_init__(self):
        if self.k < 0:
            raise ValueError(f"order exponent must be nonnegative, got {self.k}")

    @property
    def m(self) -> int:
        return 1 << self.k

    @classmethod
    def from_side(cls, m: int) -> "HadamardOrder":
        if m < 1 or (m & (m - 1)) != 0:
            raise ValueError(f"side length must be a power of two, got {m}")
        return cls(m.bit_length() - 1)


@dataclass(frozen=True)
class PartialWalsh:
    """The m-by-n matrix formed by the first n columns of H_k."""

    order: HadamardOrder
    n: int

    def __post_init__(self):
        if not 1 <= self.n <= self.order.m:
            raise ValueError(f"need 1 <= n <= {self.order.m}, got n={self.n}")

    @property
    def m(self) -> int:
        return self.order.m


def _coerce_order(order) -> HadamardOrder:
    return order if isinstance(order, HadamardOrder) else HadamardOrder(int(order))


def rademacher(n: int, x: float) -> int:
    """Sign of sin(2^(n+1) * pi * x) on [0, 1), with sign(0) := +1.

    Evaluated through the fractional part t = (2^(n+1) * x) mod 2, which is
    computed exactly in binary floating point by repeated doubling: the sine
    is positive iff t < 1 and vanishes iff t is integral.
    """
    if n < 0:
        raise ValueError(f"function index must be nonnegative, got {n}")
    if not 0.0 <= x < 1.0:
        raise ValueError(f"argument must lie in [0, 1), got {x}")
    t = float(x)
    for _ in range(n + 1):
        t = (t * 2.0) % 2.0
    return 1 if t <= 1.0 else -1


def walsh_function(n: int, x: float) -> int:
    """Product of Rademacher factors along the binary expansion of n; W_0 = 1."""
    if n < 0:
        raise ValueError(f"function index must be nonnegative, got {n}")
    if not 0.0 <= x < 1.0:
        raise ValueError(f"argument must lie in [0, 1), got {x}")
    sign = 1
    bit = 0
    while n:
        if n & 1:
            sign *= rademacher(bit, x)
        n >>= 1
        bit += 1
    return sign


def hadamard_matrix(order, dense_max_k: int = DENSE_MAX_K) -> np.ndarray:
    """Dense H_k built by expanding the recursion literally."""
    order = _coerce_order(order)
    if order.k > dense_max_k:
        raise BudgetError(
            f"dense Hadamard of order k={order.k} exceeds the k<={dense_max_k} budget"
        )
    h = np.ones((1, 1))
    inv_sqrt2 = 2.0**-0.5
    for _ in range(order.k):
        h = inv_sqrt2 * np.block([[h, -h], [h, h]])
    return h


def _check_length(v: np.ndarray, m: int) -> np.ndarray:
    arr = np.asarray(v)
    if arr.ndim not in (1, 2) or arr.shape[0] != m:
        raise ValueError(f"expected leading dimension {m}, got shape {arr.shape}")
    return arr


def _butterfly(v: np.ndarray, m: int, adjoint: bool, normalize: bool) -> np.ndarray:
    """Stage-by-stage transform; columns of a 2-d input are transformed independently."""
    y = np.array(v, dtype=v.dtype if not normalize else np.float64, copy=True)
    trailing = y.shape[1:]
    inv_sqrt2 = 2.0**-0.5
    size = 2
    while size <= m:
        blocks = y.reshape((m // size, size) + trailing)
        half = size // 2
        a = blocks[:, :half].copy()
        b = blocks[:, half:].copy()
        if adjoint:
            blocks[:, :half] = a + b
            blocks[:, half:] = b - a
        else:
            blocks[:, :half] = a - b
            blocks[:, half:] = a + b
        if normalize:
            blocks *= inv_sqrt2
        y = blocks.reshape((m,) + trailing)
        size *= 2
    return y


def fwht_apply(order, v) -> np.ndarray:
    """H_k @ v in O(m log m); 2-d inputs are transformed column by column."""
    order = _coerce_order(order)
    arr = _check_length(np.asarray(v, dtype=np.float64), order.m)
    return _butterfly(arr, order.m, adjoint=False, normalize=True)


def fwht_adjoint_apply(order, v) -> np.ndarray:
    """H_k.T @ v; inverts fwht_apply since H_k is orthogonal."""
    order = _coerce_order(order)
    arr = _check_length(np.asarray(v, dtype=np.float64), order.m)
    return _butterfly(arr, order.m, adjoint=True, normalize=True)


def fwht_apply_unnormalized(order, v) -> np.ndarray:
    """The +-1 (integer) variant: 2**(k/2) * H_k @ v, exact on integer input."""
    order = _coerce_order(order)
    arr = _check_length(np.asarray(v), order.m)
    return _butterfly(arr, order.m, adjoint=False, normalize=False)


def partial_apply(pw: PartialWalsh, x) -> np.ndarray:
    """W_n^m @ x: zero-pad to length m, then transform."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] != pw.n:
        raise ValueError(f"expected a length-{pw.n} vector, got shape {arr.shape}")
    padded = np.zeros(pw.m)
    padded[: pw.n] = arr
    return fwht_apply(pw.order, padded)


def partial_adjoint_apply(pw: PartialWalsh, y) -> np.ndarray:
    """(W_n^m).T @ y: transform with the adjoint kernel, keep the first n entries."""
    arr = np.asarray(y, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] != pw.m:
        raise ValueError(f"expected a length-{pw.m} vector, got shape {arr.shape}")
    return fwht_adjoint_apply(pw.order, arr)[: pw.n]


def uncertainty_check(order, y, zero_tol: float = ZERO_TOL) -> tuple[int, int, bool]:
    """Joint support-size check between a vector and its Walsh spectrum.

    Returns (s_time, s_freq, holds) where s_time counts entries of y above
    ``zero_tol`` in magnitude, s_freq does the same for H.T @ y, and holds
    reports whether s_time + s_freq >= 2*sqrt(m).
    """
    order = _coerce_order(order)
    arr = np.asarray(y, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] != order.m:
        raise ValueError(f"expected a length-{order.m} vector, got shape {arr.shape}")
    if not np.any(np.abs(arr) > zero_tol):
        raise ValueError("uncertainty check requires a nonzero vector")
    s_time = int(np.count_nonzero(np.abs(arr) > zero_tol))
    spectrum = fwht_adjoint_apply(order, arr)
    s_freq = int(np.count_nonzero(np.abs(spectrum) > zero_tol))
    holds = bool(s_time + s_freq >= 2.0 * np.sqrt(order.m))
    return s_time, s_freq, holds


def column_function_index(j: int, k: int) -> tuple[int, int]:
    """Observed column-to-Walsh-function map for H_k.

    Column j of sqrt(m) * H_k, read at sample points x = (i + 0.5)/m, matches
    ``sign * W_index`` with ``index`` = j bit-reversed over k bits and
    ``sign`` = (-1)**popcount(j).  Returns (index, sign).
    """
    if not 0 <= j < (1 << k):
        raise ValueError(f"column {j} out of range for order k={k}")
    index = 0
    for bit in range(k):
        if j & (1 << bit):
            index |= 1 << (k - 1 - bit)
    sign = -1 if bin(j).count("1") % 2 else 1
    return index, sign
