"""Comparison measurement ensembles.

Three families of structured random matrices used as baselines for the block
Walsh ensemble: row-subsampled orthogonal transforms, partial Toeplitz and
circulant convolution matrices, and the demodulator-style product of a block
summing matrix, a random sign diagonal, and a column-permuted orthogonal
transform.  All expose the same operator contract and manifest schema as the
block ensemble, so every diagnostic runs on them unchanged.

The Fourier-flavored ensembles use the real orthogonal trigonometric basis
(constant row, cosine/sine pairs, and the alternating row for even sizes)
rather than the complex transform, keeping one real-arithmetic operator
contract across all ensembles.  These matrices are materialized densely:
desk-scale sizes do not warrant fast-transform plumbing here.
"""

from __future__ import annotations

import numpy as np

from .ensemble import FORMAT_VERSION
from .operators import DenseOperator
from .rng import make_rng, rademacher_signs
from .walsh import HadamardOrder, hadamard_matrix

BASELINE_KINDS = (
    "subsampled_fourier",
    "subsampled_hadamard",
    "partial_toeplitz",
    "partial_circulant",
    "random_demodulator",
)


class BaselineMatrix(DenseOperator):
    """Dense baseline ensemble member carrying its reconstruction record."""

    def __init__(self, kind: str, matrix: np.ndarray, seed: int, params: dict):
        super().__init__(matrix)
        self.kind = kind
        self.seed = int(seed)
        self.params = dict(params)

    @property
    def in_theorem_regime(self) -> bool:
        return self.shape[0] <= self.shape[1]

    def column_norm_stats(self) -> dict:
        norms = np.linalg.norm(self._mat, axis=0)
        return {
            "min": float(norms.min()),
            "mean": float(norms.mean()),
            "max": float(norms.max()),
        }

    def manifest_dict(self) -> dict:
        record = {
            "format_version": FORMAT_VERSION,
            "kind": self.kind,
            "seed": self.seed,
        }
        record.update(self.params)
        return record

    def __repr__(self):
        m, n = self.shape
        return f"BaselineMatrix(kind={self.kind!r}, shape=({m}, {n}), seed={self.seed})"


def real_fourier_matrix(n: int) -> np.ndarray:
    """Real orthogonal trigonometric basis, rows ordered constant, then
    cos/sin pairs by frequency, then (even n) the alternating row."""
    if n < 1:
        raise ValueError(f"size must be >= 1, got {n}")
    grid = np.arange(n)
    rows = [np.full(n, n**-0.5)]
    for k in range(1, (n - 1) // 2 + 1):
        angle = 2.0 * np.pi * k * grid / n
        rows.append(np.sqrt(2.0 / n) * np.cos(angle))
        rows.append(np.sqrt(2.0 / n) * np.sin(angle))
    if n % 2 == 0 and n > 1:
        rows.append(n**-0.5 * np.where(grid % 2 == 0, 1.0, -1.0))
    return np.vstack(rows)


def _orthogonal_transform(kind: str, n: int) -> np.ndarray:
    if kind == "subsampled_fourier":
        return real_fourier_matrix(n)
    if kind == "subsampled_hadamard":
        return hadamard_matrix(HadamardOrder.from_side(n))
    raise ValueError(f"unknown subsampled kind {kind!r}")


def subsampled_orthogonal(kind: str, m: int, n_cols: int, seed: int) -> BaselineMatrix:
    """m rows drawn without replacement from an n-by-n orthogonal transform,
    rescaled by sqrt(n/m) so columns have unit expected squared norm."""
    if m > n_cols:
        raise ValueError(f"cannot subsample {m} rows from {n_cols}")
    if m < 1:
        raise ValueError(f"need at least one row, got {m}")
    full = _orthogonal_transform(kind, n_cols)
    rng = make_rng(seed)
    rows = np.sort(rng.choice(n_cols, size=m, replace=False))
    matrix = np.sqrt(n_cols / m) * full[rows]
    return BaselineMatrix(kind, matrix, seed, {"m": m, "N": n_cols, "rows": rows.tolist()})


def partial_toeplitz(m: int, n_cols: int, seed: int, circulant: bool = False) -> BaselineMatrix:
    """Constant-diagonal random matrix: entry (i, j) depends only on i - j.

    The generator holds N + m - 1 i.i.d. +-1/sqrt(m) values (N values for the
    circulant variant, where the diagonals wrap modulo N).
    """
    if m > n_cols:
        raise ValueError(f"expected m <= N, got m={m}, N={n_cols}")
    if m < 1:
        raise ValueError(f"need at least one row, got {m}")
    rng = make_rng(seed)
    if circulant:
        gen = rademacher_signs(rng, n_cols) / np.sqrt(m)
        i = np.arange(m)[:, None]
        j = np.arange(n_cols)[None, :]
        matrix = gen[(i - j) % n_cols]
    else:
        gen = rademacher_signs(rng, n_cols + m - 1) / np.sqrt(m)
        i = np.arange(m)[:, None]
        j = np.arange(n_cols)[None, :]
        matrix = gen[i - j + n_cols - 1]
    kind = "partial_circulant" if circulant else "partial_toeplitz"
    return BaselineMatrix(
        kind, matrix, seed, {"m": m, "N": n_cols, "generator_length": int(gen.size)}
    )


def summing_matrix(w: int, r: int) -> np.ndarray:
    """r-by-w block summing matrix: row k has w/r consecutive ones starting
    at column k*w/r."""
    if r < 1 or w < 1 or w % r != 0:
        raise ValueError(f"sampling rate {r} must divide the bandwidth {w}")
    block = w // r
    g = np.zeros((r, w))
    for k in range(r):
        g[k, k * block : (k + 1) * block] = 1.0
    return g


def random_demodulator(w: int, r: int, seed: int) -> BaselineMatrix:
    """Product of block summing, random signs, and a column-permuted real
    orthogonal transform; the permutation is drawn from the seed and stored.

    The summing rows are left unnormalized (entries exactly one), matching
    the displayed construction; column-norm statistics are available from
    ``column_norm_stats`` rather than asserted.
    """
    g = summing_matrix(w, r)
    rng = make_rng(seed)
    signs = rademacher_signs(rng, w)
    permutation = rng.permutation(w)
    transform = real_fourier_matrix(w)[:, permutation]
    matrix = g @ (signs[:, None] * transform)
    baseline = BaselineMatrix(
        "random_demodulator",
        matrix,
        seed,
        {"W": w, "R": r, "permutation": permutation.tolist()},
    )
    baseline.summing = g
    baseline.signs = signs
    baseline.transform = transform
    return baseline


def baseline_from_manifest(data: dict) -> BaselineMatrix:
    """Rebuild any baseline from its manifest record."""
    if data.get("format_version") != FORMAT_VERSION:
        raise ValueError(f"unsupported format_version {data.get('format_version')!r}")
    kind = data["kind"]
    seed = int(data["seed"])
    if kind in ("subsampled_fourier", "subsampled_hadamard"):
        return subsampled_orthogonal(kind, int(data["m"]), int(data["N"]), seed)
    if kind in ("partial_toeplitz", "partial_circulant"):
        return partial_toeplitz(
            int(data["m"]), int(data["N"]), seed, circulant=(kind == "partial_circulant")
        )
    if kind == "random_demodulator":
        return random_demodulator(int(data["W"]), int(data["R"]), seed)
    raise ValueError(f"unknown baseline kind {kind!r}")
