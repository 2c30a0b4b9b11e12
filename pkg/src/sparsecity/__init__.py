"""Block-structured random Walsh measurement ensembles and diagnostics.

A library plus benchmark CLI around one family of measurement operators:
concatenated blocks of a shared partial Hadamard-Walsh matrix with
independent random diagonals.  Includes restricted-isometry diagnostics,
sparse recovery solvers, distance-preserving embeddings via column-sign
randomization, and classical baseline ensembles for comparison.
"""

__version__ = "0.1.0"

from .ensemble import (
    RankOneIndex,
    SparseCityMatrix,
    ThetaDistribution,
    construct,
    theta_fourpoint,
    theta_rademacher,
)
from .operators import DenseOperator, LinearOperator
from .walsh import (
    HadamardOrder,
    PartialWalsh,
    fwht_adjoint_apply,
    fwht_apply,
    hadamard_matrix,
    partial_adjoint_apply,
    partial_apply,
    rademacher,
    uncertainty_check,
    walsh_function,
)

__all__ = [
    "DenseOperator",
    "HadamardOrder",
    "LinearOperator",
    "PartialWalsh",
    "RankOneIndex",
    "SparseCityMatrix",
    "ThetaDistribution",
    "construct",
    "fwht_adjoint_apply",
    "fwht_apply",
    "hadamard_matrix",
    "partial_adjoint_apply",
    "partial_apply",
    "rademacher",
    "theta_fourpoint",
    "theta_rademacher",
    "uncertainty_check",
    "walsh_function",
    "__version__",
]
