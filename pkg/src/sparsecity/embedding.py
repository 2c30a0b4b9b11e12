"""Distance-preserving embeddings and a subspace classification demo.

Randomizing the column signs of a measurement operator with a good
restricted-isometry constant yields a projection that nearly preserves
pairwise distances, which makes it usable as a generic dimensionality
reducer.  ``distortion_report`` measures exactly that on a point set.

The classification demo exercises the standard sparse-representation
pipeline on synthetic data: each class is a random low-dimensional subspace,
training samples are stacked into a dictionary, and a test sample is
assigned to the class whose coefficients best explain it.  No image data is
involved; the subspace model is generated from a seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import DenseOperator, LinearOperator, as_vector
from .parallel import pmap
from .recovery import RecoveryProblem, get_solver
from .rng import derive_seed, make_rng, rademacher_signs


class JlProjector(LinearOperator):
    """A base operator with independently randomized column signs."""

    def __init__(self, base: LinearOperator, signs: np.ndarray, seed: int):
        n = base.shape[1]
        self.base = base
        self.signs = as_vector(signs, n, "signs")
        self.signs.setflags(write=False)
        self.seed = seed
        self.shape = base.shape

    def apply(self, x) -> np.ndarray:
        return self.base.apply(self.signs * as_vector(x, self.shape[1]))

    def adjoint_apply(self, y) -> np.ndarray:
        return self.signs * self.base.adjoint_apply(y)


def make_projector(base: LinearOperator, seed: int, trivial_signs: bool = False) -> JlProjector:
    """Draw the sign pattern from the seed; ``trivial_signs`` forces all +1
    (test mode, makes the projector coincide with the base operator)."""
    n = base.shape[1]
    if trivial_signs:
        signs = np.ones(n)
    else:
        signs = rademacher_signs(make_rng(seed), n)
    return JlProjector(base, signs, seed)


@dataclass(frozen=True)
class DistortionReport:
    max_distortion: float
    violating_pairs: int
    pairs_evaluated: int
    duplicates_skipped: int
    eps: float


def pair_distortions(projector: LinearOperator, points) -> tuple[np.ndarray, int]:
    """Squared-distance distortion |norm(P(u-v))^2 / norm(u-v)^2 - 1| for every
    distinct pair, plus the count of coincident pairs that were skipped."""
    n = projector.shape[1]
    pts = [as_vector(p, n, "point") for p in points]
    if len(pts) < 2:
        raise ValueError("need at least two points")
    values = []
    skipped = 0
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            diff = pts[i] - pts[j]
            denom = float(diff @ diff)
            if denom == 0.0:
                skipped += 1
                continue
            image = projector.apply(diff)
            values.append(abs(float(image @ image) / denom - 1.0))
    return np.asarray(values), skipped


def distortion_report(projector: LinearOperator, points, eps: float) -> DistortionReport:
    """Worst pairwise squared-distance distortion of a projected point set.

    Coincident pairs are skipped and counted.  The per-pair ratio is scale
    invariant, so the report does not depend on a global rescaling of the
    point set.
    """
    values, skipped = pair_distortions(projector, points)
    worst = float(values.max()) if values.size else 0.0
    violations = int(np.count_nonzero(values > eps))
    return DistortionReport(worst, violations, int(values.size), skipped, eps)


@dataclass(frozen=True)
class SyntheticClassSet:
    """Shape of a synthetic multi-class subspace dataset."""

    classes: int
    ambient_dim: int
    subspace_dim: int
    samples_per_class: int
    noise: float = 0.0
    seed: int = 0
    tests_per_class: int = 1

    def __post_init__(self):
        if self.subspace_dim > self.ambient_dim:
            raise ValueError("subspace dimension cannot exceed the ambient dimension")
        if min(self.classes, self.subspace_dim, self.samples_per_class) < 1:
            raise ValueError("classes, subspace_dim and samples_per_class must be >= 1")


@dataclass
class SubspaceData:
    train: np.ndarray  # ambient_dim x (classes * samples_per_class)
    labels: np.ndarray
    test: np.ndarray  # ambient_dim x (classes * tests_per_class)
    test_labels: np.ndarray
    class_bases: list[np.ndarray]


def synth_subspace_data(spec: SyntheticClassSet) -> SubspaceData:
    """Per class: an orthonormal random basis, then basis @ coefficients plus
    isotropic noise for both training and test samples."""
    rng = make_rng(spec.seed)
    train_cols = []
    labels = []
    test_cols = []
    test_labels = []
    bases = []
    for c in range(spec.classes):
        gauss = rng.standard_normal((spec.ambient_dim, spec.subspace_dim))
        basis, _ = np.linalg.qr(gauss)
        bases.append(basis)
        coeffs = rng.standard_normal((spec.subspace_dim, spec.samples_per_class))
        samples = basis @ coeffs
        if spec.noise > 0:
            samples = samples + spec.noise * rng.standard_normal(samples.shape)
        train_cols.append(samples)
        labels.extend([c] * spec.samples_per_class)
        test_coeffs = rng.standard_normal((spec.subspace_dim, spec.tests_per_class))
        tests = basis @ test_coeffs
        if spec.noise > 0:
            tests = tests + spec.noise * rng.standard_normal(tests.shape)
        test_cols.append(tests)
        test_labels.extend([c] * spec.tests_per_class)
    return SubspaceData(
        train=np.hstack(train_cols),
        labels=np.asarray(labels),
        test=np.hstack(test_cols),
        test_labels=np.asarray(test_labels),
        class_bases=bases,
    )


def max_subspace_coherence(bases) -> float:
    """Largest cosine of a principal angle between any two class subspaces;
    1.0 means two classes share a direction."""
    worst = 0.0
    for i in range(len(bases)):
        for j in range(i + 1, len(bases)):
            overlap = bases[i].T @ bases[j]
            worst = max(worst, float(np.linalg.norm(overlap, 2)))
    return worst


@dataclass
class SrcResult:
    class_id: int
    residuals: np.ndarray
    x_hat: np.ndarray
    solver_converged: bool
    columns_normalized: bool


def src_classify(
    train: np.ndarray,
    labels,
    y_new,
    projector: LinearOperator | None = None,
    solver: str = "omp",
    sparsity: int | None = None,
    normalize_columns: bool = True,
    solver_kwargs: dict | None = None,
) -> SrcResult:
    """Assign a sample to the class whose training columns best represent it.

    Solves y = D x over the (optionally projected, optionally column
    normalized) training dictionary with the chosen sparse solver, then
    scores each class by the residual of the reconstruction that keeps only
    that class's coefficients.  Ties go to the lowest class id.
    """
    if solver not in ("omp", "basis_pursuit"):
        raise ValueError(f"solver must be 'omp' or 'basis_pursuit', got {solver!r}")
    train = np.asarray(train, dtype=np.float64)
    labels = np.asarray(labels)
    if train.ndim != 2 or train.shape[1] != labels.shape[0]:
        raise ValueError("training matrix columns must match the number of labels")
    y = as_vector(y_new, train.shape[0], "y_new")
    if float(np.linalg.norm(y)) == 0.0:
        raise ValueError("cannot classify the zero vector")

    dictionary = train
    if normalize_columns:
        norms = np.linalg.norm(dictionary, axis=0)
        if np.any(norms == 0):
            raise ValueError("training matrix contains a zero column")
        dictionary = dictionary / norms
    if projector is not None:
        dictionary = np.column_stack(
            [projector.apply(dictionary[:, j]) for j in range(dictionary.shape[1])]
        )
        y = projector.apply(y)

    op = DenseOperator(dictionary)
    classes = np.unique(labels)
    if sparsity is None:
        sparsity = int(max(np.sum(labels == c) for c in classes))
    sparsity = min(sparsity, op.shape[0])
    problem = RecoveryProblem(op, y, s=sparsity)
    result = get_solver(solver)(problem, **(solver_kwargs or {}))

    residuals = np.empty(classes.shape[0])
    for idx, c in enumerate(classes):
        masked = np.where(labels == c, result.x_hat, 0.0)
        residuals[idx] = float(np.linalg.norm(y - op.apply(masked)))
    best = int(classes[int(np.argmin(residuals))])
    return SrcResult(
        class_id=best,
        residuals=residuals,
        x_hat=result.x_hat,
        solver_converged=result.converged,
        columns_normalized=normalize_columns,
    )


@dataclass(frozen=True)
class ClassificationReport:
    accuracy: float
    per_class_confusion: list[list[int]]
    compression_ratio: float
    solver: str
    trials: int


def classification_experiment(
    classes: int,
    ambient_dim: int,
    subspace_dim: int,
    samples_per_class: int,
    trials: int,
    seed: int,
    projector_factory=None,
    solver: str = "omp",
    noise: float = 0.0,
    coherence_limit: float = 0.999,
    threads: int = 1,
) -> ClassificationReport:
    """Repeated one-test-sample classification runs on fresh synthetic data.

    Each trial draws a new dataset (rejecting degenerate ones whose class
    subspaces nearly coincide) and, when ``projector_factory`` is given, a
    fresh projector keyed by the trial seed.  Returns overall accuracy and a
    confusion matrix indexed [true][predicted].
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    compression = 1.0 if projector_factory is None else None

    def one_trial(t):
        data_seed = derive_seed(seed, "src-data", t)
        for attempt in range(32):
            spec = SyntheticClassSet(
                classes=classes,
                ambient_dim=ambient_dim,
                subspace_dim=subspace_dim,
                samples_per_class=samples_per_class,
                noise=noise,
                seed=derive_seed(data_seed, attempt),
            )
            data = synth_subspace_data(spec)
            if max_subspace_coherence(data.class_bases) <= coherence_limit:
                break
        projector = None
        if projector_factory is not None:
            projector = projector_factory(derive_seed(seed, "src-projector", t))
        # rotate the tested class so the confusion matrix sees every row
        test_col = t % classes
        true_class = int(data.test_labels[test_col])
        outcome = src_classify(
            data.train, data.labels, data.test[:, test_col], projector=projector, solver=solver
        )
        ratio = 1.0 if projector is None else ambient_dim / projector.shape[0]
        return true_class, outcome.class_id, ratio

    outcomes = pmap(one_trial, range(trials), threads)
    confusion = np.zeros((classes, classes), dtype=int)
    correct = 0
    for true_class, predicted, ratio in outcomes:
        confusion[true_class, predicted] += 1
        correct += predicted == true_class
        compression = ratio if compression is None else compression
    return ClassificationReport(
        accuracy=correct / trials,
        per_class_confusion=confusion.tolist(),
        compression_ratio=compression if compression is not None else 1.0,
        solver=solver,
        trials=trials,
    )
