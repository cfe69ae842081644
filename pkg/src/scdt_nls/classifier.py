"""Nearest local subspace classification in transform space.

Training computes the transform feature of every sample and, per sample, an
orthonormal basis of its enriched one-member subspace.  Prediction runs in
two steps for each class: rank the training samples by squared distance from
the test feature to their per-sample subspaces and keep the closest ``k``;
then orthonormalize those ``k`` features together with the enrichment
vectors and measure the distance to the resulting local subspace.  The class
with the smallest distance wins, ties going to the lowest class index.
"""

import json
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConfigError,
    DegenerateSpan,
    DimensionError,
    FormatError,
    IntegrityError,
)
from .signals import Grid, stratified_split
from .subspace import (
    EnrichmentConfig,
    LocalSubspaceBasis,
    enrichment_vectors,
    orthonormalize,
    residual,
)
from .transform import TransformConfig, scdt

__all__ = [
    "ClassModel",
    "TrainedModel",
    "Prediction",
    "train",
    "predict",
    "predict_dataset",
    "score",
    "tune",
    "save_model",
    "load_model",
]

MODEL_FORMAT_VERSION = 1


@dataclass(frozen=True, eq=False)
class ClassModel:
    """Per-class training state: features and per-sample bases."""

    label: object
    features: np.ndarray
    bases: tuple

    def __post_init__(self):
        features = np.asarray(self.features, dtype=np.float64)
        if features.ndim != 2:
            raise DimensionError("features must be an (L_c, D) matrix")
        if len(self.bases) != features.shape[0]:
            raise DimensionError("one basis is required per training sample")
        features = features.copy()
        features.flags.writeable = False
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "bases", tuple(self.bases))

    @property
    def sample_count(self):
        return self.features.shape[0]


@dataclass(frozen=True, eq=False)
class TrainedModel:
    transform_config: TransformConfig
    enrichment: EnrichmentConfig
    k: int
    variance_cutoff: float
    grid: Grid
    classes: tuple

    @property
    def class_count(self):
        return len(self.classes)

    @property
    def feature_dim(self):
        return self.classes[0].features.shape[1]

    @property
    def class_labels(self):
        return tuple(c.label for c in self.classes)


@dataclass(frozen=True, eq=False)
class Prediction:
    """Predicted class with per-class squared subspace distances.

    ``chosen_member_indices[c]`` holds the indices (within class ``c``'s
    training samples) of the ``k`` members whose span was used.
    """

    class_index: int
    per_class_residuals: np.ndarray
    chosen_member_indices: tuple


def _sample_basis(feature, enrichment, variance_cutoff):
    vectors = [feature] + enrichment_vectors([feature], enrichment)
    try:
        return orthonormalize(vectors, variance_cutoff)
    except DegenerateSpan:
        # all-zero training signal with no enrichment: empty span
        return LocalSubspaceBasis.empty(feature.size)


def train(ds, transform_config=None, enrichment=None, k=1, variance_cutoff=0.99):
    """Fit per-sample enriched subspaces for every class.

    ``k`` is the local-subspace size used at prediction time and must not
    exceed the smallest per-class sample count.
    """
    transform_config = transform_config or TransformConfig()
    enrichment = enrichment or EnrichmentConfig()
    counts = ds.class_counts()
    if k < 1 or k > counts.min():
        raise ConfigError(
            f"k={k} must lie in [1, {counts.min()}] for this dataset"
        )
    resolved = TransformConfig(
        quantile_count=transform_config.resolve_quantile_count(ds.signals[0]),
        mass_epsilon=transform_config.mass_epsilon,
    )
    classes = []
    for c in range(ds.class_count):
        features = []
        bases = []
        for i in ds.class_indices(c):
            signal = ds.signals[i]
            if not np.any(signal.samples):
                warnings.warn(
                    f"training sample {i} (class {c}) is identically zero",
                    stacklevel=2,
                )
            feature = scdt(signal, resolved).flatten()
            features.append(feature)
            bases.append(_sample_basis(feature, enrichment, variance_cutoff))
        classes.append(
            ClassModel(
                label=ds.original_labels[c],
                features=np.stack(features),
                bases=tuple(bases),
            )
        )
    return TrainedModel(
        transform_config=resolved,
        enrichment=enrichment,
        k=k,
        variance_cutoff=variance_cutoff,
        grid=ds.grid,
        classes=tuple(classes),
    )


def _local_residual(feature, members, model):
    vectors = list(members) + enrichment_vectors(members, model.enrichment)
    basis = orthonormalize(vectors, model.variance_cutoff)
    return residual(feature, basis)


def predict(model, signal):
    """Two-step nearest-local-subspace prediction for one signal."""
    if not model.grid.matches(signal.grid):
        raise DimensionError("signal grid does not match the training grid")
    feature = scdt(signal, model.transform_config).flatten()
    residuals = np.empty(model.class_count)
    chosen = []
    for c, cls in enumerate(model.classes):
        eps = np.array([residual(feature, b) for b in cls.bases])
        order = np.argsort(eps, kind="stable")
        members_idx = order[: model.k]
        chosen.append(members_idx)
        members = [cls.features[i] for i in members_idx]
        residuals[c] = _local_residual(feature, members, model)
    return Prediction(
        class_index=int(np.argmin(residuals)),
        per_class_residuals=residuals,
        chosen_member_indices=tuple(chosen),
    )


def predict_dataset(model, signals):
    """Predicted class indices for a dataset or an iterable of signals."""
    signals = getattr(signals, "signals", signals)
    return np.array([predict(model, s).class_index for s in signals], dtype=np.int64)


def score(model, ds):
    """Fraction of correctly classified samples."""
    predicted = predict_dataset(model, ds)
    return float(np.mean(predicted == ds.labels))


def tune(
    ds,
    transform_config=None,
    k_grid=None,
    n_grid=None,
    val_fraction=0.1,
    seed=0,
    use_translation=True,
    variance_cutoff=0.99,
):
    """Pick (k, N) by accuracy on a stratified validation split.

    Ties are broken toward the smaller harmonic order, then the smaller k.
    Candidate k values larger than the smallest per-class count of the
    remainder split are skipped.  Returns ``(k, n, validation_accuracy)``.
    """
    if k_grid is None:
        k_grid = range(1, min(16, int(ds.class_counts().min())) + 1)
    if n_grid is None:
        n_grid = range(0, 5)
    k_grid = sorted(set(int(k) for k in k_grid))
    n_grid = sorted(set(int(n) for n in n_grid))
    if not k_grid or not n_grid:
        raise ConfigError("k_grid and n_grid must be nonempty")
    remainder, validation = stratified_split(ds, val_fraction, seed)
    k_max = int(remainder.class_counts().min())
    usable = [k for k in k_grid if 1 <= k <= k_max]
    if not usable:
        raise ConfigError(
            f"no usable k in {k_grid}; validation split leaves {k_max} per class"
        )
    best = None
    for n in n_grid:
        enrichment = EnrichmentConfig(use_translation=use_translation, harmonic_order=n)
        for k in usable:
            model = train(
                remainder,
                transform_config=transform_config,
                enrichment=enrichment,
                k=k,
                variance_cutoff=variance_cutoff,
            )
            accuracy = score(model, validation)
            if best is None or accuracy > best[0]:
                best = (accuracy, k, n)
    accuracy, k, n = best
    return k, n, accuracy


def _grid_to_json(grid):
    return {"t0": grid.t0, "dt": grid.dt, "n": grid.n}


def save_model(model, path):
    """Serialize a trained model to a single JSON document.

    Floats are written with full round-trip precision so a reloaded model
    reproduces identical predictions.
    """
    if model.class_count == 0:
        raise ConfigError("refusing to save a model with no classes")
    doc = {
        "format_version": MODEL_FORMAT_VERSION,
        "transform": {
            "Q": model.transform_config.quantile_count,
            "mass_epsilon": model.transform_config.mass_epsilon,
        },
        "enrichment": {
            "use_translation": model.enrichment.use_translation,
            "N": model.enrichment.harmonic_order,
        },
        "k": model.k,
        "variance_cutoff": model.variance_cutoff,
        "grid": _grid_to_json(model.grid),
        "classes": [
            {
                "label": cls.label,
                "features": [list(row) for row in cls.features],
                "bases": [
                    {"cols": b.rank, "data": list(b.basis.ravel(order="C"))}
                    for b in cls.bases
                ],
            }
            for cls in model.classes
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)


def _load_basis(entry, dim):
    cols = entry.get("cols")
    data = entry.get("data")
    if not isinstance(cols, int) or not isinstance(data, list):
        raise IntegrityError("basis entry must carry integer cols and a data list")
    if cols == 0:
        if data:
            raise IntegrityError("rank-0 basis must carry no data")
        return LocalSubspaceBasis.empty(dim)
    if len(data) != dim * cols:
        raise IntegrityError(
            f"basis data length {len(data)} does not match {dim}x{cols}"
        )
    matrix = np.asarray(data, dtype=np.float64).reshape(dim, cols)
    if not np.isfinite(matrix).all():
        raise IntegrityError("basis data contains non-finite values")
    try:
        return LocalSubspaceBasis(matrix, source_count=cols, variance_captured=1.0)
    except DimensionError as exc:
        raise IntegrityError(f"stored basis is corrupted: {exc}") from None


def load_model(path):
    """Load a model written by :func:`save_model`."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise IntegrityError(f"model file is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise IntegrityError("model document must be a JSON object")
    version = doc.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise FormatError(f"unsupported model format version: {version!r}")
    try:
        transform_config = TransformConfig(
            quantile_count=doc["transform"]["Q"],
            mass_epsilon=doc["transform"]["mass_epsilon"],
        )
        enrichment = EnrichmentConfig(
            use_translation=doc["enrichment"]["use_translation"],
            harmonic_order=doc["enrichment"]["N"],
        )
        grid = Grid(**doc["grid"])
        k = doc["k"]
        variance_cutoff = doc["variance_cutoff"]
        class_entries = doc["classes"]
    except (KeyError, TypeError, ValueError) as exc:
        raise IntegrityError(f"model document is incomplete: {exc}") from None
    if not class_entries:
        raise IntegrityError("model document declares no classes")
    dim = 2 * transform_config.quantile_count + 2
    classes = []
    for entry in class_entries:
        try:
            features = np.asarray(entry["features"], dtype=np.float64)
        except (KeyError, TypeError, ValueError) as exc:
            raise IntegrityError(f"class features are corrupted: {exc}") from None
        if features.ndim != 2 or features.shape[1] != dim:
            raise IntegrityError("class features do not match the transform size")
        if not np.isfinite(features).all():
            raise IntegrityError("class features contain non-finite values")
        bases = tuple(_load_basis(b, dim) for b in entry.get("bases", []))
        try:
            classes.append(ClassModel(entry["label"], features, bases))
        except DimensionError as exc:
            raise IntegrityError(str(exc)) from None
    return TrainedModel(
        transform_config=transform_config,
        enrichment=enrichment,
        k=k,
        variance_cutoff=variance_cutoff,
        grid=grid,
        classes=tuple(classes),
    )
