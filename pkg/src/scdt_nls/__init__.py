"""Transport-transform signal classification.

A library and CLI for classifying 1D time-series events: the signed
cumulative distribution transform, a nearest-local-subspace classifier with
analytic subspace enrichment, a warp-based synthetic data generator, a
1NN-DTW baseline, and an experiment harness.
"""

from . import errors
from .bench import (
    CellResult,
    MetricsReport,
    run_accuracy,
    run_data_efficiency,
    run_out_distribution,
    write_cells_csv,
)
from .classifier import (
    Prediction,
    TrainedModel,
    load_model,
    predict,
    predict_dataset,
    save_model,
    score,
    train,
    tune,
)
from .dtw import DtwConfig, dtw_distance, knn_dtw_classify, tune_window
from .signals import (
    Grid,
    LabeledDataset,
    Signal,
    read_ucr_tsv,
    stratified_split,
    write_ucr_tsv,
)
from .subspace import (
    EnrichmentConfig,
    LocalSubspaceBasis,
    enrichment_vectors,
    harmonic_map,
    harmonic_warp,
    orthonormalize,
    residual,
    translation_vector,
)
from .synth import (
    SynthConfig,
    WarpSpec,
    generate,
    proof_of_concept_templates,
    prototype_templates,
    sample_warp,
    template,
)
from .transform import (
    TransformConfig,
    TransportFeature,
    apply_warp,
    cdt,
    inverse_scdt,
    scdt,
)

__version__ = "0.1.0"

__all__ = [
    "errors",
    "Grid",
    "Signal",
    "LabeledDataset",
    "read_ucr_tsv",
    "write_ucr_tsv",
    "stratified_split",
    "TransformConfig",
    "TransportFeature",
    "cdt",
    "scdt",
    "inverse_scdt",
    "apply_warp",
    "EnrichmentConfig",
    "LocalSubspaceBasis",
    "harmonic_map",
    "harmonic_warp",
    "translation_vector",
    "enrichment_vectors",
    "orthonormalize",
    "residual",
    "TrainedModel",
    "Prediction",
    "train",
    "predict",
    "predict_dataset",
    "score",
    "tune",
    "save_model",
    "load_model",
    "WarpSpec",
    "SynthConfig",
    "template",
    "proof_of_concept_templates",
    "prototype_templates",
    "sample_warp",
    "generate",
    "DtwConfig",
    "dtw_distance",
    "knn_dtw_classify",
    "tune_window",
    "CellResult",
    "MetricsReport",
    "run_accuracy",
    "run_data_efficiency",
    "run_out_distribution",
    "write_cells_csv",
]
