"""GPS distance-coherence features and ensemble classifiers for
location-based behavioral authentication."""

from .data import (
    Dataset,
    DatasetSummary,
    GpsSample,
    SynthConfig,
    dataset_summary,
    generate_dataset,
    parse_trace_file,
    write_csv,
    write_jsonl,
)
from .ensemble import (
    EnsembleConfig,
    EnsembleModel,
    bootstrap_sample,
    find_optimal_split,
    find_random_split,
    load_model,
    predict,
    save_model,
    train_ensemble,
)
from .errors import (
    ConfigError,
    GeocoherenceError,
    ThreatOverflowError,
    TraceParseError,
    TrainingError,
)
from .evaluation import (
    ExperimentResult,
    FoldAssignment,
    LabelEncoding,
    MetricsReport,
    confusion_matrix,
    cross_validate,
    cross_validate_matrix,
    encode_labels,
    run_experiment,
    slice_alpha,
    stratified_folds,
    weighted_metrics,
)
from .features import (
    CoherenceSet,
    DistributionStats,
    ExtractionConfig,
    FeatureMatrix,
    coherence_set,
    distance_coherence,
    extract_base_features,
    extract_feature_matrix,
    feature_distribution,
)
from .threat import (
    ThreatParams,
    adversary_probability,
    format_probability,
    post_compromise_probability,
)

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "DatasetSummary",
    "GpsSample",
    "SynthConfig",
    "dataset_summary",
    "generate_dataset",
    "parse_trace_file",
    "write_csv",
    "write_jsonl",
    "EnsembleConfig",
    "EnsembleModel",
    "bootstrap_sample",
    "find_optimal_split",
    "find_random_split",
    "load_model",
    "predict",
    "save_model",
    "train_ensemble",
    "ConfigError",
    "GeocoherenceError",
    "ThreatOverflowError",
    "TraceParseError",
    "TrainingError",
    "ExperimentResult",
    "FoldAssignment",
    "LabelEncoding",
    "MetricsReport",
    "confusion_matrix",
    "cross_validate",
    "cross_validate_matrix",
    "encode_labels",
    "run_experiment",
    "slice_alpha",
    "stratified_folds",
    "weighted_metrics",
    "CoherenceSet",
    "DistributionStats",
    "ExtractionConfig",
    "FeatureMatrix",
    "coherence_set",
    "distance_coherence",
    "extract_base_features",
    "extract_feature_matrix",
    "feature_distribution",
    "ThreatParams",
    "adversary_probability",
    "format_probability",
    "post_compromise_probability",
]
