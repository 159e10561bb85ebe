"""Few-shot classification with filtered local descriptors.

The pipeline: normalize convolutional descriptors with a fused
spatial/channel scheme, replace each descriptor by the mean of its nearest
neighbors inside its own image, iteratively drop descriptors whose
prototype similarity falls below a spread-based threshold, then classify
each query image by summed nearest-descriptor similarity per class.
"""

__version__ = "0.1.0"

from .classifier import ClassifierConfig, ClassScores, classify, image_to_class_score, softmax
from .dataset_io import read_dataset, write_dataset
from .episodes import (
    DatasetMeta,
    DescriptorDataset,
    SyntheticSpec,
    generate_synthetic,
    load_synthetic_spec,
    sample_episode,
    save_synthetic_spec,
)
from .errors import (
    ConfigurationError,
    DatasetFormatError,
    DegenerateClassError,
    DegenerateStatisticsError,
    EpisodeEvaluationError,
    LdwrError,
)
from .filtering import (
    FilterConfig,
    FilterResult,
    aggregate_weights,
    descriptor_weights,
    filter_once,
    filter_query,
    iterative_filter_support,
    threshold_stats,
)
from .harness import (
    EpisodeReport,
    RunConfig,
    RunReport,
    evaluate_episode,
    read_report,
    report_write,
    run,
)
from .model import DescriptorSet, Episode, LabeledSample, flatten, unflatten, validate_episode
from .neighborhood import (
    NeighborhoodConfig,
    cosine_similarity,
    knn_indices,
    neighborhood_representation,
)
from .normalization import (
    CrossNormParams,
    channel_normalize,
    cross_normalize,
    default_cn_params,
    l2_normalize,
    load_cn_params,
    save_cn_params,
    spatial_normalize,
)
from .prototypes import ClassPrototype, all_prototypes, class_prototype, prototype_matrix

__all__ = [
    "__version__",
    "ClassifierConfig",
    "ClassScores",
    "classify",
    "image_to_class_score",
    "softmax",
    "read_dataset",
    "write_dataset",
    "DatasetMeta",
    "DescriptorDataset",
    "SyntheticSpec",
    "generate_synthetic",
    "load_synthetic_spec",
    "sample_episode",
    "save_synthetic_spec",
    "ConfigurationError",
    "DatasetFormatError",
    "DegenerateClassError",
    "DegenerateStatisticsError",
    "EpisodeEvaluationError",
    "LdwrError",
    "FilterConfig",
    "FilterResult",
    "aggregate_weights",
    "descriptor_weights",
    "filter_once",
    "filter_query",
    "iterative_filter_support",
    "threshold_stats",
    "EpisodeReport",
    "RunConfig",
    "RunReport",
    "evaluate_episode",
    "read_report",
    "report_write",
    "run",
    "DescriptorSet",
    "Episode",
    "LabeledSample",
    "flatten",
    "unflatten",
    "validate_episode",
    "NeighborhoodConfig",
    "cosine_similarity",
    "knn_indices",
    "neighborhood_representation",
    "CrossNormParams",
    "channel_normalize",
    "cross_normalize",
    "default_cn_params",
    "l2_normalize",
    "load_cn_params",
    "save_cn_params",
    "spatial_normalize",
    "ClassPrototype",
    "all_prototypes",
    "class_prototype",
    "prototype_matrix",
]
