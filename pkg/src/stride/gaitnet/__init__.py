"""
Step-duration network: data collection, feature selection, training, noise evaluation
"""

from .dataset import (
    FEATURE_NAMES,
    SPATIAL_FEATURE_NAMES,
    feature_names,
    gait_features,
    GaitSample,
    GaitDataset,
    collect_dataset,
)
from .pca import (
    jacobi_eigh,
    PcaResult,
    pca_select_features,
)
from .network import (
    GaitNetModel,
    TrainingMetrics,
    build_mlp,
    train,
    predict,
    load_gaitnet,
)
from .noise import (
    NoiseProfile,
    evaluate_noise,
    noise_sweep,
)

__all__ = [
    "FEATURE_NAMES",
    "SPATIAL_FEATURE_NAMES",
    "feature_names",
    "gait_features",
    "GaitSample",
    "GaitDataset",
    "collect_dataset",
    "jacobi_eigh",
    "PcaResult",
    "pca_select_features",
    "GaitNetModel",
    "TrainingMetrics",
    "build_mlp",
    "train",
    "predict",
    "load_gaitnet",
    "NoiseProfile",
    "evaluate_noise",
    "noise_sweep",
]
