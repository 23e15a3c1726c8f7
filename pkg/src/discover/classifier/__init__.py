from .backbones import build_backbone, conv_layer_names
from .gradcam import GradcamMap, gradcam
from .roc import RocCurve, auc_rank_statistic, evaluate_roc, roc_from_scores
from .training import (
    ClassifierConfig,
    TrainedClassifier,
    fine_tune,
    load_classifier,
    save_classifier,
)

__all__ = [
    "build_backbone",
    "conv_layer_names",
    "GradcamMap",
    "gradcam",
    "RocCurve",
    "auc_rank_statistic",
    "evaluate_roc",
    "roc_from_scores",
    "ClassifierConfig",
    "TrainedClassifier",
    "fine_tune",
    "load_classifier",
    "save_classifier",
]
