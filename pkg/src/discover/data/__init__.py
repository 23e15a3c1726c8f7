from .preprocess import (
    AugmentationPolicy,
    PreprocessConfig,
    augment,
    bilinear_resize,
    ensure_processed_image,
    preprocess,
    rgb_to_grayscale,
)
from .records import (
    CLASS_NAMES,
    DatasetManifest,
    ImageRecord,
    split_dataset,
)
from .synthetic import SyntheticSpec, ellipse_mask, generate_synthetic_dataset, render_ellipse

__all__ = [
    "AugmentationPolicy",
    "PreprocessConfig",
    "augment",
    "bilinear_resize",
    "ensure_processed_image",
    "preprocess",
    "rgb_to_grayscale",
    "CLASS_NAMES",
    "DatasetManifest",
    "ImageRecord",
    "split_dataset",
    "SyntheticSpec",
    "ellipse_mask",
    "generate_synthetic_dataset",
    "render_ellipse",
]
