"""Gradient-weighted class activation maps (the saliency baseline).

The heatmap at a convolutional layer is
relu(sum_c mean_spatial(d logit / d A_c) * A_c), bilinearly upsampled to
the input resolution and min-max normalized to [0, 1]. An all-zero map is
valid output (it means the pooled gradients point away from the class
everywhere) and is returned unnormalized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch
import torch.nn.functional as F

from ..errors import DataContractError
from ..data.preprocess import ensure_processed_image
from .backbones import conv_layer_names
from .training import TrainedClassifier


@dataclass
class GradcamMap:
    heatmap: np.ndarray  # (side, side) in [0, 1]
    target_layer: str


def default_target_layer(clf: TrainedClassifier) -> str:
    layers = conv_layer_names(clf.module)
    if not layers:
        raise DataContractError("classifier has no convolutional layers")
    return list(layers)[-1]


def gradcam(
    clf: TrainedClassifier,
    img: np.ndarray,
    target_layer: str | None = None,
) -> GradcamMap:
    ensure_processed_image(img, clf.input_side)
    layers = conv_layer_names(clf.module)
    if target_layer is None:
        target_layer = default_target_layer(clf)
    if target_layer not in layers:
        raise DataContractError(
            f"unknown target layer {target_layer!r}; valid conv layers: {list(layers)}"
        )

    captured: dict[str, torch.Tensor] = {}

    def hook(_module, _inputs, output):
        output.retain_grad()
        captured["activation"] = output

    handle = layers[target_layer].register_forward_hook(hook)
    try:
        # weights are frozen, so the input must carry the grad requirement
        x = torch.from_numpy(np.asarray(img, dtype=np.float32))[None, None].requires_grad_(True)
        with torch.enable_grad():
            logit = clf.module(x)
            logit.backward()
    finally:
        handle.remove()

    activation = captured["activation"][0]
    grad = captured["activation"].grad
    if grad is None:
        raise DataContractError(f"layer {target_layer!r} received no gradient")
    weights = grad[0].mean(dim=(1, 2))
    cam = F.relu((weights[:, None, None] * activation).sum(dim=0))
    cam = cam[None, None]
    cam = F.interpolate(cam, size=(clf.input_side, clf.input_side),
                        mode="bilinear", align_corners=False)[0, 0]
    cam = cam.detach().numpy().astype(np.float64)

    # min-max normalize; all-zero maps stay zero, constant positive maps
    # become all-ones (both degenerate cases are valid outputs)
    peak, low = cam.max(), cam.min()
    if peak > 0:
        cam = np.ones_like(cam) if peak == low else (cam - low) / (peak - low)
    return GradcamMap(heatmap=cam, target_layer=target_layer)
