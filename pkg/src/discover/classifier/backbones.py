"""Classifier backbones: a small CNN for desk-scale data and a VGG-19 adapter.

Both take one grayscale channel and emit a single pre-sigmoid logit. The
VGG-19 variant replicates the input channel three times at the adapter
boundary to satisfy the pretrained stem, and replaces the final
classification stack with one linear output.
"""

from __future__ import annotations

import torch
from torch import nn

from ..errors import ConfigError


class SmallCnn(nn.Module):
    """Three strided conv blocks + linear head; enough for separable data."""

    def __init__(self, input_side: int = 64, base_channels: int = 16):
        super().__init__()
        c = base_channels
        self.conv1 = nn.Conv2d(1, c, 3, stride=2, padding=1)
        self.conv2 = nn.Conv2d(c, 2 * c, 3, stride=2, padding=1)
        self.conv3 = nn.Conv2d(2 * c, 4 * c, 3, stride=2, padding=1)
        self.act = nn.LeakyReLU(0.1)
        side = input_side // 8
        if side < 1:
            raise ConfigError(f"input side {input_side} too small for SmallCnn")
        self.head = nn.Linear(4 * c * side * side, 1)
        self.input_side = input_side

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        h = self.act(self.conv1(x))
        h = self.act(self.conv2(h))
        h = self.act(self.conv3(h))
        return self.head(h.flatten(1)).squeeze(-1)


class Vgg19Binary(nn.Module):
    """VGG-19 feature stack fine-tuned for one binary output.

    Requires the pretrained weights to be available in the local torch hub
    cache (or pretrained=False for a randomly initialized stack).
    """

    def __init__(self, pretrained: bool = True, input_side: int = 64):
        super().__init__()
        import torchvision

        weights = None
        if pretrained:
            try:
                weights = torchvision.models.VGG19_Weights.IMAGENET1K_V1
                vgg = torchvision.models.vgg19(weights=weights)
            except Exception as exc:
                raise ConfigError(
                    "pretrained VGG-19 weights are unavailable (no network / cache); "
                    "place the torchvision checkpoint in the torch hub cache or use "
                    "the small_cnn backbone"
                ) from exc
        else:
            vgg = torchvision.models.vgg19(weights=None)
        self.features = vgg.features
        self.pool = nn.AdaptiveAvgPool2d((2, 2))
        self.head = nn.Linear(512 * 2 * 2, 1)
        self.input_side = input_side

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        x3 = x.expand(-1, 3, -1, -1)  # grayscale replicated to the RGB stem
        h = self.features(x3)
        h = self.pool(h)
        return self.head(h.flatten(1)).squeeze(-1)


def build_backbone(name: str, input_side: int = 64, init_pretrained: bool = True) -> nn.Module:
    """Instantiate a backbone. init_pretrained=False skips the weight fetch,
    for callers that immediately overwrite the state dict from a checkpoint."""
    if name == "small_cnn":
        return SmallCnn(input_side=input_side)
    if name == "vgg19_pretrained":
        return Vgg19Binary(pretrained=init_pretrained, input_side=input_side)
    raise ConfigError(f"unknown backbone {name!r} (expected small_cnn or vgg19_pretrained)")


def conv_layer_names(module: nn.Module) -> dict[str, nn.Conv2d]:
    """Ordered mapping of qualified names to the model's Conv2d layers."""
    return {name: m for name, m in module.named_modules() if isinstance(m, nn.Conv2d)}
