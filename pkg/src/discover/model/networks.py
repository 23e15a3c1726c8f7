"""Encoder/decoder/critic networks and the fixed perceptual feature extractor.

The encoder and decoder are mirrored strided convolutional stacks: the
input side is halved per stage down to a 4x4 grid, then mapped linearly to
the latent vector (and back). The critic is a small MLP on latent batches.
All builders are seeded so weight initialization is reproducible.
"""

from __future__ import annotations

import torch
from torch import nn

from ..errors import ConfigError


def _num_stages(side: int) -> int:
    if side < 8 or side & (side - 1):
        raise ConfigError(f"image side must be a power of two >= 8, got {side}")
    n = 0
    while side > 4:
        side //= 2
        n += 1
    return n


def _stage_channels(base: int, n_stages: int) -> list[int]:
    return [min(base * 2**i, base * 4) for i in range(n_stages)]


class Encoder(nn.Module):
    def __init__(self, side: int, latent_dim: int, base_channels: int):
        super().__init__()
        chans = _stage_channels(base_channels, _num_stages(side))
        layers: list[nn.Module] = []
        prev = 1
        for c in chans:
            layers += [
                nn.Conv2d(prev, c, 4, stride=2, padding=1),
                nn.GroupNorm(min(8, c), c),
                nn.LeakyReLU(0.2),
            ]
            prev = c
        self.body = nn.Sequential(*layers)
        self.to_latent = nn.Linear(prev * 4 * 4, latent_dim)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.to_latent(self.body(x).flatten(1))


class Decoder(nn.Module):
    def __init__(self, side: int, latent_dim: int, base_channels: int):
        super().__init__()
        chans = _stage_channels(base_channels, _num_stages(side))
        self.top_channels = chans[-1]
        self.from_latent = nn.Linear(latent_dim, self.top_channels * 4 * 4)
        layers: list[nn.Module] = []
        rev = list(reversed(chans))
        for i, c in enumerate(rev):
            out_c = rev[i + 1] if i + 1 < len(rev) else base_channels
            layers += [
                nn.ConvTranspose2d(c, out_c, 4, stride=2, padding=1),
                nn.GroupNorm(min(8, out_c), out_c),
                nn.LeakyReLU(0.2),
            ]
        self.body = nn.Sequential(*layers)
        self.to_image = nn.Conv2d(base_channels, 1, 3, padding=1)

    def forward(self, z: torch.Tensor) -> torch.Tensor:
        h = self.from_latent(z).view(-1, self.top_channels, 4, 4)
        h = self.body(h)
        return torch.sigmoid(self.to_image(h))  # output range pinned to (0, 1)


class LatentCritic(nn.Module):
    """Scores latent batches: high logit = looks drawn from the prior."""

    def __init__(self, latent_dim: int, hidden: int = 128):
        super().__init__()
        self.net = nn.Sequential(
            nn.Linear(latent_dim, hidden),
            nn.LeakyReLU(0.2),
            nn.Linear(hidden, hidden),
            nn.LeakyReLU(0.2),
            nn.Linear(hidden, 1),
        )

    def forward(self, z: torch.Tensor) -> torch.Tensor:
        return self.net(z).squeeze(-1)


class SeededConvFeatures(nn.Module):
    """Fixed two-tap convolutional feature pyramid for the reconstruction loss.

    Weights come from a dedicated seed and never train; the random filter
    bank acts as an overcomplete local-structure embedding. A feature
    extractor backed by downloaded pretrained weights can be swapped in via
    the perceptual config knob when a checkpoint cache is available.
    """

    def __init__(self, seed: int = 1234, channels: tuple[int, int] = (16, 32)):
        super().__init__()
        gen = torch.Generator().manual_seed(seed)
        self.conv1 = nn.Conv2d(1, channels[0], 3, padding=1)
        self.conv2 = nn.Conv2d(channels[0], channels[1], 3, stride=2, padding=1)
        for conv in (self.conv1, self.conv2):
            nn.init.kaiming_normal_(conv.weight, a=0.2, generator=gen)
            nn.init.zeros_(conv.bias)
        self.act = nn.LeakyReLU(0.2)
        for p in self.parameters():
            p.requires_grad_(False)

    def forward(self, x: torch.Tensor) -> list[torch.Tensor]:
        t1 = self.act(self.conv1(x))
        t2 = self.act(self.conv2(t1))
        return [t1, t2]


class VggFeatures(nn.Module):
    """Early VGG-16 feature taps; requires the torchvision checkpoint cache."""

    def __init__(self):
        super().__init__()
        import torchvision

        try:
            vgg = torchvision.models.vgg16(
                weights=torchvision.models.VGG16_Weights.IMAGENET1K_V1
            )
        except Exception as exc:
            raise ConfigError(
                "pretrained VGG-16 weights unavailable; use perceptual='seeded_conv' "
                "or populate the torch hub cache"
            ) from exc
        self.slice1 = vgg.features[:4]   # through relu1_2
        self.slice2 = vgg.features[4:9]  # through relu2_2
        for p in self.parameters():
            p.requires_grad_(False)

    def forward(self, x: torch.Tensor) -> list[torch.Tensor]:
        x3 = x.expand(-1, 3, -1, -1)
        t1 = self.slice1(x3)
        t2 = self.slice2(t1)
        return [t1, t2]


def build_perceptual_net(kind: str, seed: int = 1234) -> nn.Module:
    if kind == "seeded_conv":
        net = SeededConvFeatures(seed=seed)
    elif kind == "vgg16_features":
        net = VggFeatures()
    else:
        raise ConfigError(f"unknown perceptual net {kind!r}")
    net.eval()
    return net


class DiscoverNets(nn.Module):
    """The trainable bundle: encoder, decoder, latent critic, subset probe."""

    def __init__(self, side: int, latent_dim: int, subset_size: int, base_channels: int):
        super().__init__()
        self.encoder = Encoder(side, latent_dim, base_channels)
        self.decoder = Decoder(side, latent_dim, base_channels)
        self.critic = LatentCritic(latent_dim)
        self.subset_probe = nn.Linear(subset_size, 1)
        self.latent_dim = latent_dim
        self.subset_size = subset_size
        self.side = side


def build_nets(
    side: int, latent_dim: int, subset_size: int, base_channels: int, seed: int
) -> DiscoverNets:
    torch.manual_seed(seed)
    return DiscoverNets(side, latent_dim, subset_size, base_channels)
