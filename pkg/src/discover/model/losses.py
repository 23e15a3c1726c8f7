"""The six training objectives of the generative interpreter.

Each term is one standalone function so alternates can be swapped without
touching the training loop:

1. adversarial: push the aggregate latent distribution toward the
   standard-normal prior through a critic (non-saturating objective);
2. perceptual_reconstruction: squared feature-map distance between the
   input and its reconstruction under a fixed feature extractor;
3. classifier_consistency: mean absolute difference between the frozen
   classifier's scores of the input and of its reconstruction;
4. decorrelation: mean squared off-diagonal entry of the batch latent
   correlation matrix;
5. subset_association: squared error of a jointly trained linear probe
   predicting the classifier score from the first K latent features;
6. complement_independence: mean squared correlation between each of the
   remaining D-K features and the classifier score.

All terms are plain differentiable scalars (no gradient tricks), so their
autograd gradients match finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict

import torch
import torch.nn.functional as F

from ..errors import ConfigError

_CORR_EPS = 1e-8

TERM_NAMES = (
    "adversarial",
    "perceptual_reconstruction",
    "classifier_consistency",
    "decorrelation",
    "subset_association",
    "complement_independence",
)


@dataclass(frozen=True)
class LossWeights:
    adversarial: float = 1.0
    perceptual_reconstruction: float = 1.0
    classifier_consistency: float = 1.0
    decorrelation: float = 1.0
    subset_association: float = 1.0
    complement_independence: float = 1.0

    def __post_init__(self):
        for name in TERM_NAMES:
            if getattr(self, name) <= 0:
                raise ConfigError(f"loss weight {name} must be > 0")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class LossReport:
    """The six loss scalars of one step (or an epoch mean) plus their
    weighted total. total is exactly sum(weight_i * term_i) over the stored
    float fields, summed in TERM_NAMES order."""

    adversarial: float
    perceptual_reconstruction: float
    classifier_consistency: float
    decorrelation: float
    subset_association: float
    complement_independence: float
    total: float

    @classmethod
    def from_terms(cls, terms: dict[str, float], weights: LossWeights) -> "LossReport":
        total = 0.0
        for name in TERM_NAMES:
            total += getattr(weights, name) * terms[name]
        return cls(total=total, **terms)

    def to_dict(self) -> dict:
        return asdict(self)


def adversarial_prior_loss(critic: torch.nn.Module, z: torch.Tensor) -> torch.Tensor:
    """Encoder-side objective: make encodings look like prior samples."""
    logits = critic(z)
    return F.binary_cross_entropy_with_logits(logits, torch.ones_like(logits))


def critic_loss(
    critic: torch.nn.Module, z_prior: torch.Tensor, z_encoded: torch.Tensor
) -> torch.Tensor:
    """Critic-side objective: prior samples real, encoded samples fake."""
    real = critic(z_prior)
    fake = critic(z_encoded)
    return F.binary_cross_entropy_with_logits(
        real, torch.ones_like(real)
    ) + F.binary_cross_entropy_with_logits(fake, torch.zeros_like(fake))


def perceptual_reconstruction_loss(
    perceptual_net: torch.nn.Module, x: torch.Tensor, x_hat: torch.Tensor
) -> torch.Tensor:
    taps_x = perceptual_net(x)
    taps_hat = perceptual_net(x_hat)
    losses = [F.mse_loss(a, b) for a, b in zip(taps_hat, taps_x)]
    return torch.stack(losses).mean()


def classifier_consistency_loss(
    score_fn,
    x: torch.Tensor,
    x_hat: torch.Tensor,
    target_scores: torch.Tensor | None = None,
) -> torch.Tensor:
    """Mean |score(x) - score(x_hat)|; score(x) is a constant target.

    Callers that already scored the clean batch can pass target_scores to
    skip the redundant forward pass.
    """
    if target_scores is None:
        with torch.no_grad():
            target_scores = score_fn(x)
    return (score_fn(x_hat) - target_scores).abs().mean()


def _center_scale(v: torch.Tensor) -> torch.Tensor:
    centered = v - v.mean(dim=0, keepdim=True)
    std = centered.pow(2).mean(dim=0, keepdim=True).sqrt()
    return centered / (std + _CORR_EPS)


def latent_decorrelation_loss(z: torch.Tensor) -> torch.Tensor:
    """Mean squared off-diagonal batch correlation (1.0 for duplicated features)."""
    n, d = z.shape
    if d < 2:
        return z.new_zeros(())
    zn = _center_scale(z)
    corr = zn.T @ zn / n
    off = corr - torch.diag_embed(torch.diagonal(corr))
    return off.pow(2).sum() / (d * (d - 1))


def subset_association_loss(
    probe: torch.nn.Module, z: torch.Tensor, scores: torch.Tensor, subset_size: int
) -> torch.Tensor:
    pred = probe(z[:, :subset_size]).squeeze(-1)
    return F.mse_loss(pred, scores)


def complement_independence_loss(
    z: torch.Tensor, scores: torch.Tensor, subset_size: int
) -> torch.Tensor:
    """Squared per-feature correlation with the score over features K+1..D."""
    if subset_size >= z.shape[1]:
        return z.new_zeros(())
    comp = _center_scale(z[:, subset_size:])
    s = _center_scale(scores[:, None])
    corr = (comp * s).mean(dim=0)
    return corr.pow(2).mean()
