from .losses import (
    LossReport,
    LossWeights,
    adversarial_prior_loss,
    classifier_consistency_loss,
    complement_independence_loss,
    critic_loss,
    latent_decorrelation_loss,
    perceptual_reconstruction_loss,
    subset_association_loss,
)
from .networks import Decoder, Encoder, LatentCritic, SeededConvFeatures, build_nets, build_perceptual_net
from .train import DiscoverConfig, DiscoverModel, load_model, mean_abs_offdiag_corr, train, training_step

__all__ = [
    "LossReport",
    "LossWeights",
    "adversarial_prior_loss",
    "classifier_consistency_loss",
    "complement_independence_loss",
    "critic_loss",
    "latent_decorrelation_loss",
    "perceptual_reconstruction_loss",
    "subset_association_loss",
    "Decoder",
    "Encoder",
    "LatentCritic",
    "SeededConvFeatures",
    "build_nets",
    "build_perceptual_net",
    "DiscoverConfig",
    "DiscoverModel",
    "load_model",
    "mean_abs_offdiag_corr",
    "train",
    "training_step",
]
