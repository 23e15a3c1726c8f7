"""Training loop and persistence for the generative interpreter.

The interpreter is trained against a frozen classifier: per step the
latent critic takes one update, then the encoder/decoder/probe take one
update on the weighted six-term objective. A trained model records the
classifier's weight hash so interpretations are never mixed across
classifiers.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np
import torch

from ..errors import ConfigError, DataContractError, NumericalDivergenceError
from ..hashing import config_hash
from ..data.ingest import ImageArchive
from ..data.records import DatasetManifest
from ..classifier.training import TrainedClassifier
from .losses import (
    TERM_NAMES,
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
from .networks import DiscoverNets, build_nets, build_perceptual_net

SIDECAR_NAME = "sidecar.json"
WEIGHTS_NAME = "weights.pt"


@dataclass(frozen=True)
class DiscoverConfig:
    latent_dim: int = 32
    subset_size: int = 8
    image_side: int = 64
    base_channels: int = 32
    epochs: int = 30
    batch_size: int = 32
    learning_rate: float = 1e-3
    critic_learning_rate: float = 1e-3
    loss_weights: LossWeights = field(default_factory=LossWeights)
    perceptual: str = "seeded_conv"
    perceptual_seed: int = 1234
    seed: int = 0

    def __post_init__(self):
        if self.latent_dim < 8:
            raise ConfigError(f"latent_dim must be >= 8, got {self.latent_dim}")
        if not 1 <= self.subset_size <= self.latent_dim:
            raise ConfigError(
                f"subset_size must lie in [1, {self.latent_dim}], got {self.subset_size}"
            )
        if self.epochs < 0:
            raise ConfigError("epochs must be >= 0")
        if self.batch_size < 2:
            raise ConfigError("batch_size must be >= 2 (batch statistics are used)")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["loss_weights"] = self.loss_weights.to_dict()
        return d


@dataclass
class TrainState:
    """Everything one optimization step needs; tests can assemble it directly."""

    nets: DiscoverNets
    perceptual_net: torch.nn.Module
    weights: LossWeights
    opt_model: torch.optim.Optimizer
    opt_critic: torch.optim.Optimizer


def training_step(
    state: TrainState,
    x: torch.Tensor,
    score_fn,
    target_scores: torch.Tensor,
) -> LossReport:
    """One critic update followed by one encoder/decoder/probe update.

    `score_fn` is the frozen classifier's differentiable scorer;
    `target_scores` are its precomputed scores of the clean batch.
    Raises NumericalDivergenceError naming the first non-finite term.
    """
    nets = state.nets

    with torch.no_grad():
        z_detached = nets.encoder(x)
    z_prior = torch.randn_like(z_detached)
    c_loss = critic_loss(nets.critic, z_prior, z_detached)
    state.opt_critic.zero_grad()
    c_loss.backward()
    state.opt_critic.step()

    z = nets.encoder(x)
    x_hat = nets.decoder(z)
    terms = {
        "adversarial": adversarial_prior_loss(nets.critic, z),
        "perceptual_reconstruction": perceptual_reconstruction_loss(
            state.perceptual_net, x, x_hat
        ),
        "classifier_consistency": classifier_consistency_loss(
            score_fn, x, x_hat, target_scores=target_scores
        ),
        "decorrelation": latent_decorrelation_loss(z),
        "subset_association": subset_association_loss(
            nets.subset_probe, z, target_scores, nets.subset_size
        ),
        "complement_independence": complement_independence_loss(
            z, target_scores, nets.subset_size
        ),
    }
    for name in TERM_NAMES:
        if not math.isfinite(terms[name].item()):
            raise NumericalDivergenceError(
                f"loss term {name!r} is not finite",
                diagnostics={name: terms[name].item()},
            )

    total = sum(getattr(state.weights, name) * terms[name] for name in TERM_NAMES)
    state.opt_model.zero_grad()
    total.backward()
    state.opt_model.step()

    return LossReport.from_terms(
        {name: terms[name].item() for name in TERM_NAMES}, state.weights
    )


def mean_abs_offdiag_corr(latents: np.ndarray) -> float:
    """Mean absolute off-diagonal correlation; zero-variance features count as 0."""
    z = np.asarray(latents, dtype=np.float64)
    centered = z - z.mean(axis=0, keepdims=True)
    std = np.sqrt((centered**2).mean(axis=0))
    zn = centered / (std + 1e-8)
    corr = zn.T @ zn / z.shape[0]
    d = corr.shape[0]
    off = np.abs(corr[~np.eye(d, dtype=bool)])
    return float(off.mean())


class DiscoverModel:
    """A trained interpreter: deterministic encode/decode plus metadata."""

    def __init__(self, nets: DiscoverNets, config: DiscoverConfig, classifier_hash: str):
        nets.eval()
        for p in nets.parameters():
            p.requires_grad_(False)
        self.nets = nets
        self.config = config
        self.classifier_hash = classifier_hash

    @property
    def latent_dim(self) -> int:
        return self.config.latent_dim

    @property
    def subset_size(self) -> int:
        return self.config.subset_size

    def _check_image(self, img: np.ndarray) -> np.ndarray:
        arr = np.asarray(img, dtype=np.float32)
        side = self.config.image_side
        if arr.shape != (side, side):
            raise DataContractError(f"expected a ({side}, {side}) image, got {arr.shape}")
        return arr

    def encode(self, img: np.ndarray) -> np.ndarray:
        arr = self._check_image(img)
        return self.encode_batch(arr[None])[0]

    def encode_batch(self, images: np.ndarray, chunk: int = 256) -> np.ndarray:
        arr = np.asarray(images, dtype=np.float32)
        side = self.config.image_side
        if arr.ndim != 3 or arr.shape[1:] != (side, side):
            raise DataContractError(f"expected (N, {side}, {side}) images, got {arr.shape}")
        out = []
        with torch.no_grad():
            for start in range(0, len(arr), chunk):
                x = torch.from_numpy(arr[start : start + chunk]).unsqueeze(1)
                out.append(self.nets.encoder(x).numpy())
        return np.concatenate(out, axis=0)

    def decode(self, z: np.ndarray) -> np.ndarray:
        vec = np.asarray(z, dtype=np.float32)
        if vec.shape != (self.latent_dim,):
            raise DataContractError(
                f"expected a latent vector of dimension {self.latent_dim}, got shape {vec.shape}"
            )
        if not np.isfinite(vec).all():
            raise DataContractError("latent vector contains non-finite values")
        with torch.no_grad():
            img = self.nets.decoder(torch.from_numpy(vec)[None])
        return img[0, 0].numpy()

    def save(self, out_dir: str | Path, metrics: dict | None = None) -> Path:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        torch.save(self.nets.state_dict(), out_dir / WEIGHTS_NAME)
        sidecar = {
            "kind": "discover",
            "config": self.config.to_dict(),
            "config_hash": config_hash(self.config.to_dict()),
            "classifier_hash": self.classifier_hash,
            "metrics": metrics or {},
        }
        (out_dir / SIDECAR_NAME).write_text(json.dumps(sidecar, indent=2))
        return out_dir


def load_model(ckpt_dir: str | Path) -> DiscoverModel:
    ckpt_dir = Path(ckpt_dir)
    sidecar_path = ckpt_dir / SIDECAR_NAME
    if not sidecar_path.is_file():
        raise DataContractError(f"model checkpoint sidecar not found: {sidecar_path}")
    sidecar = json.loads(sidecar_path.read_text())
    cfg = dict(sidecar["config"])
    cfg["loss_weights"] = LossWeights(**cfg["loss_weights"])
    config = DiscoverConfig(**cfg)
    nets = DiscoverNets(
        config.image_side, config.latent_dim, config.subset_size, config.base_channels
    )
    nets.load_state_dict(torch.load(ckpt_dir / WEIGHTS_NAME, weights_only=True))
    return DiscoverModel(nets, config, sidecar["classifier_hash"])


def train(
    manifest: DatasetManifest,
    archive: ImageArchive,
    classifier: TrainedClassifier,
    config: DiscoverConfig,
    checkpoint_dir: str | Path | None = None,
    checkpoint_every: int = 0,
    log_hook=None,
) -> tuple[DiscoverModel, list[dict]]:
    """Train the interpreter on the manifest's train split.

    Returns the model and a per-epoch log: entry 0 holds the pre-training
    latent-correlation baseline, entries 1..epochs the epoch-mean loss
    terms plus the post-epoch correlation metric. epochs == 0 returns the
    initialized model with an empty log.
    """
    if classifier.input_side != config.image_side:
        raise DataContractError(
            f"classifier expects side {classifier.input_side}, "
            f"config trains on side {config.image_side}"
        )
    if archive.preprocess_hash != manifest.preprocess_hash:
        raise DataContractError(
            "archive was produced with different preprocessing than the manifest"
        )
    train_records = manifest.split_records("train")
    if not train_records:
        raise DataContractError("manifest has no training records")

    torch.manual_seed(config.seed)
    nets = build_nets(
        config.image_side, config.latent_dim, config.subset_size,
        config.base_channels, config.seed,
    )
    perceptual_net = build_perceptual_net(config.perceptual, seed=config.perceptual_seed)
    clf_hash_before = classifier.weights_hash()

    pixels = archive.stack([r.id for r in train_records]).astype(np.float32)
    target_scores_all = classifier.score_batch(pixels).astype(np.float32)

    state = TrainState(
        nets=nets,
        perceptual_net=perceptual_net,
        weights=config.loss_weights,
        opt_model=torch.optim.Adam(
            [
                {"params": nets.encoder.parameters()},
                {"params": nets.decoder.parameters()},
                {"params": nets.subset_probe.parameters()},
            ],
            lr=config.learning_rate,
            betas=(0.5, 0.999),
        ),
        opt_critic=torch.optim.Adam(
            nets.critic.parameters(), lr=config.critic_learning_rate, betas=(0.5, 0.999)
        ),
    )

    n = len(pixels)
    probe_subset = pixels[: min(512, n)]

    def corr_metric() -> float:
        nets.eval()
        with torch.no_grad():
            z = nets.encoder(torch.from_numpy(probe_subset).unsqueeze(1)).numpy()
        nets.train()
        return mean_abs_offdiag_corr(z)

    log: list[dict] = []
    if config.epochs > 0:
        log.append({"epoch": 0, "mean_abs_offdiag_corr": corr_metric()})

    rng = np.random.default_rng(config.seed)
    nets.train()
    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(n)
        sums = dict.fromkeys(TERM_NAMES, 0.0)
        steps = 0
        for start in range(0, n, config.batch_size):
            idx = order[start : start + config.batch_size]
            if len(idx) < 2:
                continue  # batch statistics need at least two samples
            x = torch.from_numpy(np.ascontiguousarray(pixels[idx])).unsqueeze(1)
            targets = torch.from_numpy(target_scores_all[idx])
            report = training_step(state, x, classifier.score_tensor, targets)
            for name in TERM_NAMES:
                sums[name] += getattr(report, name)
            steps += 1
        means = {name: sums[name] / max(steps, 1) for name in TERM_NAMES}
        entry = {"epoch": epoch, "mean_abs_offdiag_corr": corr_metric()}
        entry.update(LossReport.from_terms(means, config.loss_weights).to_dict())
        log.append(entry)
        if log_hook is not None:
            log_hook(entry)
        if checkpoint_dir is not None and checkpoint_every > 0 and epoch % checkpoint_every == 0:
            model_ckpt = DiscoverModel(nets, config, clf_hash_before)
            model_ckpt.save(Path(checkpoint_dir) / f"epoch_{epoch:04d}")
            nets.train()
            for p in nets.parameters():
                p.requires_grad_(True)

    if classifier.weights_hash() != clf_hash_before:
        raise DataContractError("classifier weights changed during interpreter training")

    return DiscoverModel(nets, config, clf_hash_before), log
