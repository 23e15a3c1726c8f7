"""Fine-tuning and scoring of the frozen binary classifier under interpretation.

A TrainedClassifier is immutable after training: scoring runs in eval mode
under no_grad and is safe for concurrent readers. Checkpoints are a
directory with the weights blob and a JSON sidecar (config hash, metrics,
class-label mapping, input contract).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np
import torch

from ..errors import ConfigError, DataContractError, NumericalDivergenceError
from ..hashing import config_hash, state_dict_hash
from ..data.ingest import ImageArchive
from ..data.preprocess import AugmentationPolicy, ensure_processed_image
from ..data.records import DatasetManifest
from .backbones import build_backbone

SIDECAR_NAME = "sidecar.json"
WEIGHTS_NAME = "weights.pt"


@dataclass(frozen=True)
class ClassifierConfig:
    backbone: str = "small_cnn"
    epochs: int = 5
    learning_rate: float = 1e-4
    batch_size: int = 32
    augmentation: AugmentationPolicy = field(default_factory=AugmentationPolicy)
    input_side: int = 64
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")
        if self.learning_rate <= 0:
            raise ConfigError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["augmentation"] = self.augmentation.to_dict()
        return d


class TrainedClassifier:
    """A frozen scorer: 64x64 grayscale in, scalar score in [0, 1] out."""

    def __init__(self, module: torch.nn.Module, config: ClassifierConfig, class_names: dict):
        module.eval()
        for p in module.parameters():
            p.requires_grad_(False)
        self.module = module
        self.config = config
        self.class_names = class_names
        self.input_side = config.input_side

    def _to_batch(self, images: np.ndarray) -> torch.Tensor:
        arr = np.asarray(images, dtype=np.float32)
        if arr.ndim == 2:
            arr = arr[None]
        if arr.ndim != 3 or arr.shape[1] != self.input_side or arr.shape[2] != self.input_side:
            raise DataContractError(
                f"classifier expects (N, {self.input_side}, {self.input_side}) images, "
                f"got {arr.shape}"
            )
        return torch.from_numpy(arr).unsqueeze(1)

    def score(self, img: np.ndarray) -> float:
        ensure_processed_image(img, self.input_side)
        return float(self.score_batch(np.asarray(img)[None])[0])

    def score_batch(self, images: np.ndarray) -> np.ndarray:
        batch = self._to_batch(images)
        with torch.no_grad():
            logits = self.module(batch)
        return torch.sigmoid(logits).numpy().astype(np.float64)

    def score_tensor(self, x: torch.Tensor) -> torch.Tensor:
        """Differentiable scores for (N, 1, S, S) tensors; weights stay frozen."""
        return torch.sigmoid(self.module(x))

    def weights_hash(self) -> str:
        return state_dict_hash(self.module.state_dict())


def _augmented_batch(
    images: np.ndarray, policy: AugmentationPolicy, rng: np.random.Generator
) -> np.ndarray:
    if policy.horizontal_flip_prob <= 0:
        return images
    flip = rng.random(len(images)) < policy.horizontal_flip_prob
    out = images.copy()
    out[flip] = out[flip][:, :, ::-1]
    return out


def fine_tune(
    manifest: DatasetManifest,
    archive: ImageArchive,
    config: ClassifierConfig,
) -> tuple[TrainedClassifier, list[dict]]:
    """Train the backbone on the manifest's train split.

    Returns the frozen classifier and a per-epoch log of the mean training
    loss. Raises DataContractError for single-class manifests and
    NumericalDivergenceError if the loss stops being finite.
    """
    train = manifest.split_records("train")
    if not train:
        raise DataContractError("manifest has no training records")
    labels = np.array([r.label for r in train], dtype=np.float32)
    if len(set(labels.tolist())) < 2:
        raise DataContractError("training manifest contains a single class; need both")
    pixels = archive.stack([r.id for r in train])

    torch.manual_seed(config.seed)
    module = build_backbone(config.backbone, input_side=config.input_side)
    module.train()
    opt = torch.optim.Adam(module.parameters(), lr=config.learning_rate)
    bce = torch.nn.BCEWithLogitsLoss()
    rng = np.random.default_rng(config.seed)

    history: list[dict] = []
    n = len(train)
    for epoch in range(config.epochs):
        order = rng.permutation(n)
        losses = []
        for start in range(0, n, config.batch_size):
            idx = order[start : start + config.batch_size]
            batch = _augmented_batch(pixels[idx], config.augmentation, rng)
            x = torch.from_numpy(np.ascontiguousarray(batch)).unsqueeze(1)
            y = torch.from_numpy(labels[idx])
            opt.zero_grad()
            loss = bce(module(x), y)
            if not math.isfinite(loss.item()):
                raise NumericalDivergenceError(
                    "classifier training loss is not finite",
                    diagnostics={"epoch": epoch, "step": start // config.batch_size,
                                 "loss": loss.item()},
                )
            loss.backward()
            opt.step()
            losses.append(loss.item())
        history.append({"epoch": epoch, "train_loss": float(np.mean(losses))})

    clf = TrainedClassifier(module, config, manifest.class_names)
    return clf, history


def save_classifier(
    clf: TrainedClassifier, out_dir: str | Path, metrics: dict | None = None
) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    torch.save(clf.module.state_dict(), out_dir / WEIGHTS_NAME)
    sidecar = {
        "kind": "classifier",
        "config": clf.config.to_dict(),
        "config_hash": config_hash(clf.config.to_dict()),
        "class_names": clf.class_names,
        "input_contract": {"side": clf.input_side, "channels": 1, "range": [0.0, 1.0]},
        "weights_hash": clf.weights_hash(),
        "metrics": metrics or {},
    }
    (out_dir / SIDECAR_NAME).write_text(json.dumps(sidecar, indent=2))
    return out_dir


def load_classifier(ckpt_dir: str | Path) -> TrainedClassifier:
    ckpt_dir = Path(ckpt_dir)
    sidecar_path = ckpt_dir / SIDECAR_NAME
    if not sidecar_path.is_file():
        raise DataContractError(f"classifier checkpoint sidecar not found: {sidecar_path}")
    sidecar = json.loads(sidecar_path.read_text())
    cfg_dict = dict(sidecar["config"])
    cfg_dict["augmentation"] = AugmentationPolicy(**cfg_dict["augmentation"])
    config = ClassifierConfig(**cfg_dict)
    module = build_backbone(config.backbone, input_side=config.input_side, init_pretrained=False)
    state = torch.load(ckpt_dir / WEIGHTS_NAME, weights_only=True)
    module.load_state_dict(state)
    clf = TrainedClassifier(module, config, sidecar["class_names"])
    if clf.weights_hash() != sidecar["weights_hash"]:
        raise DataContractError(f"classifier weights hash mismatch in {ckpt_dir}")
    return clf
