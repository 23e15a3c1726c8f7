"""Desk-scale synthetic dataset: ellipses whose aspect ratio defines the class.

Each image contains one antialiased ellipse of constant area on a black
background. The class-defining factor is the width/height aspect ratio
(the two class ranges must be disjoint); nuisance factors are the center
position and the fill brightness. Ground truth for every image is kept in
a factor table so interpretation claims can be verified against known
generative factors.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, asdict
from pathlib import Path

import numpy as np

from ..errors import DataContractError
from .preprocess import PreprocessConfig
from .records import DatasetManifest, ImageRecord


@dataclass(frozen=True)
class SyntheticSpec:
    train_per_class: int = 200
    test_per_class: int = 50
    image_side: int = 64
    aspect_class0: tuple[float, float] = (0.4, 0.55)
    aspect_class1: tuple[float, float] = (1.8, 2.5)
    center_jitter_px: float = 4.0
    brightness_range: tuple[float, float] = (0.6, 1.0)
    base_radius_frac: float = 0.22
    supersample: int = 4

    def __post_init__(self):
        for name, rng in (("aspect_class0", self.aspect_class0), ("aspect_class1", self.aspect_class1)):
            lo, hi = rng
            if not (0 < lo < hi):
                raise DataContractError(f"{name} must be a non-degenerate positive range, got {rng}")
        lo0, hi0 = self.aspect_class0
        lo1, hi1 = self.aspect_class1
        if max(lo0, lo1) <= min(hi0, hi1):
            raise DataContractError(
                "class aspect ranges overlap; classes must be separable by construction"
            )
        blo, bhi = self.brightness_range
        if not (0 < blo <= bhi <= 1.0):
            raise DataContractError(f"brightness_range must lie in (0, 1], got {self.brightness_range}")
        if self.center_jitter_px < 0:
            raise DataContractError("center_jitter_px must be >= 0")
        # the ellipse (plus jitter) must stay inside the frame, else the
        # analytic-area ground truth no longer holds
        radius = self.base_radius_frac * self.image_side
        max_aspect = max(hi0, hi1, 1.0 / lo0, 1.0 / lo1)
        max_axis = radius * float(np.sqrt(max_aspect))
        if self.image_side / 2 - self.center_jitter_px - max_axis < 0:
            raise DataContractError(
                "ellipse can leave the frame: shrink base_radius_frac, jitter, or aspect ranges"
            )

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class FactorRow:
    """Ground-truth generative factors for one synthetic image."""

    id: str
    label: int
    aspect: float
    dx: float
    dy: float
    brightness: float


def _axes(side: int, aspect: float, base_radius_frac: float) -> tuple[float, float]:
    # constant-area parameterization: a*b == radius^2 regardless of aspect
    radius = base_radius_frac * side
    a = radius * float(np.sqrt(aspect))
    b = radius / float(np.sqrt(aspect))
    return a, b


def render_ellipse(
    side: int,
    aspect: float,
    dx: float,
    dy: float,
    brightness: float,
    base_radius_frac: float = 0.22,
    supersample: int = 4,
) -> np.ndarray:
    """Render one antialiased ellipse image in [0, 1] (float32).

    Pixel coverage is estimated on a supersample x supersample subgrid per
    pixel, so the image mean closely tracks brightness * ellipse area /
    side^2.
    """
    a, b = _axes(side, aspect, base_radius_frac)
    cx = side / 2.0 + dx
    cy = side / 2.0 + dy
    ss = supersample
    coords = (np.arange(side * ss) + 0.5) / ss
    xx = coords[None, :] - cx
    yy = coords[:, None] - cy
    inside = (xx / a) ** 2 + (yy / b) ** 2 <= 1.0
    coverage = inside.reshape(side, ss, side, ss).mean(axis=(1, 3))
    return (brightness * coverage).astype(np.float32)


def ellipse_mask(
    side: int,
    aspect: float,
    dx: float,
    dy: float,
    base_radius_frac: float = 0.22,
) -> np.ndarray:
    """Boolean mask of pixels whose center lies inside the ellipse."""
    a, b = _axes(side, aspect, base_radius_frac)
    cx = side / 2.0 + dx
    cy = side / 2.0 + dy
    coords = np.arange(side) + 0.5
    xx = coords[None, :] - cx
    yy = coords[:, None] - cy
    return (xx / a) ** 2 + (yy / b) ** 2 <= 1.0


def generate_synthetic_dataset(
    spec: SyntheticSpec, seed: int
) -> tuple[DatasetManifest, dict[str, np.ndarray], list[FactorRow]]:
    """Render the dataset and return (manifest, id -> image, factor table).

    Factor values are drawn from the seeded generator, so identical
    (spec, seed) pairs reproduce identical pixels and tables.
    """
    rng = np.random.default_rng(seed)
    n_per_class = spec.train_per_class + spec.test_per_class
    records: list[ImageRecord] = []
    images: dict[str, np.ndarray] = {}
    factors: list[FactorRow] = []
    for label, aspect_range in ((0, spec.aspect_class0), (1, spec.aspect_class1)):
        for k in range(n_per_class):
            img_id = f"c{label}_{k:04d}"
            aspect = float(rng.uniform(*aspect_range))
            dx = float(rng.uniform(-spec.center_jitter_px, spec.center_jitter_px))
            dy = float(rng.uniform(-spec.center_jitter_px, spec.center_jitter_px))
            brightness = float(rng.uniform(*spec.brightness_range))
            images[img_id] = render_ellipse(
                spec.image_side, aspect, dx, dy, brightness,
                spec.base_radius_frac, spec.supersample,
            )
            split = "train" if k < spec.train_per_class else "test"
            records.append(ImageRecord(img_id, f"synthetic://{img_id}", label, split))
            factors.append(FactorRow(img_id, label, aspect, dx, dy, brightness))
    manifest = DatasetManifest(
        records=records,
        preprocess=PreprocessConfig(trim_px=0, target_side=spec.image_side),
        class_names={"class0": "tall-ellipse", "class1": "wide-ellipse"},
    )
    return manifest, images, factors


def save_factor_table(path: str | Path, rows: list[FactorRow]) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "label", "aspect", "dx", "dy", "brightness"])
        for r in rows:
            writer.writerow([r.id, r.label, repr(r.aspect), repr(r.dx), repr(r.dy), repr(r.brightness)])


def load_factor_table(path: str | Path) -> list[FactorRow]:
    rows = []
    with Path(path).open("r", newline="", encoding="utf-8") as fh:
        for rec in csv.DictReader(fh):
            rows.append(
                FactorRow(
                    id=rec["id"],
                    label=int(rec["label"]),
                    aspect=float(rec["aspect"]),
                    dx=float(rec["dx"]),
                    dy=float(rec["dy"]),
                    brightness=float(rec["brightness"]),
                )
            )
    return rows
