"""Ingesting real image folders and packing preprocessed pixels into archives.

Two source layouts are supported:

* class folders: one directory per class of PNG/JPEG files (AFHQ-style,
  already aligned and cropped);
* an attribute CSV next to a flat image directory (celebA convention: one
  row per image with a +1/-1 column for the binary attribute).

Preprocessed images are stored in a single ``.npz`` archive holding the id
list, the pixel stack and the preprocessing hash they were produced with.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from ..errors import DataContractError
from .preprocess import PreprocessConfig, preprocess
from .records import DatasetManifest, ImageRecord

IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg"}


def load_raw_image(path: str | Path) -> np.ndarray:
    """Read an image file as an integer array, failing with the offending path."""
    path = Path(path)
    try:
        with Image.open(path) as im:
            im = im.convert("RGB")
            return np.asarray(im)
    except FileNotFoundError:
        raise DataContractError(f"image file not found: {path}") from None
    except UnidentifiedImageError as exc:
        raise DataContractError(f"unreadable image file: {path}") from exc


def scan_class_folders(class0_dir: str | Path, class1_dir: str | Path) -> list[ImageRecord]:
    """Collect records from two class directories; ids are relative file stems."""
    records = []
    for label, root in ((0, Path(class0_dir)), (1, Path(class1_dir))):
        if not root.is_dir():
            raise DataContractError(f"class directory does not exist: {root}")
        files = sorted(p for p in root.rglob("*") if p.suffix.lower() in IMAGE_SUFFIXES)
        if not files:
            raise DataContractError(f"no images found under {root}")
        for p in files:
            records.append(ImageRecord(f"c{label}_{p.stem}", str(p), label, "train"))
    return records


def scan_attribute_csv(
    image_dir: str | Path,
    attr_csv: str | Path,
    attr_column: str,
    filename_column: str = "image_id",
) -> list[ImageRecord]:
    """Collect records from a flat image dir + attribute CSV (+1 -> class1, -1 -> class0)."""
    image_dir = Path(image_dir)
    attr_csv = Path(attr_csv)
    if not attr_csv.is_file():
        raise DataContractError(f"attribute CSV not found: {attr_csv}")
    records = []
    with attr_csv.open("r", newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or attr_column not in reader.fieldnames:
            raise DataContractError(
                f"attribute CSV {attr_csv} has no column {attr_column!r} "
                f"(columns: {reader.fieldnames})"
            )
        for row in reader:
            fname = row[filename_column]
            value = row[attr_column].strip()
            if value not in ("1", "+1", "-1"):
                raise DataContractError(
                    f"attribute value for {fname} must be +1 or -1, got {value!r}"
                )
            label = 1 if value in ("1", "+1") else 0
            records.append(ImageRecord(Path(fname).stem, str(image_dir / fname), label, "train"))
    if not records:
        raise DataContractError(f"attribute CSV {attr_csv} contains no rows")
    return records


@dataclass
class ImageArchive:
    """Preprocessed pixels for a manifest, addressable by record id."""

    ids: list[str]
    images: np.ndarray  # (N, side, side) float32 in [0, 1]
    preprocess_hash: str

    def __post_init__(self):
        if len(self.ids) != len(self.images):
            raise DataContractError("archive id list and image stack lengths differ")
        self._index = {i: k for k, i in enumerate(self.ids)}

    def __len__(self) -> int:
        return len(self.ids)

    def __contains__(self, img_id: str) -> bool:
        return img_id in self._index

    def get(self, img_id: str) -> np.ndarray:
        if img_id not in self._index:
            raise DataContractError(f"unknown image id {img_id!r}")
        return self.images[self._index[img_id]]

    def stack(self, ids: list[str]) -> np.ndarray:
        return np.stack([self.get(i) for i in ids])

    def save(self, path: str | Path) -> None:
        np.savez_compressed(
            Path(path),
            ids=np.array(self.ids),
            images=self.images.astype(np.float32),
            preprocess_hash=np.array(self.preprocess_hash),
        )

    @classmethod
    def load(cls, path: str | Path) -> "ImageArchive":
        path = Path(path)
        if not path.is_file():
            raise DataContractError(f"image archive not found: {path}")
        with np.load(path, allow_pickle=False) as data:
            return cls(
                ids=[str(s) for s in data["ids"]],
                images=data["images"],
                preprocess_hash=str(data["preprocess_hash"]),
            )


def build_archive(manifest: DatasetManifest, config: PreprocessConfig) -> ImageArchive:
    """Preprocess every manifest record from disk (parallel-safe, pure per record)."""
    ids, imgs = [], []
    for rec in manifest.records:
        raw = load_raw_image(rec.source_path)
        imgs.append(preprocess(raw, config))
        ids.append(rec.id)
    return ImageArchive(ids=ids, images=np.stack(imgs), preprocess_hash=manifest.preprocess_hash)


def archive_from_arrays(
    manifest: DatasetManifest, images: dict[str, np.ndarray]
) -> ImageArchive:
    """Pack already-processed arrays (e.g. the synthetic renderer's) into an archive."""
    missing = [r.id for r in manifest.records if r.id not in images]
    if missing:
        raise DataContractError(f"missing pixels for manifest ids: {missing[:5]}")
    ids = [r.id for r in manifest.records]
    return ImageArchive(
        ids=ids,
        images=np.stack([images[i] for i in ids]).astype(np.float32),
        preprocess_hash=manifest.preprocess_hash,
    )
