"""Dataset manifests: labeled image records with train/test split assignment.

A manifest is persisted as a line-delimited JSON file. The first line is a
header object carrying the schema version, the preprocessing config (and
its hash) and the class-label mapping; every following line is one record
``{"id", "path", "label", "split"}``. The header hash lets downstream
stages detect stale preprocessing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import DataContractError
from ..hashing import config_hash
from .preprocess import PreprocessConfig

CLASS_NAMES = ("class0", "class1")
SPLIT_NAMES = ("train", "test")

MANIFEST_SCHEMA = 1


@dataclass(frozen=True)
class ImageRecord:
    """One labeled image. `label` is 0/1; `split` is 'train' or 'test'."""

    id: str
    source_path: str
    label: int
    split: str

    def __post_init__(self):
        if self.label not in (0, 1):
            raise DataContractError(f"label must be 0 or 1, got {self.label!r}")
        if self.split not in SPLIT_NAMES:
            raise DataContractError(f"split must be one of {SPLIT_NAMES}, got {self.split!r}")


@dataclass
class DatasetManifest:
    """An immutable set of records plus the preprocessing they were built with."""

    records: list[ImageRecord]
    preprocess: PreprocessConfig = field(default_factory=PreprocessConfig)
    class_names: dict[str, str] = field(
        default_factory=lambda: {"class0": "class0", "class1": "class1"}
    )

    def __post_init__(self):
        ids = [r.id for r in self.records]
        if len(set(ids)) != len(ids):
            seen, dupes = set(), set()
            for i in ids:
                (dupes if i in seen else seen).add(i)
            raise DataContractError(f"duplicate record ids in manifest: {sorted(dupes)[:5]}")

    @property
    def preprocess_hash(self) -> str:
        return config_hash(self.preprocess.to_dict())

    def split_records(self, split: str) -> list[ImageRecord]:
        if split not in SPLIT_NAMES:
            raise DataContractError(f"unknown split {split!r}")
        return [r for r in self.records if r.split == split]

    def class_records(self, label: int, split: str | None = None) -> list[ImageRecord]:
        recs = self.records if split is None else self.split_records(split)
        return [r for r in recs if r.label == label]

    def save(self, path: str | Path) -> None:
        path = Path(path)
        header = {
            "schema": MANIFEST_SCHEMA,
            "preprocess": self.preprocess.to_dict(),
            "preprocess_hash": self.preprocess_hash,
            "class_names": self.class_names,
        }
        with path.open("w", encoding="utf-8") as fh:
            fh.write(json.dumps(header) + "\n")
            for rec in self.records:
                line = {
                    "id": rec.id,
                    "path": rec.source_path,
                    "label": CLASS_NAMES[rec.label],
                    "split": rec.split,
                }
                fh.write(json.dumps(line) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "DatasetManifest":
        path = Path(path)
        with path.open("r", encoding="utf-8") as fh:
            lines = [ln for ln in fh.read().splitlines() if ln.strip()]
        if not lines:
            raise DataContractError(f"manifest {path} is empty")
        header = json.loads(lines[0])
        if header.get("schema") != MANIFEST_SCHEMA:
            raise DataContractError(
                f"manifest schema {header.get('schema')!r} not supported (expected {MANIFEST_SCHEMA})"
            )
        pp = PreprocessConfig(**header["preprocess"])
        if config_hash(pp.to_dict()) != header["preprocess_hash"]:
            raise DataContractError(f"manifest {path}: preprocess hash mismatch, file is stale")
        records = []
        for ln in lines[1:]:
            obj = json.loads(ln)
            records.append(
                ImageRecord(
                    id=obj["id"],
                    source_path=obj["path"],
                    label=CLASS_NAMES.index(obj["label"]),
                    split=obj["split"],
                )
            )
        return cls(records=records, preprocess=pp, class_names=header["class_names"])


def split_dataset(
    records: list[ImageRecord],
    train_per_class: int,
    test_per_class: int,
    seed: int,
    preprocess: PreprocessConfig | None = None,
    class_names: dict[str, str] | None = None,
) -> DatasetManifest:
    """Assign disjoint train/test splits with exact per-class counts.

    Records are shuffled deterministically (sorted by id, then permuted with
    the seeded generator) within each class; the first `train_per_class`
    become training records and the next `test_per_class` test records.

    Raises DataContractError when a class has too few records.
    """
    if train_per_class < 0 or test_per_class < 0:
        raise DataContractError("split counts must be non-negative")
    rng = np.random.default_rng(seed)
    out: list[ImageRecord] = []
    need = train_per_class + test_per_class
    for label in (0, 1):
        pool = sorted((r for r in records if r.label == label), key=lambda r: r.id)
        if len(pool) < need:
            raise DataContractError(
                f"class{label}: requested {train_per_class}+{test_per_class} records "
                f"but only {len(pool)} available"
            )
        order = rng.permutation(len(pool))
        chosen = [pool[i] for i in order[:need]]
        for k, rec in enumerate(chosen):
            split = "train" if k < train_per_class else "test"
            out.append(ImageRecord(rec.id, rec.source_path, rec.label, split))
    kwargs = {}
    if preprocess is not None:
        kwargs["preprocess"] = preprocess
    if class_names is not None:
        kwargs["class_names"] = class_names
    return DatasetManifest(records=out, **kwargs)
