"""Array-backed image dataset container and its on-disk cache format.

A dataset is a packed float32 tensor of shape (N, H, W, Ch) with pixel
values in [0, 1], plus integer labels. The cache layout is one directory
per dataset: ``images.npy`` (the packed tensor) and ``meta.json``
(name, split, shape, labels, seed, spec hash).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, NamedTuple

import numpy as np

from wmlab.common import array_hash
from wmlab.errors import DataError

SPLITS = ("train", "test", "proxy", "lure", "trigger")


class LabeledImage(NamedTuple):
    pixels: np.ndarray  # (H, W, Ch) float32 in [0, 1]
    label: int


@dataclass
class Dataset:
    """Ordered collection of labeled images for one split.

    ``labels_ignored`` marks proxy-style data whose labels must never be
    consulted; consumers enforce this at runtime.
    """

    name: str
    split: str
    images: np.ndarray
    labels: np.ndarray
    num_classes: int
    seed: int = 0
    labels_ignored: bool = False
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.images = np.asarray(self.images, dtype=np.float32)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        self._validate()

    def _validate(self):
        if self.split not in SPLITS:
            raise DataError(f"unknown split {self.split!r}, expected one of {SPLITS}")
        if self.images.ndim != 4:
            raise DataError(f"images must be (N,H,W,Ch), got shape {self.images.shape}")
        if len(self.images) == 0:
            raise DataError("dataset must be non-empty")
        if len(self.images) != len(self.labels):
            raise DataError("images/labels length mismatch")
        lo, hi = float(self.images.min()), float(self.images.max())
        if lo < -1e-6 or hi > 1 + 1e-6:
            raise DataError(f"pixel values outside [0,1]: min={lo}, max={hi}")
        if not self.labels_ignored:
            # Lure data may carry the reserved label C; every other split
            # must stay within the original C classes.
            cap = self.num_classes + 1 if self.split == "lure" else self.num_classes
            if self.labels.min() < 0 or self.labels.max() >= cap:
                raise DataError(
                    f"labels out of range for split {self.split!r}: "
                    f"[{self.labels.min()}, {self.labels.max()}] vs {cap} allowed"
                )

    def __len__(self) -> int:
        return len(self.images)

    def __getitem__(self, i: int) -> LabeledImage:
        return LabeledImage(self.images[i], int(self.labels[i]))

    def __iter__(self) -> Iterator[LabeledImage]:
        for i in range(len(self)):
            yield self[i]

    @property
    def image_shape(self) -> tuple[int, int, int]:
        return tuple(self.images.shape[1:])

    def subset(self, indices, name: str | None = None, split: str | None = None) -> "Dataset":
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(
            name=name or self.name,
            split=split or self.split,
            images=self.images[idx],
            labels=self.labels[idx],
            num_classes=self.num_classes,
            seed=self.seed,
            labels_ignored=self.labels_ignored,
            meta=dict(self.meta),
        )

    def content_hash(self) -> str:
        return array_hash(self.images) + ":" + array_hash(self.labels)


def concat(a: Dataset, b: Dataset, name: str, split: str) -> Dataset:
    if a.image_shape != b.image_shape:
        raise DataError(f"cannot concat shapes {a.image_shape} and {b.image_shape}")
    return Dataset(
        name=name,
        split=split,
        images=np.concatenate([a.images, b.images], axis=0),
        labels=np.concatenate([a.labels, b.labels], axis=0),
        num_classes=max(a.num_classes, b.num_classes),
        seed=a.seed,
    )


def save_cached(ds: Dataset, root: str | Path, spec_hash: str = "") -> Path:
    """Write one dataset to its cache directory and return that directory."""
    root = Path(root)
    out = root / f"{ds.name}-{ds.split}-{spec_hash or ds.content_hash()[:12]}"
    out.mkdir(parents=True, exist_ok=True)
    np.save(out / "images.npy", ds.images)
    meta = {
        "name": ds.name,
        "split": ds.split,
        "shape": list(ds.images.shape),
        "labels": ds.labels.tolist(),
        "num_classes": ds.num_classes,
        "seed": ds.seed,
        "labels_ignored": ds.labels_ignored,
        "spec_hash": spec_hash,
        "content_hash": ds.content_hash(),
        "meta": ds.meta,
    }
    (out / "meta.json").write_text(json.dumps(meta, sort_keys=True, indent=1))
    return out


def load_cached(path: str | Path) -> Dataset:
    path = Path(path)
    meta = json.loads((path / "meta.json").read_text())
    images = np.load(path / "images.npy")
    ds = Dataset(
        name=meta["name"],
        split=meta["split"],
        images=images,
        labels=np.asarray(meta["labels"], dtype=np.int64),
        num_classes=meta["num_classes"],
        seed=meta["seed"],
        labels_ignored=meta["labels_ignored"],
        meta=meta.get("meta", {}),
    )
    if ds.content_hash() != meta["content_hash"]:
        raise DataError(f"cache corruption under {path}: content hash mismatch")
    return ds
