"""Trigger synthesis for query-response watermarks.

Content and noise triggers blend a perturbation pattern into clean images
through a mask: ``x_t = (1 - m) * x + m * pattern``, where the mask fixes
both position and intensity of the overwrite. Unrelated triggers are
images from a foreign dataset relabeled to the target class.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import torch

from wmlab.common import rng_for
from wmlab.data.containers import Dataset
from wmlab.errors import ConfigError, DataError

# 5x3 glyph bitmaps for the stamp text
_GLYPHS = {
    "T": ["111", "010", "010", "010", "010"],
    "E": ["111", "100", "111", "100", "111"],
    "S": ["111", "100", "111", "001", "111"],
}


def render_stamp(text: str = "TEST", scale: int = 1) -> np.ndarray:
    """Rasterize ``text`` into a binary bitmap (rows, cols) of 0/1."""
    cols = []
    for i, ch in enumerate(text):
        if ch not in _GLYPHS:
            raise ConfigError(f"no glyph for {ch!r}; available: {sorted(_GLYPHS)}")
        if i:
            cols.append(np.zeros((5, 1)))
        cols.append(np.array([[int(b) for b in row] for row in _GLYPHS[ch]]))
    bitmap = np.concatenate(cols, axis=1).astype(np.float32)
    if scale > 1:
        bitmap = np.kron(bitmap, np.ones((scale, scale), dtype=np.float32))
    return bitmap


@dataclass
class TriggerSpec:
    """Recipe for one trigger set.

    ``pattern`` is (H, W, Ch) shared across triggers, or (M, H, W, Ch) for
    per-trigger perturbations (noise watermarks draw fresh noise per
    trigger). Mask entries are continuous intensities in [0, 1]. For
    kind='unrelated' both are unused.
    """

    kind: str
    pattern: np.ndarray | None
    mask: np.ndarray | None
    target_label: int
    count: int
    seed: int = 0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("content", "noise", "unrelated"):
            raise ConfigError(f"unknown trigger kind {self.kind!r}")
        if self.count < 1:
            raise ConfigError("trigger count must be >= 1")
        if self.kind != "unrelated":
            if self.mask is None or self.pattern is None:
                raise ConfigError(f"kind={self.kind!r} needs both pattern and mask")
            self.mask = np.asarray(self.mask, dtype=np.float32)
            self.pattern = np.asarray(self.pattern, dtype=np.float32)
            if self.mask.min() < 0 or self.mask.max() > 1:
                raise ConfigError("mask entries must lie in [0,1]")

    def describe(self) -> dict:
        return {
            "kind": self.kind,
            "target_label": self.target_label,
            "count": self.count,
            "seed": self.seed,
            **self.meta,
        }


def content_trigger_spec(
    image_shape: tuple[int, int, int],
    target_label: int,
    count: int,
    seed: int = 0,
    text: str = "TEST",
    scale: int = 1,
    position: str | tuple[int, int] = "center",
    intensity: float = 1.0,
    pattern_value: float = 1.0,
) -> TriggerSpec:
    """Stamp-style spec: ``text`` glyphs overwritten at ``intensity``.

    Default places the stamp roughly centered; position/scale are knobs.
    """
    h, w, ch = image_shape
    bitmap = render_stamp(text, scale)
    gh, gw = bitmap.shape
    if gh > h or gw > w:
        raise ConfigError(f"stamp {bitmap.shape} does not fit image {(h, w)}")
    if position == "center":
        r0, c0 = (h - gh) // 2, (w - gw) // 2
    else:
        r0, c0 = position
        if r0 + gh > h or c0 + gw > w:
            raise ConfigError("stamp position out of bounds")
    mask = np.zeros((h, w), dtype=np.float32)
    mask[r0 : r0 + gh, c0 : c0 + gw] = bitmap * intensity
    pattern = np.full((h, w, ch), pattern_value, dtype=np.float32)
    return TriggerSpec(
        kind="content", pattern=pattern, mask=mask, target_label=target_label,
        count=count, seed=seed,
        meta={"text": text, "scale": scale, "position": str(position), "intensity": intensity},
    )


def noise_trigger_spec(
    image_shape: tuple[int, int, int],
    target_label: int,
    count: int,
    seed: int = 0,
    std: float = 0.1,
    patch: int = 8,
    corner: str = "br",
) -> TriggerSpec:
    """Per-trigger Gaussian noise (mean 0) overwritten on a corner patch."""
    h, w, ch = image_shape
    if patch > min(h, w):
        raise ConfigError("noise patch larger than image")
    mask = np.zeros((h, w), dtype=np.float32)
    r0 = 0 if corner[0] == "t" else h - patch
    c0 = 0 if corner[1] == "l" else w - patch
    mask[r0 : r0 + patch, c0 : c0 + patch] = 1.0
    pattern = rng_for(seed, "noise-pattern").normal(0.0, std, size=(count, h, w, ch))
    return TriggerSpec(
        kind="noise", pattern=pattern.astype(np.float32), mask=mask,
        target_label=target_label, count=count, seed=seed,
        meta={"std": std, "patch": patch, "corner": corner},
    )


def _stratified_indices(labels: np.ndarray, num_classes: int, count: int, rng) -> np.ndarray:
    """Spread ``count`` picks across classes as evenly as availability allows."""
    per_class = [np.flatnonzero(labels == c) for c in range(num_classes)]
    for idx in per_class:
        rng.shuffle(idx)
    quota = [count // num_classes] * num_classes
    for c in range(count % num_classes):
        quota[c] += 1
    chosen: list[np.ndarray] = []
    shortfall = 0
    leftovers: list[np.ndarray] = []
    for idx, q in zip(per_class, quota):
        take = min(q, len(idx))
        chosen.append(idx[:take])
        shortfall += q - take
        leftovers.append(idx[take:])
    if shortfall:
        pool = np.concatenate([lo for lo in leftovers if len(lo)]) if leftovers else np.array([], dtype=np.int64)
        if len(pool) < shortfall:
            raise DataError(f"clean set too small for {count} triggers")
        rng.shuffle(pool)
        chosen.append(pool[:shortfall])
    out = np.concatenate(chosen)
    rng.shuffle(out)
    return out


def synthesize_triggers(clean: Dataset, spec: TriggerSpec) -> Dataset:
    """Blend the spec's pattern into stratified clean samples, label y_t."""
    if spec.kind == "unrelated":
        raise ConfigError("kind='unrelated' is built by make_unrelated_triggers")
    h, w, ch = clean.image_shape
    if spec.mask.shape != (h, w):
        raise DataError(f"mask shape {spec.mask.shape} != image plane {(h, w)}")
    pattern = spec.pattern
    if pattern.ndim == 3:
        pattern = np.broadcast_to(pattern, (spec.count,) + pattern.shape)
    if pattern.shape != (spec.count, h, w, ch):
        raise DataError(f"pattern shape {spec.pattern.shape} incompatible with {(spec.count, h, w, ch)}")
    if len(clean) < spec.count:
        raise DataError(f"need {spec.count} base images, clean set has {len(clean)}")
    if not 0 <= spec.target_label < clean.num_classes:
        raise ConfigError(f"target label {spec.target_label} outside [0, {clean.num_classes})")

    rng = rng_for(spec.seed, "trigger-sample", clean.name)
    idx = _stratified_indices(clean.labels, clean.num_classes, spec.count, rng)
    base = clean.images[idx]
    m = spec.mask[None, :, :, None]
    blended = np.clip((1.0 - m) * base + m * pattern, 0.0, 1.0).astype(np.float32)
    return Dataset(
        name=f"{clean.name}-{spec.kind}-trigger",
        split="trigger",
        images=blended,
        labels=np.full(spec.count, spec.target_label, dtype=np.int64),
        num_classes=clean.num_classes,
        seed=spec.seed,
        meta={"spec": spec.describe(), "base_indices": idx.tolist()},
    )


def adapt_images(images: np.ndarray, target_shape: tuple[int, int, int]) -> np.ndarray:
    """Bilinear-resize and channel-replicate images onto ``target_shape``."""
    h, w, ch = target_shape
    x = torch.from_numpy(np.ascontiguousarray(images)).permute(0, 3, 1, 2)
    if x.shape[2:] != (h, w):
        x = torch.nn.functional.interpolate(x, size=(h, w), mode="bilinear", align_corners=False)
    if x.shape[1] != ch:
        if x.shape[1] == 1:
            x = x.repeat(1, ch, 1, 1)
        else:
            x = x.mean(dim=1, keepdim=True).repeat(1, ch, 1, 1)
    out = x.permute(0, 2, 3, 1).numpy().astype(np.float32)
    return np.clip(out, 0.0, 1.0)


def make_unrelated_triggers(
    source: Dataset,
    target_label: int,
    count: int,
    input_shape: tuple[int, int, int] | None = None,
    num_classes: int | None = None,
    seed: int = 0,
) -> Dataset:
    """Relabel ``count`` foreign images as the target class."""
    if count < 1:
        raise ConfigError("count must be >= 1")
    if len(source) < count:
        raise DataError(f"unrelated source has {len(source)} images, need {count}")
    idx = rng_for(seed, "unrelated-sample", source.name).permutation(len(source))[:count]
    images = source.images[idx]
    shape = input_shape or source.image_shape
    images = adapt_images(images, shape)
    return Dataset(
        name=f"{source.name}-unrelated-trigger",
        split="trigger",
        images=images,
        labels=np.full(count, target_label, dtype=np.int64),
        num_classes=num_classes or source.num_classes,
        seed=seed,
        meta={"source": source.name, "source_indices": idx.tolist()},
    )
