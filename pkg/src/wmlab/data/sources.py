"""Image sources: procedural corpora plus local-file loaders for the real ones.

The procedural corpora make the whole pipeline runnable on a desk with no
network access:

* ``synth10``  - 10-class main-task stand-in (32x32x3): oriented color stripes.
* ``synth100`` - 100-class out-of-distribution stand-in: ring/checker textures
  in a pastel palette, used as proxy data.
* ``abstract`` - random shape compositions, used as lure data.
* ``digits1``  - 28x28x1 handdrawn-style '1' strokes, used as an unrelated
  trigger source.

``cifar10``/``cifar100`` load from a local copy (``WMLAB_DATA_DIR`` or an
explicit ``data_dir``); downloading goes through :func:`fetch`, the single
mockable network entry point.
"""

from __future__ import annotations

import os
import pickle
from pathlib import Path
from typing import Callable

import numpy as np

from wmlab.common import rng_for, stable_hash
from wmlab.data.containers import Dataset, load_cached, save_cached
from wmlab.errors import ConfigError, DataError


def fetch(url: str, dest: Path) -> Path:
    """Download ``url`` to ``dest``. Single network entry point, mockable.

    Raises DataError with guidance when the environment has no network
    access; every builtin loader works offline from a local copy instead.
    """
    import urllib.request

    dest = Path(dest)
    dest.parent.mkdir(parents=True, exist_ok=True)
    try:
        urllib.request.urlretrieve(url, dest)  # noqa: S310
    except Exception as exc:
        raise DataError(
            f"could not fetch {url}: {exc}. Place a local copy under "
            f"WMLAB_DATA_DIR and retry, or use a procedural source."
        ) from exc
    return dest


def _hsv_to_rgb(h: float, s: float, v: float) -> np.ndarray:
    i = int(h * 6) % 6
    f = h * 6 - int(h * 6)
    p, q, t = v * (1 - s), v * (1 - f * s), v * (1 - (1 - f) * s)
    rgb = [(v, t, p), (q, v, p), (p, v, t), (p, q, v), (t, p, v), (v, p, q)][i]
    return np.asarray(rgb, dtype=np.float32)


_YY, _XX = np.meshgrid(np.arange(32), np.arange(32), indexing="ij")


def _gen_synth10(n: int, seed: int, num_classes: int = 10) -> tuple[np.ndarray, np.ndarray]:
    """Oriented stripes; class fixes both orientation and foreground hue."""
    rng = rng_for(seed, "synth10")
    labels = rng.integers(0, num_classes, size=n)
    images = np.empty((n, 32, 32, 3), dtype=np.float32)
    for i, k in enumerate(labels):
        theta = np.pi * k / num_classes + rng.normal(0, 0.035)
        freq = rng.uniform(0.55, 0.95)
        phase = rng.uniform(0, 2 * np.pi)
        wave = 0.5 + 0.5 * np.sin(freq * (_XX * np.cos(theta) + _YY * np.sin(theta)) + phase)
        fg = _hsv_to_rgb((k / num_classes + rng.normal(0, 0.015)) % 1.0, 0.85, 0.9)
        bg = np.float32(rng.uniform(0.05, 0.3))
        img = wave[..., None] * fg + (1 - wave[..., None]) * bg
        img += rng.normal(0, 0.04, size=img.shape)
        images[i] = np.clip(img, 0, 1)
    return images, labels


def _gen_synth100(n: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Concentric rings crossed with checkers; pastel palette, 100 classes."""
    rng = rng_for(seed, "synth100")
    labels = rng.integers(0, 100, size=n)
    images = np.empty((n, 32, 32, 3), dtype=np.float32)
    for i, k in enumerate(labels):
        cy, cx = rng.uniform(8, 24, size=2)
        r = np.sqrt((_XX - cx) ** 2 + (_YY - cy) ** 2)
        period = 3.0 + (k % 10) * 0.7 + rng.uniform(-0.2, 0.2)
        rings = 0.5 + 0.5 * np.sin(2 * np.pi * r / period)
        cell = 2 + (k // 10) % 5
        checker = ((_XX // cell + _YY // cell) % 2).astype(np.float32)
        tex = 0.6 * rings + 0.4 * checker
        fg = _hsv_to_rgb(((k % 20) / 20 + 0.025) % 1.0, 0.35, 0.8)
        bg = _hsv_to_rgb(rng.uniform(0, 1), 0.15, 0.45)
        img = tex[..., None] * fg + (1 - tex[..., None]) * bg
        img += rng.normal(0, 0.03, size=img.shape)
        images[i] = np.clip(img, 0, 1)
    return images, labels


def _gen_abstract(n: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Random saturated shape compositions on gradient backgrounds."""
    rng = rng_for(seed, "abstract")
    images = np.empty((n, 32, 32, 3), dtype=np.float32)
    for i in range(n):
        g0, g1 = rng.uniform(0, 1, size=(2, 3))
        t = (_YY / 31.0)[..., None]
        img = (1 - t) * g0 + t * g1
        for _ in range(rng.integers(3, 7)):
            color = _hsv_to_rgb(rng.uniform(0, 1), rng.uniform(0.7, 1.0), rng.uniform(0.6, 1.0))
            cy, cx = rng.uniform(2, 30, size=2)
            ry, rx = rng.uniform(3, 12, size=2)
            ang = rng.uniform(0, np.pi)
            dy, dx = _YY - cy, _XX - cx
            u = dx * np.cos(ang) + dy * np.sin(ang)
            v = -dx * np.sin(ang) + dy * np.cos(ang)
            mask = (u / rx) ** 2 + (v / ry) ** 2 <= 1.0
            img[mask] = 0.75 * color + 0.25 * img[mask]
        img += rng.normal(0, 0.02, size=img.shape)
        images[i] = np.clip(img, 0, 1)
    return images, np.zeros(n, dtype=np.int64)


def _gen_digits1(n: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Grayscale 28x28 strokes resembling handwritten '1's, all labeled 1."""
    rng = rng_for(seed, "digits1")
    yy, xx = np.meshgrid(np.arange(28), np.arange(28), indexing="ij")
    images = np.empty((n, 28, 28, 1), dtype=np.float32)
    for i in range(n):
        x0 = rng.uniform(11, 17)
        slant = rng.uniform(-0.25, 0.25)
        width = rng.uniform(0.9, 1.8)
        top, bot = rng.uniform(3, 6), rng.uniform(22, 25)
        center = x0 + slant * (yy - 14)
        stroke = np.exp(-((xx - center) ** 2) / (2 * width**2))
        stroke *= ((yy >= top) & (yy <= bot)).astype(np.float32)
        if rng.random() < 0.7:  # flag at the top of the digit
            fy = top + rng.uniform(0, 2)
            flag = np.exp(
                -(((yy - fy) - 0.9 * (xx - center)) ** 2) / (2 * width**2)
            ) * ((xx < center + 0.5) & (xx > center - 6) & (yy < top + 6))
            stroke = np.maximum(stroke, flag)
        img = stroke * rng.uniform(0.8, 1.0) + rng.normal(0, 0.02, size=stroke.shape)
        images[i, :, :, 0] = np.clip(img, 0, 1)
    return images, np.ones(n, dtype=np.int64)


def _load_cifar_local(name: str, split: str, size: int, seed: int, data_dir: str | None):
    root = Path(data_dir or os.environ.get("WMLAB_DATA_DIR", "~/.wmlab/data")).expanduser()
    subdir = {"cifar10": "cifar-10-batches-py", "cifar100": "cifar-100-python"}[name]
    base = root / subdir
    if not base.exists():
        raise DataError(
            f"no local copy of {name} under {base}; download it there first "
            f"(the fetch utility is wmlab.data.sources.fetch) or use a "
            f"procedural source such as synth10/synth100."
        )

    def unpickle(p: Path) -> dict:
        with open(p, "rb") as f:
            return pickle.load(f, encoding="bytes")

    if name == "cifar10":
        files = [f"data_batch_{i}" for i in range(1, 6)] if split == "train" else ["test_batch"]
        raws = [unpickle(base / f) for f in files]
        data = np.concatenate([r[b"data"] for r in raws])
        labels = np.concatenate([np.asarray(r[b"labels"]) for r in raws])
        num_classes = 10
    else:
        raw = unpickle(base / ("train" if split == "train" else "test"))
        data = raw[b"data"]
        labels = np.asarray(raw[b"fine_labels"])
        num_classes = 100
    images = data.reshape(-1, 3, 32, 32).transpose(0, 2, 3, 1).astype(np.float32) / 255.0
    idx = rng_for(seed, name, split, "subsample").permutation(len(images))[:size]
    idx = np.sort(idx)
    return images[idx], labels[idx], num_classes


_PROCEDURAL: dict[str, tuple[Callable, int, tuple[int, int, int]]] = {
    "synth10": (_gen_synth10, 10, (32, 32, 3)),
    "synth100": (_gen_synth100, 100, (32, 32, 3)),
    "abstract": (_gen_abstract, 1, (32, 32, 3)),
    "digits1": (_gen_digits1, 10, (28, 28, 1)),
}


def registered_sources() -> list[str]:
    return sorted(_PROCEDURAL) + ["cifar10", "cifar100"]


def load_source(
    name: str,
    size: int,
    seed: int = 0,
    split: str = "train",
    cache_dir: str | Path | None = None,
    data_dir: str | None = None,
) -> Dataset:
    """Materialize ``size`` images of a named source, optionally disk-cached."""
    if size < 1:
        raise ConfigError(f"size must be >= 1, got {size}")
    if split not in ("train", "test"):
        raise ConfigError(f"sources provide train/test splits only, got {split!r}")

    key = stable_hash({"name": name, "size": size, "seed": seed, "split": split})
    if cache_dir is not None:
        hit = Path(cache_dir) / f"{name}-{split}-{key}"
        if hit.exists():
            return load_cached(hit)

    if name in _PROCEDURAL:
        gen, num_classes, _ = _PROCEDURAL[name]
        images, labels = gen(size, derive_split_seed(seed, name, split))
    elif name in ("cifar10", "cifar100"):
        images, labels, num_classes = _load_cifar_local(name, split, size, seed, data_dir)
    else:
        raise ConfigError(f"unknown source {name!r}; registered: {registered_sources()}")

    ds = Dataset(
        name=name, split=split, images=images, labels=labels,
        num_classes=num_classes, seed=seed,
    )
    if cache_dir is not None:
        save_cached(ds, cache_dir, spec_hash=key)
    return ds


def derive_split_seed(seed: int, name: str, split: str) -> int:
    # train/test draws of a procedural source come from disjoint RNG streams
    from wmlab.common import derive_seed

    return derive_seed(seed, name, split)
