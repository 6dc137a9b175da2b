"""Attacker-side auxiliary data: unlabeled proxy set plus a tiny lure set.

Lures get the reserved label delta (= C by default, one past the victim's
classes). Proxy labels are kept but tagged ignored; nothing on the attack
side may consult them. Pixel-level disjointness between the two sets is
enforced here.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from wmlab.common import array_hash, rng_for
from wmlab.data.containers import Dataset
from wmlab.errors import ConfigError, DataError

log = logging.getLogger(__name__)


@dataclass
class AuxiliaryData:
    proxy: Dataset
    lures: Dataset | None
    delta: int

    def __post_init__(self):
        if self.proxy.split != "proxy" or not self.proxy.labels_ignored:
            raise DataError("proxy dataset must have split='proxy' with labels_ignored")
        if self.lures is not None:
            if self.lures.split != "lure":
                raise DataError("lure dataset must have split='lure'")
            if not np.all(self.lures.labels == self.delta):
                raise DataError("every lure must carry the delta label")

    @property
    def n_proxy(self) -> int:
        return len(self.proxy)

    @property
    def n_lures(self) -> int:
        return 0 if self.lures is None else len(self.lures)


def _find_pixel_collisions(a: np.ndarray, b: np.ndarray) -> list[tuple[int, int]]:
    """Indices (i, j) where a[i] and b[j] are pixel-identical."""
    if a.shape[1:] != b.shape[1:]:
        return []
    lookup: dict[str, list[int]] = {}
    for j in range(len(b)):
        lookup.setdefault(array_hash(b[j]), []).append(j)
    hits = []
    for i in range(len(a)):
        for j in lookup.get(array_hash(a[i]), ()):
            if np.array_equal(a[i], b[j]):
                hits.append((i, j))
    return hits


def build_auxiliary(
    proxy_source: Dataset,
    lure_source: Dataset | None,
    n_proxy: int,
    n_lures: int,
    delta: int,
    num_classes: int,
    seed: int = 0,
) -> AuxiliaryData:
    """Sample the attacker's auxiliary data and verify its invariants.

    ``delta`` below ``num_classes`` is legal but flagged: it deliberately
    collides the lure label with an existing class (ablation mode).
    """
    if n_proxy < 1:
        raise ConfigError("need at least one proxy image")
    if n_lures > 0 and lure_source is None:
        raise ConfigError("n_lures > 0 but no lure source given")
    if not 0 <= delta <= num_classes:
        raise ConfigError(f"delta must lie in [0, {num_classes}], got {delta}")
    if delta < num_classes:
        log.warning(
            "lure label delta=%d collides with an existing class (C=%d); "
            "this is the label-collision ablation mode", delta, num_classes,
        )

    if len(proxy_source) < n_proxy:
        raise DataError(f"proxy source has {len(proxy_source)} images, need {n_proxy}")
    pi = rng_for(seed, "aux-proxy", proxy_source.name).permutation(len(proxy_source))[:n_proxy]
    proxy = Dataset(
        name=f"{proxy_source.name}-proxy",
        split="proxy",
        images=proxy_source.images[pi],
        labels=proxy_source.labels[pi],
        num_classes=proxy_source.num_classes,
        seed=seed,
        labels_ignored=True,
        meta={"source": proxy_source.name},
    )

    lures = None
    if n_lures > 0:
        if len(lure_source) < n_lures:
            raise DataError(f"lure source has {len(lure_source)} images, need {n_lures}")
        li = rng_for(seed, "aux-lure", lure_source.name).permutation(len(lure_source))[:n_lures]
        lure_images = lure_source.images[li]
        if lure_source.image_shape != proxy.image_shape:
            raise DataError(
                f"lure shape {lure_source.image_shape} != proxy shape {proxy.image_shape}"
            )
        collisions = _find_pixel_collisions(proxy.images, lure_images)
        if collisions:
            raise DataError(
                "proxy/lure sets intersect at (proxy_idx, lure_idx): "
                f"{collisions[:10]}{'...' if len(collisions) > 10 else ''}"
            )
        lures = Dataset(
            name=f"{lure_source.name}-lures",
            split="lure",
            images=lure_images,
            labels=np.full(n_lures, delta, dtype=np.int64),
            num_classes=num_classes,
            seed=seed,
            meta={"source": lure_source.name, "delta": delta},
        )
    return AuxiliaryData(proxy=proxy, lures=lures, delta=delta)


def proxy_mode_split(test_set: Dataset, seed: int = 0) -> tuple[Dataset, Dataset]:
    """Split the test set into an in-distribution proxy half and an eval half.

    The eval half is the only data MTA may be measured on in ID mode. Odd
    element goes to the eval half.
    """
    n = len(test_set)
    perm = rng_for(seed, "proxy-mode-split", test_set.name).permutation(n)
    half = n // 2
    proxy_idx, eval_idx = np.sort(perm[:half]), np.sort(perm[half:])
    eval_half = test_set.subset(eval_idx, name=f"{test_set.name}-evalhalf", split="test")
    eval_half.meta["reserved_eval_half"] = True
    if half == 0:
        return None, eval_half  # degenerate: all data reserved for eval
    proxy_half = Dataset(
        name=f"{test_set.name}-proxyhalf",
        split="proxy",
        images=test_set.images[proxy_idx],
        labels=test_set.labels[proxy_idx],
        num_classes=test_set.num_classes,
        seed=seed,
        labels_ignored=True,
        meta={"source": test_set.name},
    )
    return proxy_half, eval_half
