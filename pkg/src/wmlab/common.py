"""Small shared helpers: seeding, hashing, canonical JSON."""

from __future__ import annotations

import hashlib
import json
from typing import Any

import numpy as np


def rng_for(seed: int, *streams: object) -> np.random.Generator:
    """Derive an independent generator from a root seed and stream labels.

    Same (seed, streams) always yields the same generator state, so every
    dataset/training operation is reproducible down to the byte.
    """
    key = json.dumps([int(seed), *[str(s) for s in streams]])
    digest = hashlib.sha256(key.encode()).digest()
    return np.random.default_rng(np.frombuffer(digest[:16], dtype=np.uint64))


def derive_seed(seed: int, *streams: object) -> int:
    """Collapse (seed, streams) into a 63-bit integer seed."""
    key = json.dumps([int(seed), *[str(s) for s in streams]])
    digest = hashlib.sha256(key.encode()).digest()
    return int.from_bytes(digest[:8], "little") & 0x7FFF_FFFF_FFFF_FFFF


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def stable_hash(obj: Any) -> str:
    """Short hex digest of a JSON-serializable object."""
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()[:12]


def array_hash(arr: np.ndarray) -> str:
    h = hashlib.sha256()
    h.update(str(arr.dtype).encode())
    h.update(str(arr.shape).encode())
    h.update(np.ascontiguousarray(arr).tobytes())
    return h.hexdigest()[:16]
