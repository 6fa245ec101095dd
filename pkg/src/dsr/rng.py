"""Deterministic random streams with explicit (seed, purpose) splitting.

Every stochastic component draws from its own named stream so that runs
are reproducible and adding a consumer never shifts another consumer's
draws. Stream keys are derived from a stable hash of the path labels.
"""

from __future__ import annotations

import hashlib

import numpy as np


def _key_words(path) -> list[int]:
    words = []
    for item in path:
        if isinstance(item, (int, np.integer)):
            words.append(int(item) & 0xFFFFFFFF)
        else:
            digest = hashlib.sha256(str(item).encode("utf-8")).digest()
            words.extend(int.from_bytes(digest[i : i + 4], "little") for i in range(0, 16, 4))
    return words


def stream(seed: int, *path) -> np.random.Generator:
    """A PCG64 generator for the stream identified by (seed, *path)."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(_key_words(path))))
