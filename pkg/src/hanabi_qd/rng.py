"""Deterministic RNG stream derivation.

A single master seed fans out into independent named streams via SHA-256,
so that any component (one individual's evaluation, one cross-play cell)
gets the same randomness regardless of scheduling, worker count, or
platform. `random.Random` (Mersenne Twister) is bit-stable across CPython
versions and operating systems, which the byte-identical-archive guarantee
relies on.
"""

from __future__ import annotations

import hashlib
import random


def derive_seed(master_seed: int, *path: object) -> int:
    """Derive a 64-bit child seed from a master seed and a label path."""
    text = repr((int(master_seed),) + tuple(path))
    digest = hashlib.sha256(text.encode("ascii")).digest()
    return int.from_bytes(digest[:8], "big")


def stream(master_seed: int, *path: object) -> random.Random:
    """A fresh `random.Random` seeded from (master_seed, *path)."""
    return random.Random(derive_seed(master_seed, *path))
