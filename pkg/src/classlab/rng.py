"""Deterministic per-draw RNG derivation.

Sessions never hold generator state: the n-th random draw of a session uses
a fresh generator seeded from (session seed, n). Replaying a log therefore
reproduces every draw without serializing Mersenne Twister internals.
"""

from __future__ import annotations

import random

_MASK = (1 << 64) - 1


def mix64(seed: int, index: int) -> int:
    """splitmix64 finalizer over the seed xor a golden-ratio-spaced index."""
    x = (seed ^ (index * 0x9E3779B97F4A7C15)) & _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return (x ^ (x >> 31)) & _MASK


def draw_rng(seed: int, index: int) -> random.Random:
    """Generator for the index-th draw of a session seeded with ``seed``."""
    return random.Random(mix64(seed, index))
