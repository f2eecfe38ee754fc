"""Portable seeded randomness.

Every random choice in the package goes through SplitMix64 (Steele, Lea and
Flood 2014).  The generator is tiny, has a 64-bit state and is defined purely
in terms of wrapping 64-bit integer arithmetic, so the Cython kernels, the
pure-Python fallback and the numpy-vectorized sampler all produce the same
words on every platform.

Algorithm (all arithmetic mod 2**64)::

    state += 0x9E3779B97F4A7C15
    z = state
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    return z ^ (z >> 31)

Word ``i`` (0-based) of the stream seeded with ``s`` is therefore
``mix(s + (i + 1) * GAMMA)``, which lets samplers jump to any position.

Bounded draws use the multiply-shift map ``((w >> 32) * n) >> 32`` for
``0 < n < 2**32``.  Its bias is below ``n / 2**32``.

Uniform subsets: sample ``j`` of a ``p``-subset sampler consumes words
``j*p .. j*p + p - 1``.  Draw ``t`` picks ``r = below(n - t)`` and maps it to
the ``r``-th vertex not chosen yet.  The draws in order form a uniform
injective ``p``-tuple; sorted, a uniform ``p``-subset.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
MUL1 = 0xBF58476D1CE4E5B9
MUL2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * MUL1) & MASK64
    z = ((z ^ (z >> 27)) * MUL2) & MASK64
    return z ^ (z >> 31)


def bounded(word: int, n: int) -> int:
    """Map a 64-bit word into ``range(n)``."""
    return ((word >> 32) * n) >> 32


class SplitMix64:
    """Sequential SplitMix64 stream."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GAMMA) & MASK64
        return mix64(self.state)

    def below(self, n: int) -> int:
        return bounded(self.next_u64(), n)

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates, last position first."""
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]


def word_at(seed: int, index: int) -> int:
    return mix64(seed + (index + 1) * GAMMA)


def words(seed: int, start: int, count: int) -> np.ndarray:
    """Words ``start .. start+count-1`` of the stream, as uint64."""
    idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(seed & MASK64) + idx * np.uint64(GAMMA)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(MUL1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(MUL2)
    return z ^ (z >> np.uint64(31))


def sample_tuples(seed: int, n: int, p: int, start: int, count: int) -> np.ndarray:
    """Ordered injective ``p``-tuples for samples ``start .. start+count-1``.

    Returns an int64 array of shape ``(count, p)``.  Row ``r`` is sample
    ``start + r`` of the subset sampler described in the module docstring.
    """
    w = words(seed, start * p, count * p).reshape(count, p)
    out = np.empty((count, p), dtype=np.int64)
    for t in range(p):
        r = ((w[:, t] >> np.uint64(32)) * np.uint64(n - t)) >> np.uint64(32)
        v = r.astype(np.int64)
        if t:
            # earlier picks in ascending order; skip each one at or below v
            chosen = np.sort(out[:, :t], axis=1)
            for s in range(t):
                v += v >= chosen[:, s]
        out[:, t] = v
    return out


def sample_tuple_scalar(seed: int, n: int, p: int, j: int) -> tuple[int, ...]:
    """Reference scalar version of one row of :func:`sample_tuples`."""
    picked: list[int] = []
    for t in range(p):
        v = bounded(word_at(seed, j * p + t), n - t)
        for c in sorted(picked):
            if v >= c:
                v += 1
        picked.append(v)
    return tuple(picked)
