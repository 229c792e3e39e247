"""Portable counter-based pseudo-random generator.

Dataset noise, splits and the optimizer all draw from this generator so
that a (seed, operation) pair reproduces identical streams on every
platform and in any reimplementation.  The scheme is fully specified
here; nothing is delegated to library RNG state.

Stream definition (all arithmetic modulo 2**64):

* state after ``k`` draws: ``s_k = seed + (k + 1) * 0x9E3779B97F4A7C15``
* output: ``z = s_k``; ``z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9``;
  ``z = (z ^ (z >> 27)) * 0x94D049BB133111EB``; ``return z ^ (z >> 31)``
  (the splitmix64 output function)
* uniform double in [0, 1): ``(u64 >> 11) * 2**-53``
* standard normals: Box-Muller pairs.  Draw ``u_a`` then ``u_b`` from the
  uniform stream, set ``r = sqrt(-2 ln(u_a'))`` with
  ``u_a' = ((raw_a >> 11) + 1) * 2**-53`` in (0, 1], and emit
  ``r*cos(2*pi*u_b)`` followed by ``r*sin(2*pi*u_b)``.  For an odd count
  the trailing sine variate is discarded.
* bounded integers: rejection on the top of the 64-bit range, i.e. draw
  raw ``x`` until ``x < 2**64 - (2**64 % n)``, return ``x % n``.
* sub-streams: ``derive(tag)`` reseeds with
  ``mix64(seed ^ fnv1a64(tag))`` where ``fnv1a64`` runs over the UTF-8
  bytes of ``tag`` and ``mix64`` is the output function above.
"""
from __future__ import annotations

import math

import numpy as np

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def _mix64(z: int) -> int:
    z &= _MASK
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK
    return z ^ (z >> 31)


def _fnv1a64(data: bytes) -> int:
    h = _FNV_OFFSET
    for b in data:
        h = ((h ^ b) * _FNV_PRIME) & _MASK
    return h


class PortableRng:
    """splitmix64 stream with uniform, normal, integer and shuffle draws."""

    def __init__(self, seed: int):
        if not isinstance(seed, int):
            raise TypeError("seed must be an integer")
        self.seed = seed & _MASK
        self._count = 0

    def derive(self, tag: str) -> "PortableRng":
        """Independent child stream keyed by ``tag`` (order-insensitive)."""
        return PortableRng(_mix64(self.seed ^ _fnv1a64(tag.encode("utf-8"))))

    # -- raw stream ------------------------------------------------------

    def next_u64(self) -> int:
        self._count += 1
        return _mix64((self.seed + self._count * _GAMMA) & _MASK)

    def _bulk_u64(self, n: int) -> np.ndarray:
        # vectorised counter-based form; exact match to next_u64 order
        ks = np.arange(self._count + 1, self._count + n + 1, dtype=np.uint64)
        self._count += n
        z = np.uint64(self.seed) + ks * np.uint64(_GAMMA)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
        return z ^ (z >> np.uint64(31))

    # -- variates ---------------------------------------------------------

    def random(self, n: int | None = None):
        """Uniform doubles in [0, 1)."""
        if n is None:
            return (self.next_u64() >> 11) * 2.0**-53
        raw = self._bulk_u64(n)
        return (raw >> np.uint64(11)).astype(np.float64) * 2.0**-53

    def uniform(self, low: float, high: float, n: int | None = None):
        return low + (high - low) * self.random(n)

    def normal(self, n: int | None = None, mean: float = 0.0, sd: float = 1.0):
        """Standard-normal variates via Box-Muller (see module docs)."""
        if n is None:
            return float(self.normal(1, mean, sd)[0])
        pairs = (n + 1) // 2
        raw = self._bulk_u64(2 * pairs).reshape(pairs, 2)
        u_a = ((raw[:, 0] >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0**-53
        u_b = (raw[:, 1] >> np.uint64(11)).astype(np.float64) * 2.0**-53
        r = np.sqrt(-2.0 * np.log(u_a))
        ang = 2.0 * math.pi * u_b
        out = np.empty(2 * pairs)
        out[0::2] = r * np.cos(ang)
        out[1::2] = r * np.sin(ang)
        return mean + sd * out[:n]

    def below(self, n: int) -> int:
        """Unbiased integer in [0, n) by rejection."""
        if n <= 0:
            raise ValueError("upper bound must be positive")
        threshold = (1 << 64) - ((1 << 64) % n)
        while True:
            x = self.next_u64()
            if x < threshold:
                return x % n

    def permutation(self, n: int) -> np.ndarray:
        """Fisher-Yates permutation of range(n)."""
        idx = np.arange(n)
        for i in range(n - 1, 0, -1):
            j = self.below(i + 1)
            idx[i], idx[j] = idx[j], idx[i]
        return idx
