"""Deterministic, splittable random number generation.

The generator is counter-based SplitMix64 (Steele, Lea & Flood's mixing
function): draw ``i`` of a stream seeded with ``s`` is

    mix64(s + (i + 1) * GAMMA)   (all arithmetic mod 2**64)

where ``GAMMA = 0x9E3779B97F4A7C15`` and ``mix64`` is the standard
xor-shift/multiply finalizer.  Because each draw depends only on the seed
and the counter, blocks of draws vectorize with numpy uint64 arithmetic
and the stream is byte-identical on every platform.

The platform RNG is deliberately not used anywhere in this package.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_INV_2_53 = 1.0 / float(1 << 53)


def _mix64(z: np.ndarray) -> np.ndarray:
    """SplitMix64 finalizer on a uint64 array (in place, returns input)."""
    z ^= z >> np.uint64(30)
    z *= _MIX1
    z ^= z >> np.uint64(27)
    z *= _MIX2
    z ^= z >> np.uint64(31)
    return z


class Rng:
    """Splittable deterministic random stream.

    A stream is identified by ``(seed, counter)``.  Every drawing method
    advances the counter by the number of raw 64-bit words consumed, so a
    sequence of calls is reproducible regardless of how draws are batched.

    Not thread-safe: a stream has a single owner.  Parallel work should
    derive independent child streams via :meth:`split`.
    """

    __slots__ = ("_seed", "_counter")

    def __init__(self, seed: int, _counter: int = 0):
        self._seed = np.uint64(int(seed) & _MASK64)
        self._counter = _counter

    @property
    def seed(self) -> int:
        return int(self._seed)

    @property
    def counter(self) -> int:
        return self._counter

    def raw(self, n: int) -> np.ndarray:
        """Next ``n`` raw uint64 words of the stream."""
        if n < 0:
            raise ValueError(f"n must be >= 0, got {n}")
        start = self._counter + 1
        with np.errstate(over="ignore"):
            z = np.arange(start, start + n, dtype=np.uint64)
            z *= _GAMMA
            z += self._seed
            out = _mix64(z)
        self._counter += n
        return out

    def split(self) -> "Rng":
        """Derive an independent child stream (consumes one draw)."""
        return Rng(int(self.raw(1)[0]))

    def random(self, n: int) -> np.ndarray:
        """``n`` doubles uniform on [0, 1): the top 53 bits of each word."""
        return (self.raw(n) >> np.uint64(11)).astype(np.float64) * _INV_2_53

    def uniform(self, rows: int, cols: int, lo: float = 0.0, hi: float = 1.0) -> np.ndarray:
        """(rows, cols) matrix of i.i.d. uniform samples on [lo, hi)."""
        if lo > hi:
            raise ValueError(f"lo must be <= hi, got lo={lo}, hi={hi}")
        u = self.random(rows * cols).reshape(rows, cols)
        if lo == 0.0 and hi == 1.0:
            return u
        return lo + u * (hi - lo)

    def bernoulli(self, p: np.ndarray) -> np.ndarray:
        """0/1 float64 samples with per-entry success probability ``p``."""
        p = np.asarray(p, dtype=np.float64)
        u = self.random(p.size).reshape(p.shape)
        return (u < p).astype(np.float64)

    def permutation(self, n: int) -> np.ndarray:
        """Random permutation of range(n): stable argsort of 64-bit keys."""
        return np.argsort(self.raw(n), kind="stable")

    def integers(self, n: int, size: int) -> np.ndarray:
        """``size`` integers uniform on [0, n).

        Computed as floor(u * n); the modulo bias is below 2**-40 for any
        n < 2**13 and irrelevant for the offset sampling this is used for.
        """
        if n <= 0:
            raise ValueError(f"n must be >= 1, got {n}")
        return np.minimum((self.random(size) * n).astype(np.int64), n - 1)

    def __repr__(self) -> str:
        return f"Rng(seed={self.seed:#x}, counter={self._counter})"
