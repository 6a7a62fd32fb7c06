"""Counter-mode pseudorandom bits built on the splitmix64 finalizer.

Both ends of a link replay the same stream from ``(key, domain, counter)``,
so coefficients never have to be transmitted.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import lru_cache

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


@lru_cache(maxsize=256)
def label_hash(label: str) -> int:
    return int.from_bytes(hashlib.blake2b(label.encode(), digest_size=8).digest(), "little")


def fold(state: int, coord: int | str) -> int:
    """One step of :func:`derive`; lets callers cache a common prefix."""
    v = label_hash(coord) if isinstance(coord, str) else coord & MASK64
    # two mix64 rounds, inlined: this sits on the per-symbol path
    z = (v + GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    z = (state ^ z ^ (z >> 31)) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive(key: int, *coords: int | str) -> int:
    """Fold integer or string coordinates into a fresh 64-bit key."""
    k = mix64(key ^ GOLDEN)
    for c in coords:
        k = fold(k, c)
    return k


@lru_cache(maxsize=1024)
def derive_prefix(key: int, *coords: int | str) -> int:
    """Memoized :func:`derive` for the leading coordinates of a hot path."""
    return derive(key, *coords)


def word(key: int, counter: int) -> int:
    """64-bit output number ``counter`` of the stream keyed by ``key``."""
    return mix64(key + (counter + 1) * GOLDEN)


def prf_int(key: int, n: int, counter: int = 0) -> int:
    """``n`` bits starting at word ``counter``, packed little-endian into an int."""
    if n <= 0:
        return 0
    nwords = (n + 63) >> 6
    out = 0
    for j in range(nwords):
        z = (key + (counter + j + 1) * GOLDEN) & MASK64
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        out |= (z ^ (z >> 31)) << (64 * j)
    if n & 63:
        out &= (1 << n) - 1
    return out


@dataclass
class PrfStream:
    key: int
    domain: str = ""
    counter: int = 0

    @property
    def stream_key(self) -> int:
        return derive(self.key, self.domain)

    def copy(self) -> "PrfStream":
        return PrfStream(self.key, self.domain, self.counter)

    def bits(self, n: int):
        from .gf2 import BitVector

        if n < 0:
            raise ValueError("n must be non-negative")
        v = prf_int(self.stream_key, n, self.counter)
        self.counter += (n + 63) >> 6
        return BitVector(v, n)

    def uniform_words(self, n: int) -> list[int]:
        sk = self.stream_key
        out = [word(sk, self.counter + j) for j in range(n)]
        self.counter += n
        return out


def prf_bits(stream: PrfStream, n: int):
    return stream.bits(n)
