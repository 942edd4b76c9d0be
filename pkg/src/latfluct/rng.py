"""Counter-based randomness keyed by integer tuples.

Every random quantity in this package is a pure function of a 64-bit key.
Keys are SplitMix64 states: a stream is the sequence

    out_i = mix64(key + (i + 1) * GOLDEN)        (mod 2^64)

where ``mix64`` is the SplitMix64 finalizer.  Sub-streams are addressed by
hashing integer tuples into new keys (seed material, draw indices, lattice
vector coordinates).  That makes every draw addressable: re-running a batch,
changing chunk sizes, adding workers, or enlarging a summation cutoff
reproduces earlier values bit for bit instead of resampling them.

Three mirrored implementations must stay in sync: the pure-Python functions
here (scalar code paths), the ``*_array`` variants (vectorized numpy paths,
uint64 arrays wrap silently), and ``_kernels`` (numba).  ``tests/test_rng.py``
pins their bitwise equality.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MASK64 = (1 << 64) - 1

GOLDEN = 0x9E3779B97F4A7C15
MIX_A = 0xBF58476D1CE4E5B9
MIX_B = 0x94D049BB133111EB
_INIT = 0x8E51ECF3E5BB9818

# reserved (k1, k2) address for the Gaussian tail draw of the limit sampler;
# k1 = -1 can never collide with a prime index (those have k1 >= 0)
TAIL_INDEX = (-1, -1)

_TO_UNIT = 2.0 ** -53


def mix64(z: int) -> int:
    """SplitMix64 finalizer: a bijective 64-bit avalanche."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * MIX_A) & MASK64
    z = ((z ^ (z >> 27)) * MIX_B) & MASK64
    return z ^ (z >> 31)


def stream64(key: int, i: int) -> int:
    """i-th raw 64-bit output of the stream rooted at key (i >= 0)."""
    return mix64((key + (i + 1) * GOLDEN) & MASK64)


def uniform(key: int, i: int = 0) -> float:
    """i-th uniform draw in [0, 1) of the stream rooted at key."""
    return (stream64(key, i) >> 11) * _TO_UNIT


def normal(key: int, i: int = 0) -> float:
    """i-th standard normal draw (Box-Muller; consumes counters 2i, 2i+1)."""
    u1 = uniform(key, 2 * i)
    u2 = uniform(key, 2 * i + 1)
    # 1 - u1 in (0, 1] keeps the log finite
    return np.sqrt(-2.0 * np.log1p(-u1)) * np.cos(2.0 * np.pi * u2)


def index_key(key: int, a: int, b: int = 0) -> int:
    """Key of the sub-stream addressed by the integer pair (a, b).

    Negative integers are folded in by their two's complement.  The two
    coordinates enter asymmetrically (xor then add): combining both by
    xor would send (a, b) and (-a, -b) to the same key whenever a and b
    share their lowest set bit, because x ^ -x depends only on that bit.
    This is the one canonical pair-keying rule; the numba kernels
    replicate it exactly.
    """
    return mix64(((key ^ ((a & MASK64) * MIX_A & MASK64))
                  + ((b & MASK64) * MIX_B)) & MASK64)


def derive_key(*parts: int) -> int:
    """Fold an integer tuple into a 64-bit root key (order sensitive)."""
    h = _INIT
    for p in parts:
        h = mix64((h ^ ((p & MASK64) * MIX_A & MASK64)) + GOLDEN)
    return h


# ---------------------------------------------------------------------------
# vectorized mirrors (numpy uint64 arrays wrap silently on overflow)

_U_GOLDEN = np.uint64(GOLDEN)
_U_MIX_A = np.uint64(MIX_A)
_U_MIX_B = np.uint64(MIX_B)


def mix64_array(z: np.ndarray) -> np.ndarray:
    z = z.astype(np.uint64, copy=True)
    z ^= z >> np.uint64(30)
    z *= _U_MIX_A
    z ^= z >> np.uint64(27)
    z *= _U_MIX_B
    z ^= z >> np.uint64(31)
    return z


def _as_u64(values) -> np.ndarray:
    arr = np.asarray(values)
    if arr.dtype == np.uint64:
        return arr
    return arr.astype(np.int64).view(np.uint64)


def stream64_array(key: int, counters) -> np.ndarray:
    c = _as_u64(counters)
    return mix64_array(np.uint64(key & MASK64) + (c + np.uint64(1)) * _U_GOLDEN)


def uniform_array(key: int, counters) -> np.ndarray:
    return (stream64_array(key, counters) >> np.uint64(11)) * _TO_UNIT


def index_key_array(key: int, a, b) -> np.ndarray:
    ua = _as_u64(a) * _U_MIX_A
    ub = _as_u64(b) * _U_MIX_B
    return mix64_array((np.uint64(key & MASK64) ^ ua) + ub)


def uniform_from_keys(keys: np.ndarray, i: int = 0) -> np.ndarray:
    """Vectorized ``uniform(key, i)`` over an array of keys."""
    k = _as_u64(keys) + np.uint64((i + 1) * GOLDEN & MASK64)
    return (mix64_array(k) >> np.uint64(11)) * _TO_UNIT


def index_key_from_keys(keys, a: int, b: int = 0) -> np.ndarray:
    """Vectorized ``index_key(key, a, b)`` over an array of keys."""
    ua = np.uint64((a & MASK64) * MIX_A & MASK64)
    ub = np.uint64((b & MASK64) * MIX_B & MASK64)
    return mix64_array((_as_u64(keys) ^ ua) + ub)


@dataclass(frozen=True)
class Stream:
    """Handle on one addressable random stream."""

    key: int

    def uniform(self, i: int = 0) -> float:
        return uniform(self.key, i)

    def normal(self, i: int = 0) -> float:
        return normal(self.key, i)

    def child(self, a: int, b: int = 0) -> "Stream":
        return Stream(index_key(self.key, a, b))

    def uniforms(self, n: int, start: int = 0) -> np.ndarray:
        return uniform_array(self.key, np.arange(start, start + n, dtype=np.int64))
