"""Reproducible sampling from the Haar probability measure on unimodular
planar lattices, and from bounded-density reweightings of it.

Parametrization.  Every unimodular lattice is R(omega) * N(x, y) * Z^2 with

    N(x, y) = [[1/sqrt(y), x/sqrt(y)], [0, sqrt(y)]],

omega uniform on the circle, and (x, y) in the hyperbolic fundamental domain
F = {|x| <= 1/2, x^2 + y^2 >= 1} carrying the normalized measure
(3/pi) dx dy / y^2.  The (x, y) pair is drawn by rejection from the strip
{|x| <= 1/2, y >= sqrt(3)/2} with y-density proportional to 1/y^2 (inverse
CDF y = (sqrt(3)/2)/(1-u)); the acceptance rate is pi*sqrt(3)/6 ~ 0.907.
The rotation is drawn as a uniform point on the circle by rejection from the
square onto the unit disk, which needs only +,-,*,/ and sqrt, so scalar and
vectorized paths agree bit for bit on any IEEE platform.

Reproducibility.  Sample i of config (master_seed, stream_index) reads only
sub-streams of a key derived from (domain tag, master_seed, stream_index, i);
batches of any size, produced in any chunking, yield the same bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ContractViolation, InvariantViolation
from .lattice import Basis2, FrameBatch, reduce_batch
from .rng import derive_key, index_key, index_key_array, uniform, uniform_from_keys

MAX_REJECTION = 1_000_000

_DOM_HAAR = 0x48414152  # field separator tags for key derivation
_DOM_WEIGHTED = 0x57454947

_Y_FLOOR = math.sqrt(3.0) / 2.0
# rejecting radii below 1e-6 leaves the rotation angle exactly uniform
# (the excluded region is radially symmetric) and keeps a/r, b/r accurate
_R2_MIN = 1e-12


@dataclass(frozen=True)
class SamplerConfig:
    """Root of a reproducible sample sequence."""

    master_seed: int
    stream_index: int = 0

    def __post_init__(self):
        for name in ("master_seed", "stream_index"):
            v = getattr(self, name)
            if not (0 <= v < 1 << 64):
                raise InvariantViolation(f"{name} must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class DensitySpec:
    """A bounded nonnegative density against the Haar measure."""

    density: Callable[[Basis2], float]
    bound: float

    def __post_init__(self):
        if not (self.bound > 0.0 and math.isfinite(self.bound)):
            raise InvariantViolation("density bound must be finite and positive")


def _sample_key(config: SamplerConfig, domain: int, index: int) -> int:
    base = derive_key(domain, config.master_seed, config.stream_index)
    return index_key(base, index, 0)


def _domain_point(key: int) -> tuple[float, float]:
    """One (x, y) draw in the fundamental domain (rejection, counters 2j, 2j+1)."""
    for j in range(MAX_REJECTION):
        y = _Y_FLOOR / (1.0 - uniform(key, 2 * j))
        x = uniform(key, 2 * j + 1) - 0.5
        if x * x + y * y >= 1.0:
            return x, y
    raise InvariantViolation("fundamental-domain rejection loop exceeded the cap")


def _rotation_point(key: int) -> tuple[float, float]:
    """One uniform (cos, sin) pair on the unit circle (rejection, trig-free)."""
    for j in range(MAX_REJECTION):
        a = 2.0 * uniform(key, 2 * j) - 1.0
        b = 2.0 * uniform(key, 2 * j + 1) - 1.0
        r2 = a * a + b * b
        if _R2_MIN < r2 <= 1.0:
            r = math.sqrt(r2)
            return a / r, b / r
        # fall through: outside the disk (or degenerately close to 0)
    raise InvariantViolation("rotation rejection loop exceeded the cap")


def _assemble(c: float, s: float, x: float, y: float):
    """Entries of R * N(x, y); the batch path repeats these expressions."""
    ry = np.sqrt(y)
    inv = 1.0 / ry
    xi = x * inv
    b11 = c * inv
    b21 = s * inv
    b12 = c * xi - s * ry
    b22 = s * xi + c * ry
    return float(b11), float(b12), float(b21), float(b22)


def sample_haar(config: SamplerConfig, index: int = 0) -> Basis2:
    """The index-th Haar-distributed unimodular basis of the configured stream."""
    skey = _sample_key(config, _DOM_HAAR, index)
    x, y = _domain_point(index_key(skey, 1, 0))
    c, s = _rotation_point(index_key(skey, 2, 0))
    b11, b12, b21, b22 = _assemble(c, s, x, y)
    return Basis2(b11=b11, b12=b12, b21=b21, b22=b22)


def _domain_points_batch(keys: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = len(keys)
    x = np.empty(n)
    y = np.empty(n)
    pending = np.arange(n)
    for j in range(MAX_REJECTION):
        k = keys[pending]
        yj = _Y_FLOOR / (1.0 - uniform_from_keys(k, 2 * j))
        xj = uniform_from_keys(k, 2 * j + 1) - 0.5
        ok = xj * xj + yj * yj >= 1.0
        idx = pending[ok]
        x[idx] = xj[ok]
        y[idx] = yj[ok]
        pending = pending[~ok]
        if len(pending) == 0:
            return x, y
    raise InvariantViolation("fundamental-domain rejection loop exceeded the cap")


def _rotation_points_batch(keys: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = len(keys)
    c = np.empty(n)
    s = np.empty(n)
    pending = np.arange(n)
    for j in range(MAX_REJECTION):
        k = keys[pending]
        a = 2.0 * uniform_from_keys(k, 2 * j) - 1.0
        b = 2.0 * uniform_from_keys(k, 2 * j + 1) - 1.0
        r2 = a * a + b * b
        ok = (r2 > _R2_MIN) & (r2 <= 1.0)
        r = np.sqrt(r2[ok])
        idx = pending[ok]
        c[idx] = a[ok] / r
        s[idx] = b[ok] / r
        pending = pending[~ok]
        if len(pending) == 0:
            return c, s
    raise InvariantViolation("rotation rejection loop exceeded the cap")


def sample_haar_batch(config: SamplerConfig, n: int, start: int = 0) -> np.ndarray:
    """Stack of n Haar bases as an (n, 2, 2) array.

    Bitwise identical to [sample_haar(config, start + i) for i in range(n)];
    the determinism test pins this.
    """
    if n < 0:
        raise ContractViolation("n must be >= 0")
    base = derive_key(_DOM_HAAR, config.master_seed, config.stream_index)
    idx = np.arange(start, start + n, dtype=np.int64)
    skeys = index_key_array(base, idx, np.zeros(n, dtype=np.int64))
    zeros = np.zeros(n, dtype=np.int64)
    x, y = _domain_points_batch(index_key_array(skeys, np.full(n, 1, dtype=np.int64), zeros))
    c, s = _rotation_points_batch(index_key_array(skeys, np.full(n, 2, dtype=np.int64), zeros))

    ry = np.sqrt(y)
    inv = 1.0 / ry
    xi = x * inv
    out = np.empty((n, 2, 2))
    out[:, 0, 0] = c * inv
    out[:, 1, 0] = s * inv
    out[:, 0, 1] = c * xi - s * ry
    out[:, 1, 1] = s * xi + c * ry

    det = out[:, 0, 0] * out[:, 1, 1] - out[:, 0, 1] * out[:, 1, 0]
    if n and np.max(np.abs(det - 1.0)) > 1e-12:
        raise InvariantViolation("batch sampler produced a non-unimodular basis")
    return out


def sample_frames(config: SamplerConfig, n: int, start: int = 0) -> FrameBatch:
    """Reduced frames of n Haar lattices (batch convenience)."""
    return reduce_batch(sample_haar_batch(config, n, start))


def _accept_weight(spec: DensitySpec, basis: Basis2) -> float:
    val = float(spec.density(basis))
    if not math.isfinite(val) or val < 0.0:
        raise ContractViolation("density returned a negative or non-finite value")
    if val > spec.bound * (1.0 + 1e-12):
        raise ContractViolation("density exceeded its declared bound")
    return val


def sample_weighted_detail(config: SamplerConfig, spec: DensitySpec,
                           index: int = 0) -> tuple[Basis2, int]:
    """One draw from density * Haar plus the number of proposals consumed."""
    wkey = _sample_key(config, _DOM_WEIGHTED, index)
    for j in range(MAX_REJECTION):
        ckey = index_key(wkey, j, 1)
        x, y = _domain_point(index_key(ckey, 1, 0))
        c, s = _rotation_point(index_key(ckey, 2, 0))
        b11, b12, b21, b22 = _assemble(c, s, x, y)
        cand = Basis2(b11=b11, b12=b12, b21=b21, b22=b22)
        val = _accept_weight(spec, cand)
        if uniform(index_key(wkey, j, 2), 0) * spec.bound < val:
            return cand, j + 1
    raise InvariantViolation("weighted rejection loop exceeded the cap "
                             "(density mass too small or zero)")


def sample_weighted(config: SamplerConfig, spec: DensitySpec, index: int = 0) -> Basis2:
    """One lattice distributed as density(L) dHaar(L), normalized."""
    return sample_weighted_detail(config, spec, index)[0]
