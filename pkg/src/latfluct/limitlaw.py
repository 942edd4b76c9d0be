"""Sampling the limit law of normalized disk-counting errors.

Over Haar-random unimodular lattices, the normalized counting error
R(t) / sqrt(t) converges in law to

    S = (2 / pi) sum_{k in Pi} phi(theta_k) / ||k1 e1 + k2 e2||^(3/2)

with independent uniform phases theta_k, one per prime index in the half
set Pi.  This module draws truncated versions of S: the sum is cut at
norm <= A and the discarded tail is either dropped ("truncate") or
replaced by an independent centered Gaussian of the matching variance

    sigma_A^2 = (4 / pi^2) * (zeta(3) / 2) * pi / (zeta(2) A)

("gaussian_surrogate"): Var phi(U) = zeta(3)/2, and pi / (zeta(2) A) is
the expected sum of ||v||^(-3) over prime vectors of the half set beyond
norm A.

Addressing: draw i uses the lattice sample_haar(rng, i) and the weight
stream index_key(derive_key(TAG, seed, stream_index), i, 0).  The weight
of prime index (k1, k2) comes from that stream's child (k1, k2), the tail
Gaussian from child (-1, -1).  Weights are therefore attached to lattice
coordinates, not to enumeration positions: enlarging the cutoff refines a
draw without resampling weights already consumed, so sums at nested
cutoffs are partial sums of one another (convergence_probe exploits this,
and its outputs match weighted_siegel bit for bit at every cutoff).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ContractViolation
from .haar import SamplerConfig, sample_frames, sample_haar
from .lattice import FrameBatch, ReducedFrame, _prime_entries, enumerate_prime_indices, gauss_reduce
from .rng import (Stream, derive_key, index_key, index_key_array,
                  index_key_from_keys, uniform_from_keys)
from .spectral import PhiEvaluator, default_evaluator, kernel_phi_table, phi, phi_many
from .stats import EmpiricalDistribution

_DOM_LIMIT = 0x4C494D54

_ZETA2 = math.pi * math.pi / 6.0
_ZETA3 = 1.2020569031595942854

# sup_theta |phi(theta)| <= sum m^(-3/2) = zeta(3/2)
_PHI_BOUND = 2.6123753486854883


@dataclass(frozen=True)
class WeightDistribution:
    """Weight law attached to prime indices in the truncated sum.

    sampler draws one weight from a Stream; batch_sampler, when present,
    maps an array of stream keys to the identical weights (bit for bit).
    kernel_mode >= 0 selects a compiled evaluation path for batch draws.
    """

    name: str
    sampler: Callable[[Stream], float]
    is_symmetric: bool
    support_bound: float
    batch_sampler: Callable[[np.ndarray], np.ndarray] | None = None
    kernel_mode: int = -1

    def __post_init__(self):
        if not (self.support_bound > 0.0 and math.isfinite(self.support_bound)):
            raise ContractViolation("support_bound must be positive and finite")


def phi_weights(ev: PhiEvaluator | None = None) -> WeightDistribution:
    """The limit law's weights z = phi(U), U uniform on [0, 1)."""
    evaluator = ev if ev is not None else default_evaluator()

    def _sample(stream: Stream) -> float:
        return phi(stream.uniform(0), evaluator)

    def _sample_batch(keys: np.ndarray) -> np.ndarray:
        return phi_many(uniform_from_keys(keys, 0), evaluator)

    return WeightDistribution(name="phi", sampler=_sample, is_symmetric=False,
                              support_bound=_PHI_BOUND,
                              batch_sampler=_sample_batch, kernel_mode=0)


def rademacher_weights() -> WeightDistribution:
    """Unit signs; Var(weighted sum) = sum ||v||^(-3) makes moments exact."""

    def _sample(stream: Stream) -> float:
        return 1.0 if stream.uniform(0) < 0.5 else -1.0

    def _sample_batch(keys: np.ndarray) -> np.ndarray:
        return np.where(uniform_from_keys(keys, 0) < 0.5, 1.0, -1.0)

    return WeightDistribution(name="rademacher", sampler=_sample,
                              is_symmetric=True, support_bound=1.0,
                              batch_sampler=_sample_batch, kernel_mode=1)


@dataclass(frozen=True)
class LimitConfig:
    """Configuration of the truncated limit-law sampler."""

    rng: SamplerConfig
    cutoff_A: float = 100.0
    tail_mode: str = "gaussian_surrogate"
    phi: PhiEvaluator | None = None

    def __post_init__(self):
        if not (self.cutoff_A >= 1.0 and math.isfinite(self.cutoff_A)):
            raise ContractViolation("cutoff_A must be finite and >= 1")
        if self.tail_mode not in ("truncate", "gaussian_surrogate"):
            raise ContractViolation(
                f"tail_mode must be 'truncate' or 'gaussian_surrogate', got {self.tail_mode!r}")


def tail_sigma(cutoff: float) -> float:
    """Standard deviation of the surrogate for the tail beyond the cutoff."""
    if not (cutoff >= 1.0 and math.isfinite(cutoff)):
        raise ContractViolation("cutoff must be finite and >= 1")
    return math.sqrt((4.0 / math.pi ** 2) * (_ZETA3 / 2.0)
                     * math.pi / (_ZETA2 * cutoff))


def weighted_siegel(frame: ReducedFrame, dist: WeightDistribution,
                    cutoff: float, rng: Stream) -> float:
    """sum over Pi of z_k / ||k1 e1 + k2 e2||^(3/2) up to norm <= cutoff.

    Weights come from rng.child(k1, k2); accumulation is a strict left
    fold in enumeration order (norm ascending, then (k1, k2)).
    """
    bound = dist.support_bound * (1.0 + 1e-12)
    total = 0.0
    for k, norm in enumerate_prime_indices(frame, cutoff):
        z = dist.sampler(rng.child(k.k1, k.k2))
        if not (abs(z) <= bound):
            raise ContractViolation(
                f"weight {z!r} outside declared support bound {dist.support_bound!r}")
        total += z / (norm * math.sqrt(norm))
    return total


def convergence_probe(frame: ReducedFrame, dist: WeightDistribution,
                      schedule, rng: Stream) -> list:
    """(cutoff, weighted_siegel at that cutoff) along an increasing schedule.

    One enumeration at the largest cutoff is re-filtered per schedule
    point by the exact membership predicate, and each value reproduces an
    independent weighted_siegel call at that cutoff bit for bit.
    """
    sched = [float(a) for a in schedule]
    if not sched:
        raise ContractViolation("schedule must be nonempty")
    for a, b in zip(sched, sched[1:]):
        if b <= a:
            raise ContractViolation("schedule must be increasing")
    if not (sched[0] >= 0.0 and math.isfinite(sched[-1])):
        raise ContractViolation("schedule cutoffs must be finite and >= 0")

    k1a, k2a, norms, qs = _prime_entries(frame, sched[-1])
    if dist.batch_sampler is not None and len(k1a):
        zs = dist.batch_sampler(index_key_array(rng.key, k1a, k2a))
    else:
        zs = np.array([dist.sampler(rng.child(int(a), int(b)))
                       for a, b in zip(k1a, k2a)])
    bound = dist.support_bound * (1.0 + 1e-12)
    if len(zs) and not np.all(np.abs(zs) <= bound):
        raise ContractViolation("weight outside declared support bound")

    out = []
    for a in sched:
        a2 = a * a
        total = 0.0
        for i in range(len(k1a)):
            if qs[i] <= a2 * (1.0 + 1e-15):
                total += zs[i] / (norms[i] * math.sqrt(norms[i]))
        out.append((a, total))
    return out


def draw_stream(cfg: LimitConfig, index: int) -> Stream:
    """Weight stream of draw ``index`` (the batch path uses the same keys)."""
    root = derive_key(_DOM_LIMIT, cfg.rng.master_seed, cfg.rng.stream_index)
    return Stream(index_key(root, index, 0))


def sample_limit(frame: ReducedFrame, cfg: LimitConfig, rng: Stream) -> float:
    """One draw of the truncated limit sum conditioned on the given lattice.

    Equals (2/pi) * weighted_siegel with the phi(U) weights; under
    gaussian_surrogate an independent tail Gaussian from the stream's
    child (-1, -1) is added.
    """
    dist = phi_weights(cfg.phi)
    s = (2.0 / math.pi) * weighted_siegel(frame, dist, cfg.cutoff_A, rng)
    if cfg.tail_mode == "gaussian_surrogate":
        s += tail_sigma(cfg.cutoff_A) * rng.child(-1, -1).normal(0)
    return s


def weighted_sums_batch(frames: FrameBatch, dist: WeightDistribution,
                        cutoff: float, keys: np.ndarray) -> np.ndarray:
    """Compiled batch of weighted_siegel values (one stream key per row).

    Term membership and weight addressing match the scalar path exactly;
    the sums differ from scalar folds only by summation order and, for the
    phi law, by the float32 bulk table (absolute error ~3e-7 per weight).
    """
    if dist.kernel_mode < 0:
        raise ContractViolation(f"distribution {dist.name!r} has no compiled path")
    from ._kernels import COPRIME_CAP, coprime_table, limit_draws_kernel

    ev = default_evaluator()
    tab32, win = kernel_phi_table()
    span = int(math.ceil(1.075 * cutoff)) + 2
    offsets, table = coprime_table(span)
    out = np.zeros(len(frames))
    limit_draws_kernel(np.ascontiguousarray(frames.n1),
                       np.ascontiguousarray(frames.n2),
                       np.ascontiguousarray(frames.X2),
                       np.ascontiguousarray(keys),
                       float(cutoff), dist.kernel_mode,
                       offsets, table, COPRIME_CAP,
                       tab32, win, ev.even_coef, ev.odd_coef, out)
    return out


def limit_values(lattice_source: SamplerConfig, n: int, cfg: LimitConfig,
                 start: int = 0) -> np.ndarray:
    """n draws of the truncated law with indices start .. start + n - 1.

    Draw i pairs the lattice sample_haar(lattice_source, i) with the
    weight stream draw_stream(cfg, i); the batch output equals the scalar
    sample_limit path up to summation order (same keys, same weights).
    """
    if n < 1:
        raise ContractViolation("n must be >= 1")
    frames = sample_frames(lattice_source, n, start)
    root = derive_key(_DOM_LIMIT, cfg.rng.master_seed, cfg.rng.stream_index)
    idx = np.arange(start, start + n, dtype=np.int64)
    keys = index_key_array(root, idx, np.zeros(n, dtype=np.int64))
    out = (2.0 / math.pi) * weighted_sums_batch(frames, phi_weights(cfg.phi),
                                                cfg.cutoff_A, keys)
    if cfg.tail_mode == "gaussian_surrogate":
        tkeys = index_key_from_keys(keys, -1, -1)
        u1 = uniform_from_keys(tkeys, 0)
        u2 = uniform_from_keys(tkeys, 1)
        out += tail_sigma(cfg.cutoff_A) * (np.sqrt(-2.0 * np.log1p(-u1))
                                           * np.cos(2.0 * np.pi * u2))
    return out


def sample_limit_batch(lattice_source: SamplerConfig, n: int, cfg: LimitConfig,
                       start: int = 0) -> EmpiricalDistribution:
    """Empirical distribution of n truncated-law draws."""
    return EmpiricalDistribution(limit_values(lattice_source, n, cfg, start))
