"""Statistical primitives for the counting-error experiments.

Everything here is deterministic given its inputs; the one randomized
routine (bootstrap resampling) draws its indices from an explicit keyed
stream.  The two-sample Kolmogorov-Smirnov distance and the Hill tail
estimator are hand-rolled because the experiments pin their exact
conventions (right-continuous empirical CDFs evaluated at both samples'
jump points; Hill on the top fraction with the (k+1)-th order statistic
as threshold).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ContractViolation
from .rng import Stream, uniform_array


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Sorted sample with basic summary functionals."""

    samples: np.ndarray

    def __post_init__(self):
        arr = np.sort(np.asarray(self.samples, dtype=float).ravel())
        if not np.all(np.isfinite(arr)):
            raise ContractViolation("samples must be finite")
        object.__setattr__(self, "samples", arr)

    @property
    def n(self) -> int:
        return int(self.samples.size)

    def _need(self, k: int, what: str) -> None:
        if self.n < k:
            raise ContractViolation(f"{what} needs >= {k} samples (got {self.n})")

    def cdf(self, x):
        """Right-continuous empirical CDF, vectorized over x."""
        self._need(1, "cdf")
        pos = np.searchsorted(self.samples, np.asarray(x, dtype=float),
                              side="right")
        out = pos / self.n
        return float(out) if np.isscalar(x) else out

    def mean(self) -> float:
        self._need(1, "mean")
        return float(np.mean(self.samples))

    def stderr(self) -> float:
        """Standard error of the mean (ddof = 1)."""
        if self.n < 2:
            raise ContractViolation("stderr needs >= 2 samples")
        return float(np.std(self.samples, ddof=1) / math.sqrt(self.n))

    def moment(self, p: float) -> float:
        self._need(1, "moment")
        return float(np.mean(self.samples ** p))

    def abs_moment(self, p: float) -> float:
        self._need(1, "abs_moment")
        return float(np.mean(np.abs(self.samples) ** p))

    def quantile(self, q):
        self._need(1, "quantile")
        return np.quantile(self.samples, q)


def _as_sorted(values) -> np.ndarray:
    if isinstance(values, EmpiricalDistribution):
        arr = values.samples
    else:
        arr = np.sort(np.asarray(values, dtype=float).ravel())
    if arr.size < 1:
        raise ContractViolation("need >= 1 sample")
    return arr


def ks_distance(a, b) -> float:
    """Two-sample Kolmogorov-Smirnov statistic sup_x |F_a(x) - F_b(x)|."""
    xa = _as_sorted(a)
    xb = _as_sorted(b)
    grid = np.concatenate([xa, xb])
    fa = np.searchsorted(xa, grid, side="right") / xa.size
    fb = np.searchsorted(xb, grid, side="right") / xb.size
    return float(np.max(np.abs(fa - fb)))


def hill_tail_index(values, top_fraction: float = 0.005) -> float:
    """Hill estimator of the tail exponent of |samples| from the top fraction.

    With descending order statistics X_(1) >= ... >= X_(k+1) of the
    absolute values, alpha_hat = k / sum_{i <= k} log(X_(i) / X_(k+1)).
    """
    x = np.sort(np.abs(_as_sorted(values)))
    if not (0.0 < top_fraction <= 0.1):
        raise ContractViolation("top_fraction must be in (0, 0.1]")
    k = int(math.floor(x.size * top_fraction))
    if k < 100:
        raise ContractViolation(
            f"tail too small: {k} points (need >= 100); enlarge the sample")
    top = x[-(k + 1):]
    threshold = top[0]
    if not (threshold > 0.0):
        raise ContractViolation("tail threshold must be positive")
    logs = np.log(top[1:] / threshold)
    denom = float(np.sum(logs))
    if not (denom > 0.0):
        raise ContractViolation("degenerate (constant) tail")
    return k / denom


def bootstrap_ci(values, statistic: Callable[[np.ndarray], float],
                 stream: Stream, n_boot: int = 400,
                 level: float = 0.95) -> tuple[float, float]:
    """Percentile bootstrap interval for statistic(values).

    Resampling indices come from the keyed stream (counters r*n .. r*n+n-1
    for replicate r), so the interval is reproducible and independent of
    chunking.
    """
    x = np.asarray(values, dtype=float).ravel()
    n = x.size
    if n < 2:
        raise ContractViolation("bootstrap needs >= 2 samples")
    if n_boot < 10:
        raise ContractViolation("n_boot must be >= 10")
    if not (0.0 < level < 1.0):
        raise ContractViolation("level must be in (0, 1)")
    reps = np.empty(n_boot)
    for r in range(n_boot):
        u = uniform_array(stream.key, np.arange(r * n, (r + 1) * n, dtype=np.int64))
        idx = (u * n).astype(np.int64)
        reps[r] = statistic(x[idx])
    lo = (1.0 - level) / 2.0
    return (float(np.quantile(reps, lo)), float(np.quantile(reps, 1.0 - lo)))


def chi_square_uniform(values, bins: int = 20) -> tuple[float, float]:
    """Chi-square statistic and p-value against Uniform[0, 1)."""
    from scipy.stats import chi2

    v = np.asarray(values, dtype=float).ravel()
    if v.size < bins * 5:
        raise ContractViolation(f"need >= {bins * 5} values for {bins} bins")
    if np.any(v < 0.0) or np.any(v >= 1.0):
        raise ContractViolation("values must lie in [0, 1)")
    idx = np.minimum((v * bins).astype(np.int64), bins - 1)
    counts = np.bincount(idx, minlength=bins)
    expected = v.size / bins
    stat = float(np.sum((counts - expected) ** 2) / expected)
    return stat, float(chi2.sf(stat, bins - 1))
