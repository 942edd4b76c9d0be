"""Experiment drivers: Monte Carlo checks behind the command line interface.

Each driver is a pure function of its parameters and a 64-bit seed.  It
draws lattices from seeded streams, computes the statistics named in its
docstring, and returns either an EmpiricalDistribution of raw samples or
an ExperimentReport bundling parameters, statistics, and pass/fail
verdicts.  Reports are reproducible: rerunning with the same parameters
and seed gives bitwise-identical statistics (runtime_seconds, a wall
clock measurement, is the one field excluded from that guarantee).

The convergence statements probed here carry no rates, so every
threshold is an artifact-level tolerance sized to roughly three standard
deviations of Monte Carlo noise at the stated sample counts; the
defaults record those choices.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from ._kernels import prime_count_kernel
from .counting import error_samples_batch
from .errors import ContractViolation
from .haar import SamplerConfig, sample_frames, sample_haar_batch
from .lattice import FrameBatch, PrimeIndex, dual_stack, reduce_batch
from .limitlaw import LimitConfig, limit_values, sample_limit_batch
from .spectral import default_evaluator, s_a_prime
from .stats import (EmpiricalDistribution, chi_square_uniform,
                    hill_tail_index, ks_distance)

_ZETA2 = math.pi * math.pi / 6.0


@dataclass(frozen=True)
class ExperimentReport:
    """Outcome of one experiment run.

    params echoes every input (seeds, sizes, tolerances); stats maps
    statistic names to finite numbers; passed maps criterion names to
    verdicts.  Everything except runtime_seconds is a pure function of
    params.
    """

    experiment: str
    params: dict
    stats: dict
    passed: dict
    runtime_seconds: float

    def __post_init__(self):
        if not self.experiment:
            raise ContractViolation("experiment name must be nonempty")
        for name, value in self.stats.items():
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ContractViolation(f"stat {name!r} must be a number")
            if not math.isfinite(float(value)):
                raise ContractViolation(f"stat {name!r} must be finite")
        for name, value in self.passed.items():
            if not isinstance(value, bool):
                raise ContractViolation(f"criterion {name!r} must be a bool")

    @property
    def all_passed(self) -> bool:
        return all(self.passed.values())


def _config(seed: int, stream_index: int) -> SamplerConfig:
    return SamplerConfig(master_seed=seed, stream_index=stream_index)


def siegel_mean_check(n: int, radius_inner: float, radius_outer: float,
                      seed: int, stream_index: int = 0,
                      rel_tol: float = 0.015) -> ExperimentReport:
    """Mean count of prime vectors in an annulus vs (1/zeta(2)) * area.

    For f the indicator of the annulus, the lattice-average of
    sum_{v prime} f(v) equals (6/pi^2) * pi * (r_out^2 - r_in^2); the
    count includes both signs of each vector (twice the half index set).
    The empirical second moment is reported next to the integrals int f
    and (int f)^2 entering its theoretical bound; only the mean carries a
    pass threshold.  A degenerate annulus (equal radii) must count zero.
    """
    start = time.perf_counter()
    if n < 1000:
        raise ContractViolation("n must be >= 1000")
    if not (0.0 <= radius_inner <= radius_outer and math.isfinite(radius_outer)):
        raise ContractViolation("need 0 <= radius_inner <= radius_outer < inf")

    frames = sample_frames(_config(seed, stream_index), n)
    n1 = np.ascontiguousarray(frames.n1)
    n2 = np.ascontiguousarray(frames.n2)
    x2 = np.ascontiguousarray(frames.X2)
    counts = np.zeros((2, n), dtype=np.int64)
    for row, radius in enumerate((radius_inner, radius_outer)):
        if radius > 0.0:
            prime_count_kernel(n1, n2, x2, float(radius), counts[row])
    in_annulus = 2.0 * (counts[1] - counts[0])

    area = math.pi * (radius_outer ** 2 - radius_inner ** 2)
    expected = area / _ZETA2
    mean = float(np.mean(in_annulus))
    second = float(np.mean(in_annulus ** 2))
    if expected > 0.0:
        rel_err = abs(mean - expected) / expected
        ok = rel_err <= rel_tol
    else:
        rel_err = 0.0 if mean == 0.0 else math.inf
        ok = mean == 0.0
    if not math.isfinite(rel_err):
        rel_err = float(np.finfo(float).max)

    return ExperimentReport(
        experiment="siegel_mean_check",
        params={"n": n, "radius_inner": radius_inner,
                "radius_outer": radius_outer, "seed": seed,
                "stream_index": stream_index, "rel_tol": rel_tol},
        stats={"mean_count": mean, "expected_mean": expected,
               "relative_error": rel_err, "second_moment": second,
               "integral_f": area, "integral_f_squared": area,
               "integral_f_total_squared": area * area},
        passed={"mean_within_tolerance": ok},
        runtime_seconds=time.perf_counter() - start,
    )


def error_law_experiment(n_lattices: int, t: float, seed: int,
                         stream_index: int = 0) -> EmpiricalDistribution:
    """Samples of the normalized counting error R(t)/sqrt(t) over Haar lattices."""
    if n_lattices < 1000:
        raise ContractViolation("n_lattices must be >= 1000")
    if not (t >= 10.0):
        raise ContractViolation("t must be >= 10 (asymptotic regime)")
    frames = sample_frames(_config(seed, stream_index), n_lattices)
    _, _, normalized = error_samples_batch(frames, t)
    return EmpiricalDistribution(normalized)


def delta_experiment(n: int, t: float, cutoff: float, alpha: float, seed: int,
                     stream_index: int = 0) -> ExperimentReport:
    """Tail frequency of Delta = |R(t)/sqrt(t) - S_{A,prime}| against alpha.

    The truncated spectral sum is evaluated on the dual of each sampled
    lattice while the disk count runs on the lattice itself.  The first
    moment bound gives P(Delta >= alpha) <= alpha, checked with a three
    sigma binomial allowance on top (alpha caps at 1, where the bound is
    vacuous).
    """
    start = time.perf_counter()
    if n < 1000:
        raise ContractViolation("n must be >= 1000")
    if not (alpha > 0.0):
        raise ContractViolation("alpha must be > 0")

    bases = sample_haar_batch(_config(seed, stream_index), n)
    frames = reduce_batch(bases)
    dual_frames = reduce_batch(dual_stack(bases))
    _, _, normalized = error_samples_batch(frames, t)
    ev = default_evaluator()
    spectral = np.array([s_a_prime(dual_frames.frame(i), t, cutoff, ev)
                         for i in range(n)])
    delta = np.abs(normalized - spectral)

    freq = float(np.mean(delta >= alpha))
    bound = min(alpha, 1.0)
    slack = 3.0 * math.sqrt(bound * (1.0 - bound) / n)

    return ExperimentReport(
        experiment="delta_experiment",
        params={"n": n, "t": t, "cutoff": cutoff, "alpha": alpha,
                "seed": seed, "stream_index": stream_index},
        stats={"exceed_frequency": freq, "markov_bound": bound,
               "binomial_slack": slack,
               "median_delta": float(np.median(delta)),
               "mean_delta": float(np.mean(delta)),
               "max_delta": float(np.max(delta))},
        passed={"tail_bound_holds": freq <= bound + slack},
        runtime_seconds=time.perf_counter() - start,
    )


def _k_label(k) -> str:
    return f"{int(k.k1)}_{int(k.k2)}"


def phase_statistics(thetas, psi=None, chi_bins: int = 20,
                     p_floor: float = 1e-3, modulus_tol: float = 0.02):
    """Uniformity and independence statistics for phase samples.

    thetas is a list of (PrimeIndex, array of phases in [0, 1)); psi is an
    optional 0/1 conditioning array of the same length.  Returns (stats,
    passed): per index a chi-square uniformity p-value and the modulus of
    the empirical E e(theta); per pair the modulus of E e(theta - theta');
    per index the coupling |E psi e(theta) - E psi E e(theta)|.
    """
    stats: dict = {}
    passed: dict = {}
    labels = []
    phases = []
    for k, th in thetas:
        th = np.asarray(th, dtype=float).ravel()
        if th.size < 1 or not np.all((th >= 0.0) & (th < 1.0)):
            raise ContractViolation("phases must lie in [0, 1)")
        label = _k_label(k)
        if label in labels:
            raise ContractViolation(f"duplicate index {label}")
        unit = np.exp((2j * np.pi) * th)
        labels.append(label)
        phases.append(unit)
        chi_stat, p_value = chi_square_uniform(th, chi_bins)
        modulus = float(np.abs(np.mean(unit)))
        stats[f"chi2_{label}"] = chi_stat
        stats[f"chi2_p_{label}"] = p_value
        stats[f"modulus_{label}"] = modulus
        passed[f"uniform_{label}"] = p_value > p_floor
        passed[f"modulus_{label}"] = modulus <= modulus_tol
    for i in range(len(labels)):
        for j in range(i + 1, len(labels)):
            m = float(np.abs(np.mean(phases[i] * np.conj(phases[j]))))
            stats[f"pair_modulus_{labels[i]}__{labels[j]}"] = m
            passed[f"pair_{labels[i]}__{labels[j]}"] = m <= modulus_tol
    if psi is not None:
        psi = np.asarray(psi, dtype=float).ravel()
        p_mean = float(np.mean(psi))
        for label, unit in zip(labels, phases):
            if psi.size != unit.size:
                raise ContractViolation("psi length must match phase arrays")
            coupling = float(np.abs(np.mean(psi * unit)
                                    - p_mean * np.mean(unit)))
            stats[f"psi_coupling_{label}"] = coupling
            passed[f"psi_{label}"] = coupling <= modulus_tol
    return stats, passed


def equidistribution_experiment(n: int, t: float, k_list, seed: int,
                                stream_index: int = 0,
                                psi_threshold: float = 0.8,
                                chi_bins: int = 20, p_floor: float = 1e-3,
                                modulus_tol: float = 0.02) -> ExperimentReport:
    """Joint equidistribution of phases theta_k = {t ||k1 e1 + k2 e2||}.

    Over Haar lattices and large t the phases are jointly uniform and
    independent of the lattice shape; psi = indicator(||e1|| > threshold)
    probes the shape coupling.
    """
    start = time.perf_counter()
    if n < 1000:
        raise ContractViolation("n must be >= 1000")
    if not (t >= 100.0):
        raise ContractViolation("t must be >= 100 (phases need many turns)")
    ks = [k if isinstance(k, PrimeIndex) else PrimeIndex(*k) for k in k_list]
    if not ks:
        raise ContractViolation("k_list must be nonempty")

    frames = sample_frames(_config(seed, stream_index), n)
    thetas = []
    for k in ks:
        vx = k.k1 * frames.e1[:, 0] + k.k2 * frames.e2[:, 0]
        vy = k.k1 * frames.e1[:, 1] + k.k2 * frames.e2[:, 1]
        raw = t * np.sqrt(vx * vx + vy * vy)
        thetas.append((k, raw - np.floor(raw)))
    psi = (frames.n1 > psi_threshold).astype(float)
    stats, passed = phase_statistics(thetas, psi, chi_bins, p_floor,
                                     modulus_tol)

    return ExperimentReport(
        experiment="equidistribution_experiment",
        params={"n": n, "t": t,
                "k_list": [[k.k1, k.k2] for k in ks], "seed": seed,
                "stream_index": stream_index, "psi_threshold": psi_threshold,
                "chi_bins": chi_bins, "p_floor": p_floor,
                "modulus_tol": modulus_tol},
        stats=stats,
        passed=passed,
        runtime_seconds=time.perf_counter() - start,
    )


def compare_laws(n_errors: int, n_limit: int, t: float, seed: int,
                 cutoff: float = 100.0, ks_tol: float = 0.05,
                 error_stream: int = 1, limit_stream: int = 2) -> ExperimentReport:
    """KS distance between normalized counting errors and the limit sampler.

    Counting errors at time t and truncated limit draws (Gaussian tail
    surrogate at the given cutoff) come from independent lattice streams;
    the distance must fall below ks_tol, a three sigma allowance at the
    acceptance sizes once t is deep in the asymptotic regime.
    """
    start = time.perf_counter()
    errors = error_law_experiment(n_errors, t, seed, error_stream)
    cfg = LimitConfig(rng=_config(seed, limit_stream), cutoff_A=cutoff,
                      tail_mode="gaussian_surrogate")
    limit = sample_limit_batch(_config(seed, limit_stream), n_limit, cfg)
    ks = ks_distance(errors, limit)

    return ExperimentReport(
        experiment="compare_laws",
        params={"n_errors": n_errors, "n_limit": n_limit, "t": t,
                "seed": seed, "cutoff": cutoff, "ks_tol": ks_tol,
                "error_stream": error_stream, "limit_stream": limit_stream},
        stats={"ks": ks, "error_mean": errors.mean(),
               "error_stderr": errors.stderr(), "limit_mean": limit.mean(),
               "limit_stderr": limit.stderr()},
        passed={"ks_within_tolerance": ks <= ks_tol},
        runtime_seconds=time.perf_counter() - start,
    )


def tail_report(n: int, seed: int, cutoff: float = 100.0,
                stream_index: int = 0, values=None, top_fraction: float = 0.005,
                hill_lo: float = 1.18, hill_hi: float = 1.48,
                ratio_tol: float = 1.1) -> ExperimentReport:
    """Tail exponent and moment diagnostics of the limit law sample.

    The law is heavy tailed with exponent 4/3: |S|^p has finite mean for
    p < 4/3 only.  Checks: the Hill estimate over the top fraction of |S|
    lies in [hill_lo, hill_hi]; E|S|^1.2 is stable across nested prefixes
    (successive ratios within ratio_tol of 1); E|S|^1.5 grows along the
    same prefixes; the sample mean is within three standard errors of
    zero.  The KS distance between S and -S is reported as an advisory
    symmetry statistic and carries no verdict.  Passing values reuses a
    precomputed sample (parameters must describe it).
    """
    start = time.perf_counter()
    if values is None:
        cfg = LimitConfig(rng=_config(seed, stream_index), cutoff_A=cutoff,
                          tail_mode="gaussian_surrogate")
        values = limit_values(_config(seed, stream_index), n, cfg)
    else:
        values = np.asarray(values, dtype=float).ravel()
        if values.size != n:
            raise ContractViolation("values length must equal n")

    hill = hill_tail_index(values, top_fraction)
    k_tail = int(math.floor(n * top_fraction))
    abs_sorted = np.sort(np.abs(values))
    threshold = abs_sorted[-(k_tail + 1)]
    tail_constant = (k_tail / n) * threshold ** hill

    stats = {"hill_index": hill,
             "hill_stderr": hill / math.sqrt(k_tail),
             "tail_threshold": float(threshold),
             "tail_constant": float(tail_constant),
             "mean": float(np.mean(values)),
             "stderr": float(np.std(values, ddof=1) / math.sqrt(n)),
             "ks_symmetry": ks_distance(values, -values)}

    prefixes = sorted({m for m in (10 ** 4, 10 ** 5, 10 ** 6) if m < n} | {n})
    moments = {}
    for p, key in ((1.2, "abs_moment_1_2"), (1.5, "abs_moment_1_5")):
        moments[key] = [float(np.mean(np.abs(values[:m]) ** p))
                        for m in prefixes]
        for m, value in zip(prefixes, moments[key]):
            stats[f"{key}_n{m}"] = value
    low = moments["abs_moment_1_2"]
    high = moments["abs_moment_1_5"]

    passed = {"hill_in_range": hill_lo <= hill <= hill_hi,
              "moment_1_2_stable": all(max(b / a, a / b) <= ratio_tol
                                       for a, b in zip(low, low[1:])),
              "moment_1_5_increasing": all(b > a
                                           for a, b in zip(high, high[1:])),
              "mean_within_3_stderr": abs(stats["mean"]) <= 3.0 * stats["stderr"]}

    return ExperimentReport(
        experiment="tail_report",
        params={"n": n, "seed": seed, "cutoff": cutoff,
                "stream_index": stream_index, "top_fraction": top_fraction,
                "hill_lo": hill_lo, "hill_hi": hill_hi,
                "ratio_tol": ratio_tol},
        stats=stats,
        passed=passed,
        runtime_seconds=time.perf_counter() - start,
    )


def minima_law_check(n: int, seed: int, eps=(0.05, 0.1, 0.2),
                     stream_index: int = 0, lo: float = 0.85,
                     hi: float = 1.05, spread: float = 1.15) -> ExperimentReport:
    """Small-ball law of the first minimum: P(||e1|| < eps) ~ (3/pi) eps^2.

    The ratios P(||e1|| < eps) / eps^2 must agree with the density
    constant 3/pi = pi/(2 zeta(2)) within [lo, hi] and with each other
    within the spread factor.
    """
    start = time.perf_counter()
    if n < 1000:
        raise ContractViolation("n must be >= 1000")
    eps = tuple(float(e) for e in eps)
    if not eps or not all(0.0 < e < 1.0 for e in eps):
        raise ContractViolation("eps values must lie in (0, 1)")

    frames = sample_frames(_config(seed, stream_index), n)
    stats = {}
    ratios = []
    for e in eps:
        ratio = float(np.mean(frames.n1 < e)) / (e * e)
        stats[f"ratio_eps_{e}"] = ratio
        ratios.append(ratio)
    worst_spread = max(ratios) / min(ratios) if min(ratios) > 0 else math.inf
    if not math.isfinite(worst_spread):
        worst_spread = float(np.finfo(float).max)
    stats["ratio_spread"] = worst_spread
    stats["density_constant"] = 3.0 / math.pi

    return ExperimentReport(
        experiment="minima_law_check",
        params={"n": n, "seed": seed, "eps": list(eps),
                "stream_index": stream_index, "lo": lo, "hi": hi,
                "spread": spread},
        stats=stats,
        passed={"ratios_near_constant": all(lo <= r <= hi for r in ratios),
                "ratios_mutually_close": worst_spread <= spread},
        runtime_seconds=time.perf_counter() - start,
    )


def verify_identities(n: int, seed: int, stream_index: int = 0,
                      det_tol: float = 1e-9, rel_tol: float = 1e-9,
                      dual_tol: float = 1e-12) -> ExperimentReport:
    """Deterministic identity battery over n Haar-sampled lattices.

    Checks on every sample: |det(e1, e2)| = 1; ||e1|| ||e2|| >= 1;
    X1 X3 = 1 + X2^2; the norm identity
    ||k1 e1 + k2 e2||^2 X1 = (k1 X1 + k2 X2)^2 + k2^2 on a fixed index
    set; and dual(dual(basis)) returns the basis exactly.
    """
    start = time.perf_counter()
    if n < 1:
        raise ContractViolation("n must be >= 1")
    bases = sample_haar_batch(_config(seed, stream_index), n)
    frames = reduce_batch(bases)

    det = (frames.e1[:, 0] * frames.e2[:, 1]
           - frames.e1[:, 1] * frames.e2[:, 0])
    max_det_dev = float(np.max(np.abs(np.abs(det) - 1.0)))
    min_norm_product = float(np.min(frames.n1 * frames.n2))

    x1, x2, x3 = frames.X1, frames.X2, frames.X3
    shape_rhs = 1.0 + x2 * x2
    max_shape_rel = float(np.max(np.abs(x1 * x3 - shape_rhs) / shape_rhs))

    max_norm_rel = 0.0
    for k1, k2 in ((1, 0), (0, 1), (1, 1), (2, -1), (3, 2)):
        vx = k1 * frames.e1[:, 0] + k2 * frames.e2[:, 0]
        vy = k1 * frames.e1[:, 1] + k2 * frames.e2[:, 1]
        lhs = (vx * vx + vy * vy) * x1
        rhs = (k1 * x1 + k2 * x2) ** 2 + float(k2 * k2)
        max_norm_rel = max(max_norm_rel,
                           float(np.max(np.abs(lhs - rhs) / rhs)))

    max_dual_abs = float(np.max(np.abs(dual_stack(dual_stack(bases)) - bases)))

    return ExperimentReport(
        experiment="verify_identities",
        params={"n": n, "seed": seed, "stream_index": stream_index,
                "det_tol": det_tol, "rel_tol": rel_tol,
                "dual_tol": dual_tol},
        stats={"max_det_deviation": max_det_dev,
               "min_norm_product": min_norm_product,
               "max_shape_identity_rel": max_shape_rel,
               "max_norm_identity_rel": max_norm_rel,
               "max_dual_roundtrip_abs": max_dual_abs},
        passed={"determinant_unit": max_det_dev <= det_tol,
                "norm_product_at_least_one": min_norm_product >= 1.0,
                "shape_identity": max_shape_rel <= rel_tol,
                "norm_identity": max_norm_rel <= rel_tol,
                "dual_roundtrip": max_dual_abs <= dual_tol},
        runtime_seconds=time.perf_counter() - start,
    )
