"""Analytic building blocks of the counting-error limit law.

phi is the oscillatory series

    phi(theta) = sum_{m >= 1} cos(2 pi m theta - 3 pi/4) / m^(3/2),

evaluated through its branch-point expansion around theta = 0: with
theta~ in (-1/2, 1/2] the centered representative and x = 2 pi theta~,

    phi = (sqrt(2)/2) (B - A) + [theta~ > 0] * 2 sqrt(pi) sqrt(2 pi theta~),
    A   = sum_{k even} (-1)^(k/2)     zeta(3/2-k) x^k / k!,
    B   = sum_{k odd}  (-1)^((k-1)/2) zeta(3/2-k) x^k / k!.

The coefficients decay like 5 k^(-3/2) (2 pi)^0, so on |theta~| <= 1/2 the
terms shrink geometrically with ratio 1/2 and sixty terms give ~1e-16.
The square-root cusp is one-sided: phi is continuous at 0 with a vertical
tangent from the right and a finite slope from the left.

The remaining operations are lattice sums over a reduced frame:
the deterministic phases theta_k = frac(t ||k1 e1 + k2 e2||), the full
lattice sum h_sum, the prime-vector sum s_a_prime, the diagonal-flow norm
derivative w_coefficient, a numeric integer-independence witness, and the
support geometry of an ellipse D * S^1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ContractViolation, InvariantViolation
from .lattice import Basis2, PrimeIndex, ReducedFrame, enumerate_prime_indices, gauss_reduce

_K_TERMS = 61  # series order: term_k ~ 5 k^(-3/2) 2^(-k) < 1e-18 at k = 60
_INV_SQRT2 = math.sqrt(0.5)
_CUSP = 2.0 * math.sqrt(2.0) * math.pi  # 2 sqrt(pi) * sqrt(2 pi theta) = _CUSP sqrt(theta)
_PHASE = -0.75 * math.pi

DEFAULT_GRID = 1 << 20
KERNEL_GRID = 1 << 18
GRID_EXACT_CELLS = 64
KERNEL_EXACT_CELLS = 256


def _build_tables():
    """zeta(3/2 - k) and the centered-series Horner coefficients."""
    import mpmath

    with mpmath.workdps(40):
        zeta = [mpmath.zeta(mpmath.mpf(3) / 2 - k) for k in range(_K_TERMS)]
        coef = [float(z * (2 * mpmath.pi) ** k / mpmath.factorial(k))
                for k, z in enumerate(zeta)]
    even = np.array([(-1.0) ** j * coef[2 * j] for j in range((_K_TERMS + 1) // 2)])
    odd = np.array([(-1.0) ** j * coef[2 * j + 1] for j in range(_K_TERMS // 2)])
    return np.array([float(z) for z in zeta]), even, odd


@dataclass(frozen=True, eq=False)
class PhiEvaluator:
    """Evaluation tables for phi: exact series plus an optional lookup grid."""

    target_abs_error: float
    zeta_table: np.ndarray
    even_coef: np.ndarray
    odd_coef: np.ndarray
    grid: np.ndarray | None = None
    grid_resolution: int = 0

    @classmethod
    def build(cls, target_abs_error: float = 1e-10,
              grid_resolution: int | None = None) -> "PhiEvaluator":
        if not (0.0 < target_abs_error <= 1e-6):
            raise ContractViolation("target_abs_error must be in (0, 1e-6]")
        zeta, even, odd = _build_tables()
        ev = cls(target_abs_error=target_abs_error, zeta_table=zeta,
                 even_coef=even, odd_coef=odd)
        if grid_resolution is not None:
            ev = ev.with_grid(grid_resolution)
        return ev

    def with_grid(self, resolution: int = DEFAULT_GRID) -> "PhiEvaluator":
        """Evaluator carrying a dense grid (periodic pad, cubic stencils)."""
        if resolution < 1 << 10:
            raise ContractViolation("grid resolution too small")
        idx = np.arange(-1, resolution + 2, dtype=np.int64)
        nodes = (idx % resolution) / resolution
        vals = phi_many(nodes, self)
        return PhiEvaluator(target_abs_error=self.target_abs_error,
                            zeta_table=self.zeta_table, even_coef=self.even_coef,
                            odd_coef=self.odd_coef, grid=vals,
                            grid_resolution=resolution)


@lru_cache(maxsize=4)
def default_evaluator(target_abs_error: float = 1e-10) -> PhiEvaluator:
    return PhiEvaluator.build(target_abs_error)


def phi(theta: float, ev: PhiEvaluator | None = None) -> float:
    """phi(theta) by the exact centered series (abs error ~1e-15)."""
    if ev is None:
        ev = default_evaluator()
    th = theta - math.floor(theta)
    tt = th - 1.0 if th > 0.5 else th
    y = tt * tt
    ec, oc = ev.even_coef, ev.odd_coef
    a = 0.0
    for i in range(len(ec) - 1, -1, -1):
        a = a * y + ec[i]
    b = 0.0
    for i in range(len(oc) - 1, -1, -1):
        b = b * y + oc[i]
    val = _INV_SQRT2 * (tt * b - a)
    if tt > 0.0:
        val += _CUSP * math.sqrt(tt)
    return float(val)


def phi_many(thetas, ev: PhiEvaluator | None = None) -> np.ndarray:
    """Vectorized exact series; elementwise identical to phi()."""
    if ev is None:
        ev = default_evaluator()
    th = np.asarray(thetas, dtype=float)
    th = th - np.floor(th)
    tt = np.where(th > 0.5, th - 1.0, th)
    y = tt * tt
    ec, oc = ev.even_coef, ev.odd_coef
    a = np.zeros_like(y)
    for i in range(len(ec) - 1, -1, -1):
        a = a * y + ec[i]
    b = np.zeros_like(y)
    for i in range(len(oc) - 1, -1, -1):
        b = b * y + oc[i]
    val = _INV_SQRT2 * (tt * b - a)
    pos = tt > 0.0
    val[pos] += _CUSP * np.sqrt(tt[pos])
    return val


def phi_grid(thetas, ev: PhiEvaluator) -> np.ndarray:
    """Grid-interpolated phi (4-point cubic stencil, ~1e-10 away from the cusp).

    Within GRID_EXACT_CELLS cells of the cusp at 0 the interpolation falls
    back to the exact series, keeping the sup error of the hybrid below the
    evaluator's bulk tolerance of 1e-6 everywhere.
    """
    if ev.grid is None:
        raise ContractViolation("evaluator carries no grid; use with_grid()")
    g = ev.grid_resolution
    th = np.asarray(thetas, dtype=float)
    th = th - np.floor(th)
    s = th * g
    j = np.floor(s).astype(np.int64)
    np.clip(j, 0, g - 1, out=j)
    f = s - j
    t0 = ev.grid[j]
    t1 = ev.grid[j + 1]
    t2 = ev.grid[j + 2]
    t3 = ev.grid[j + 3]
    w0 = -f * (f - 1.0) * (f - 2.0) / 6.0
    w1 = (f * f - 1.0) * (f - 2.0) / 2.0
    w2 = -f * (f + 1.0) * (f - 2.0) / 2.0
    w3 = f * (f * f - 1.0) / 6.0
    out = w0 * t0 + w1 * t1 + w2 * t2 + w3 * t3
    edge = GRID_EXACT_CELLS / g
    near = (th < edge) | (th > 1.0 - edge)
    if np.any(near):
        out[near] = phi_many(th[near], ev)
    return out


@lru_cache(maxsize=2)
def kernel_phi_table(resolution: int = KERNEL_GRID):
    """float32 lookup table for the compiled bulk kernels.

    Returns (values[j] = phi(j / resolution) for j = 0..resolution+1,
    exact-window half-width in theta units).  Inside the window the kernels
    evaluate the series themselves with the f64 coefficient arrays.
    """
    ev = default_evaluator()
    nodes = np.arange(resolution + 2, dtype=np.int64) % resolution / resolution
    vals = phi_many(nodes, ev).astype(np.float32)
    return vals, KERNEL_EXACT_CELLS / resolution


def theta_k(frame: ReducedFrame, k: PrimeIndex, t: float) -> float:
    """Fractional part of t * ||k1 e1 + k2 e2|| in [0, 1)."""
    if not (t >= 0.0 and math.isfinite(t)):
        raise ContractViolation("t must be finite and >= 0")
    v = t * frame.vector_norm(k.k1, k.k2)
    return v - math.floor(v)


def h_sum(basis: Basis2, t: float, A: float) -> float:
    """(1/pi) sum over ALL nonzero lattice vectors of norm <= A of
    cos(2 pi t ||l|| - 3 pi/4) / ||l||^(3/2).

    Enumerated as prime vectors times integer multiples; both signs of each
    vector contribute, hence the factor 2 against the half index set.
    """
    frame = gauss_reduce(basis)
    total = 0.0
    for k, norm in enumerate_prime_indices(frame, A):
        m_max = int(math.floor(A * (1.0 + 1e-15) / norm))
        if m_max < 1:
            continue
        m = np.arange(1, m_max + 1, dtype=np.float64)
        qs = m * norm
        total += 2.0 * float(np.sum(np.cos(2.0 * math.pi * t * qs + _PHASE)
                                    / (qs * np.sqrt(qs))))
    return total / math.pi


def s_a_prime(frame: ReducedFrame, t: float, A: float,
              ev: PhiEvaluator | None = None) -> float:
    """(2/pi) sum_{k in Pi_A} phi(theta_k) / ||k1 e1 + k2 e2||^(3/2)."""
    if ev is None:
        ev = default_evaluator()
    entries = enumerate_prime_indices(frame, A)
    if not entries:
        return 0.0
    norms = np.array([n for _, n in entries])
    ph = t * norms
    ph -= np.floor(ph)
    vals = phi_many(ph, ev) / (norms * np.sqrt(norms))
    return (2.0 / math.pi) * float(np.sum(vals))


def w_coefficient(frame: ReducedFrame, k: PrimeIndex) -> float:
    """Derivative at h = 0 of ||k1 e1 + k2 e2|| under the diagonal flow
    diag(1 + h, 1/(1 + h)); equals (w1^2 - w2^2) / ||w|| for w = k1 e1 + k2 e2.
    """
    wx, wy = frame.vector(k.k1, k.k2)
    return (wx * wx - wy * wy) / math.sqrt(wx * wx + wy * wy)


def z_free_witness(frame: ReducedFrame, terms, allow_zero: bool = False) -> float:
    """|sum_i p_i W_{k_i}| for distinct prime indices and integers p_i.

    Typical lattices give a nonzero witness; structured ones (e.g. square)
    can annihilate it.  The all-zero coefficient vector is rejected unless
    allow_zero is set (test builds).
    """
    seen = set()
    total = 0.0
    any_nonzero = False
    for p, k in terms:
        addr = (k.k1, k.k2)
        if addr in seen:
            raise ContractViolation(f"duplicate prime index {addr}")
        seen.add(addr)
        if p != 0:
            any_nonzero = True
        total += p * w_coefficient(frame, k)
    if not any_nonzero and not allow_zero:
        raise ContractViolation("all integer coefficients are zero")
    return abs(total)


@dataclass(frozen=True)
class OvalGeometry:
    """Support data of the oval D * S^1 in direction xi."""

    x_gamma: tuple[float, float]
    rho_gamma: float
    y_gamma: float

    def __post_init__(self):
        if not (self.rho_gamma > 0.0):
            raise InvariantViolation("curvature radius must be positive")


def oval_geometry(d_matrix, xi) -> OvalGeometry:
    """Boundary point with outward normal xi, its curvature radius, and the
    support value Y = ||D^T xi|| of the unit-determinant oval D * S^1:

        x_gamma = D D^T xi / ||D^T xi||,   rho_gamma = (||xi|| / ||D^T xi||)^3.
    """
    d = np.asarray(d_matrix, dtype=float)
    if d.shape != (2, 2):
        raise ContractViolation("D must be a 2x2 matrix")
    det = d[0, 0] * d[1, 1] - d[0, 1] * d[1, 0]
    if abs(det - 1.0) > 1e-9:
        raise ContractViolation("D must have determinant 1")
    v = np.asarray(xi, dtype=float)
    nv = math.sqrt(float(v @ v))
    if not (nv > 0.0):
        raise ContractViolation("xi must be nonzero")
    dtxi = d.T @ v
    y = math.sqrt(float(dtxi @ dtxi))
    xg = d @ (dtxi / y)
    return OvalGeometry(x_gamma=(float(xg[0]), float(xg[1])),
                        rho_gamma=(nv / y) ** 3, y_gamma=y)
