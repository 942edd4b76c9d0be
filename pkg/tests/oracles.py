"""Independent reference implementations used only by the test suite.

Every oracle here recomputes a quantity the package produces, by a
different route: direct grid enumeration for point counts, raw series
summation for the oscillatory weight function, central finite differences
for flow derivatives, exhaustive coefficient search for lattice minima,
and parametric differentiation for oval geometry.  They are deliberately
slow and simple; tests freeze or compare against them at stated
tolerances.
"""

from __future__ import annotations

import math

import numpy as np

TWO_PI = 2.0 * math.pi
PHASE = -0.75 * math.pi


def brute_count(matrix, t: float, center=(0.0, 0.0)) -> int:
    """Lattice points of M Z^2 in the closed disk of radius t about center.

    Enumerates integer coefficient pairs in a box obtained from the
    inverse matrix: n = M^(-1) p ranges over the image of the disk, so
    |n_i| <= ||row_i(M^(-1))|| * t + slack around M^(-1) center.
    """
    m = np.asarray(matrix, dtype=float)
    inv = np.linalg.inv(m)
    cx, cy = float(center[0]), float(center[1])
    c_coeff = inv @ np.array([cx, cy])
    r0 = math.hypot(inv[0, 0], inv[0, 1]) * t + 1.0
    r1 = math.hypot(inv[1, 0], inv[1, 1]) * t + 1.0
    a_lo, a_hi = int(math.floor(c_coeff[0] - r0)), int(math.ceil(c_coeff[0] + r0))
    b_lo, b_hi = int(math.floor(c_coeff[1] - r1)), int(math.ceil(c_coeff[1] + r1))
    a = np.arange(a_lo, a_hi + 1, dtype=float)
    b = np.arange(b_lo, b_hi + 1, dtype=float)
    px = m[0, 0] * a[:, None] + m[0, 1] * b[None, :] - cx
    py = m[1, 0] * a[:, None] + m[1, 1] * b[None, :] - cy
    return int(np.count_nonzero(px * px + py * py <= t * t))


def brute_count_ellipse(matrix, a11: float, a12: float, a22: float,
                        t: float) -> int:
    """Points of M Z^2 with a11 x^2 + 2 a12 x y + a22 y^2 <= t^2 (direct).

    The form is positive definite; coefficient bounds come from the
    smallest eigenvalue: q(p) >= lam_min ||p||^2.
    """
    m = np.asarray(matrix, dtype=float)
    form = np.array([[a11, a12], [a12, a22]])
    lam_min = min(np.linalg.eigvalsh(form))
    radius = t / math.sqrt(lam_min)
    inv = np.linalg.inv(m)
    r0 = math.hypot(inv[0, 0], inv[0, 1]) * radius + 1.0
    r1 = math.hypot(inv[1, 0], inv[1, 1]) * radius + 1.0
    a = np.arange(-int(math.ceil(r0)), int(math.ceil(r0)) + 1, dtype=float)
    b = np.arange(-int(math.ceil(r1)), int(math.ceil(r1)) + 1, dtype=float)
    px = m[0, 0] * a[:, None] + m[0, 1] * b[None, :]
    py = m[1, 0] * a[:, None] + m[1, 1] * b[None, :]
    q = a11 * px * px + 2.0 * a12 * px * py + a22 * py * py
    return int(np.count_nonzero(q <= t * t))


def brute_minima(matrix, coeff_bound: int = 25):
    """Two successive minima of M Z^2 by exhaustive coefficient search.

    Returns (n1, n2): the shortest nonzero vector length and the shortest
    length among vectors not parallel to a shortest one, both searched
    over integer coefficients |a|, |b| <= coeff_bound.
    """
    m = np.asarray(matrix, dtype=float)
    rng_c = np.arange(-coeff_bound, coeff_bound + 1)
    a, b = np.meshgrid(rng_c, rng_c, indexing="ij")
    a = a.ravel()
    b = b.ravel()
    keep = (a != 0) | (b != 0)
    a, b = a[keep], b[keep]
    px = m[0, 0] * a + m[0, 1] * b
    py = m[1, 0] * a + m[1, 1] * b
    nn = np.hypot(px, py)
    i = int(np.argmin(nn))
    n1 = float(nn[i])
    cross = a * b[i] - b * a[i]
    nn2 = nn[cross != 0]
    return n1, float(nn2.min())


def required_terms(theta: float, tol: float = 1e-9) -> int:
    """Series length making the summation-by-parts tail bound <= tol.

    The cosine series with exponent 3/2 has partial cosine sums bounded
    by 1/|sin(pi theta)|, so the tail after M terms is below
    (M+1)^(-3/2) / |sin(pi theta)| up to a small constant.
    """
    s = abs(math.sin(math.pi * theta))
    if s == 0.0:
        raise ValueError("theta must not be an integer")
    return int(math.ceil((1.0 / (tol * s)) ** (2.0 / 3.0))) + 2


def phi_direct(theta: float, tol: float = 1e-9, m_cap: int = 50_000_000) -> float:
    """sum_{m>=1} cos(2 pi m theta - 3 pi / 4) / m^(3/2) by raw summation."""
    m_max = required_terms(theta, tol)
    if m_max > m_cap:
        raise ValueError(f"needs {m_max} terms, above cap {m_cap}")
    total = 0.0
    chunk = 1 << 21
    lo = 1
    while lo <= m_max:
        hi = min(lo + chunk - 1, m_max)
        m = np.arange(lo, hi + 1, dtype=float)
        ang = TWO_PI * np.mod(m * theta, 1.0) + PHASE
        total += float(np.dot(np.cos(ang), m ** -1.5))
        lo = hi + 1
    return total


def fd_w(frame, k1: int, k2: int, h: float = 1e-5) -> float:
    """Central difference of s -> ||diag(e^s, e^-s) v_k|| at s = 0."""
    vx, vy = frame.vector(k1, k2)

    def norm_at(s: float) -> float:
        es = math.exp(s)
        return math.hypot(es * vx, vy / es)

    return (norm_at(h) - norm_at(-h)) / (2.0 * h)


def prime_pairs_in_disk(frame, cutoff: float):
    """All prime half-set indices with ||k1 e1 + k2 e2|| <= cutoff (direct).

    Double loop over a coefficient box from the inverse frame matrix,
    keeping gcd(k1, k2) = 1, k1 >= 0, and (k1 = 0 implies k2 = 1).
    Returns a list of (k1, k2, norm) sorted by (norm, k1, k2).
    """
    m = np.array([[frame.e1[0], frame.e2[0]], [frame.e1[1], frame.e2[1]]])
    inv = np.linalg.inv(m)
    r0 = math.hypot(inv[0, 0], inv[0, 1]) * cutoff + 1.0
    r1 = math.hypot(inv[1, 0], inv[1, 1]) * cutoff + 1.0
    out = []
    for k1 in range(0, int(math.ceil(r0)) + 1):
        for k2 in range(-int(math.ceil(r1)), int(math.ceil(r1)) + 1):
            if k1 == 0 and k2 != 1:
                continue
            if math.gcd(k1, k2) != 1:
                continue
            vx = k1 * m[0, 0] + k2 * m[0, 1]
            vy = k1 * m[1, 0] + k2 * m[1, 1]
            nn = math.hypot(vx, vy)
            if nn <= cutoff * (1.0 + 1e-15):
                out.append((k1, k2, nn))
    out.sort(key=lambda e: (e[2], e[0], e[1]))
    return out


def numeric_oval_geometry(d_matrix, xi):
    """Boundary point, curvature, and support of {||D^(-1) p|| = 1} at normal xi.

    Parametrizes the oval as gamma(s) = D (cos s, sin s), finds the
    parameter whose outward normal aligns with xi by dense search plus
    golden refinement, and differentiates numerically for the curvature.
    """
    d = np.asarray(d_matrix, dtype=float)
    xi = np.asarray(xi, dtype=float)
    xi_hat = xi / np.linalg.norm(xi)

    def gamma(s):
        return d @ np.array([math.cos(s), math.sin(s)])

    def support(s):
        return float(gamma(s) @ xi_hat)

    grid = np.linspace(0.0, TWO_PI, 4097)
    values = [support(s) for s in grid]
    s0 = grid[int(np.argmax(values))]
    lo, hi = s0 - 2e-3, s0 + 2e-3
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    for _ in range(80):
        d1 = hi - (hi - lo) * invphi
        d2 = lo + (hi - lo) * invphi
        if support(d1) < support(d2):
            lo = d1
        else:
            hi = d2
    s_star = 0.5 * (lo + hi)
    x = gamma(s_star)
    h = 1e-5
    g1 = (gamma(s_star + h) - gamma(s_star - h)) / (2.0 * h)
    g2 = (gamma(s_star + h) - 2.0 * gamma(s_star) + gamma(s_star - h)) / (h * h)
    speed = np.linalg.norm(g1)
    curvature = abs(g1[0] * g2[1] - g1[1] * g2[0]) / speed ** 3
    return x, float(curvature), float(x @ xi_hat)
