"""Exact lattice-point counting in dilated disks and the counting error.

For a lattice with reduced pair (u, v) the points a*u + b*v inside the disk
of radius t around c satisfy a quadratic in a for each integer b:

    X1 a^2 + 2 (X2 b - <u,c>) a + (X3 b^2 - 2 <v,c> b + |c|^2 - t^2) <= 0,

so the count is a sum over ~ 2 t ||u|| / |det| rows of integer-interval
lengths.  Rows are indexed by the coefficient of the longer vector, which
minimizes the row count.

Boundary robustness: a float rounding error can misplace an integer that
lies within ~1e-9 relative of the circle.  Each row's four endpoint
candidates are re-tested directly, and when the tested quadratic value is
within 1e-9 * max(t^2, 1) of zero the membership decision is recomputed in
compensated double-double arithmetic (Dekker splitting, no FMA needed),
which settles it exactly for all representable inputs of interest.

The error term of one lattice is R = N(t D^2, L) - pi t^2 (unit covolume),
reported raw and normalized by sqrt(t).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation, InvariantViolation
from .lattice import Basis2, FrameBatch, _reduce_pair

# pi * t^2 must stay exactly representable as a count (below 2^53)
T_MAX = 5.0e7

_REL_BOUNDARY = 1e-9
_SPLITTER = 134217729.0  # 2^27 + 1


@dataclass(frozen=True)
class ErrorSample:
    """Count, error R = N - pi t^2 and normalized error R / sqrt(t)."""

    t: float
    count: int
    error: float
    normalized: float
    center: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if abs(self.error - (self.count - math.pi * self.t * self.t)) > 1e-9:
            raise InvariantViolation("error field inconsistent with count")
        if self.t > 0 and abs(self.normalized - self.error / math.sqrt(self.t)) > 1e-12:
            raise InvariantViolation("normalized field inconsistent with error")


@dataclass(frozen=True)
class EllipseForm:
    """Positive-definite form q11 x^2 + 2 q12 x y + q22 y^2 <= 1."""

    q11: float
    q12: float
    q22: float

    def __post_init__(self):
        if not (self.q11 > 0.0 and self.q11 * self.q22 - self.q12 * self.q12 > 0.0):
            raise ContractViolation("ellipse form must be positive definite")


# ---------------------------------------------------------------------------
# double-double helpers (Dekker / Knuth error-free transforms)


def _two_sum(a: float, b: float):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _two_prod(a: float, b: float):
    p = a * b
    ca = _SPLITTER * a
    ahi = ca - (ca - a)
    alo = a - ahi
    cb = _SPLITTER * b
    bhi = cb - (cb - b)
    blo = b - bhi
    return p, ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo


def _dd_add(xh: float, xl: float, yh: float, yl: float):
    s, e = _two_sum(xh, yh)
    e += xl + yl
    hi = s + e
    return hi, e - (hi - s)


def _dd_boundary_value(a: int, b: int, ux, uy, vx, vy, cx, cy, t):
    """Sign-accurate ||a u + b v - c||^2 - t^2 via double-double arithmetic."""
    wxh, wxl = _two_prod(float(a), ux)
    ph, pl = _two_prod(float(b), vx)
    wxh, wxl = _dd_add(wxh, wxl, ph, pl)
    wxh, wxl = _dd_add(wxh, wxl, -cx, 0.0)

    wyh, wyl = _two_prod(float(a), uy)
    ph, pl = _two_prod(float(b), vy)
    wyh, wyl = _dd_add(wyh, wyl, ph, pl)
    wyh, wyl = _dd_add(wyh, wyl, -cy, 0.0)

    # squares: (h + l)^2 = h^2 + 2 h l (+ l^2, below the final precision)
    sxh, sxl = _two_prod(wxh, wxh)
    sxl += 2.0 * wxh * wxl
    syh, syl = _two_prod(wyh, wyh)
    syl += 2.0 * wyh * wyl
    qh, ql = _dd_add(sxh, sxl, syh, syl)

    th, tl = _two_prod(t, t)
    qh, ql = _dd_add(qh, ql, -th, -tl)
    return qh + ql


def _count_reduced(ux, uy, vx, vy, t, cx, cy) -> int:
    """Exact disk count over the lattice spanned by the reduced pair (u, v).

    The expressions here are mirrored verbatim by the batch kernel; keep the
    two in lockstep so batch and scalar counts agree bit for bit.
    """
    x1 = ux * ux + uy * uy
    x2 = ux * vx + uy * vy
    x3 = vx * vx + vy * vy
    det = ux * vy - uy * vx
    d2 = det * det
    t2 = t * t
    p = ux * cx + uy * cy
    q = vx * cx + vy * cy
    r = cx * cx + cy * cy
    tol_q = _REL_BOUNDARY * max(t2, 1.0)

    beta = x1 * q - x2 * p
    discb = beta * beta + d2 * (p * p - x1 * r + x1 * t2)
    if discb < 0.0:
        rtb = 0.0
    else:
        rtb = math.sqrt(discb)
    bc = beta / d2
    blo = int(math.ceil(bc - rtb / d2)) - 1
    bhi = int(math.floor(bc + rtb / d2)) + 1

    total = 0
    for b in range(blo, bhi + 1):
        b2 = x2 * b - p
        cq = x3 * (b * b) - 2.0 * q * b + (r - t2)
        disc = b2 * b2 - x1 * cq
        if disc <= -x1 * tol_q:
            continue
        if disc >= 0.0:
            rt = math.sqrt(disc)
            lo = (-b2 - rt) / x1
            hi = (-b2 + rt) / x1
            alo = int(math.ceil(lo))
            ahi = int(math.floor(hi))
        else:
            # near-tangent row: no base interval, only endpoint candidates
            av = -b2 / x1
            alo = int(math.ceil(av))
            ahi = alo - 1
        if ahi >= alo:
            total += ahi - alo + 1
        for a in sorted({alo - 1, alo, ahi, ahi + 1}):
            wx = a * ux + b * vx - cx
            wy = a * uy + b * vy - cy
            qv = wx * wx + wy * wy - t2
            if qv > tol_q:
                member = False
            elif qv < -tol_q:
                member = True
            else:
                member = _dd_boundary_value(a, b, ux, uy, vx, vy, cx, cy, t) <= 0.0
            in_base = alo <= a <= ahi
            if member and not in_base:
                total += 1
            elif in_base and not member:
                total -= 1
    return total


def _count_with_matrix(m, t: float, center=(0.0, 0.0)) -> int:
    """Counting core on raw columns; skips the unimodularity validation."""
    m = np.asarray(m, dtype=float)
    u, v = _reduce_pair((float(m[0, 0]), float(m[1, 0])),
                        (float(m[0, 1]), float(m[1, 1])))
    return _count_reduced(u[0], u[1], v[0], v[1], float(t),
                          float(center[0]), float(center[1]))


def count_points(basis: Basis2, t: float, center=(0.0, 0.0)) -> int:
    """|{n in Z^2 : ||basis n - center|| <= t}|, exactly."""
    if not (t >= 0.0 and math.isfinite(t)):
        raise ContractViolation("t must be finite and >= 0")
    if t > T_MAX:
        raise ContractViolation(f"t = {t!r} overflows exact counting (max {T_MAX})")
    return _count_with_matrix(basis.matrix, t, center)


def error_sample(basis: Basis2, t: float) -> ErrorSample:
    """Count, error and normalized error for the centered disk of radius t."""
    if not (t > 0.0):
        raise ContractViolation("t must be > 0")
    n = count_points(basis, t)
    err = n - math.pi * t * t
    return ErrorSample(t=float(t), count=n, error=err,
                       normalized=err / math.sqrt(t))


def counts_for_frames(frames: FrameBatch, t: float) -> np.ndarray:
    """Disk counts for a batch of reduced frames (centered disks).

    The compiled kernel mirrors _count_reduced's double arithmetic; rows where
    a boundary decision fell inside the double-double window are flagged and
    recounted through the scalar path, so the result equals the scalar count
    for every lattice.
    """
    if not (0.0 <= t <= T_MAX):
        raise ContractViolation("t out of range")
    from ._kernels import count_disk_kernel

    n = len(frames)
    counts = np.zeros(n, dtype=np.int64)
    suspect = np.zeros(n, dtype=np.bool_)
    count_disk_kernel(frames.e1[:, 0].copy(), frames.e1[:, 1].copy(),
                      frames.e2[:, 0].copy(), frames.e2[:, 1].copy(),
                      float(t), counts, suspect)
    for i in np.flatnonzero(suspect):
        counts[i] = _count_reduced(frames.e1[i, 0], frames.e1[i, 1],
                                   frames.e2[i, 0], frames.e2[i, 1],
                                   float(t), 0.0, 0.0)
    return counts


def error_samples_batch(frames: FrameBatch, t: float):
    """(counts, errors, normalized) arrays for a batch of frames."""
    if not (t > 0.0):
        raise ContractViolation("t must be > 0")
    counts = counts_for_frames(frames, t)
    errors = counts - math.pi * t * t
    return counts, errors, errors / math.sqrt(t)


def ellipse_to_disk(ell: EllipseForm):
    """Unimodular M and scale s with: v in t*ellipse  <=>  M v in (t s) D^2.

    M is the symmetric square root of the det-normalized form and
    s = delta^(-1/4) = sqrt(Area / pi), delta the form's determinant.
    """
    delta = ell.q11 * ell.q22 - ell.q12 * ell.q12
    rt = math.sqrt(delta)
    tau = ell.q11 + ell.q22
    denom = delta ** 0.25 * math.sqrt(tau + 2.0 * rt)
    m = np.array([[ell.q11 + rt, ell.q12], [ell.q12, ell.q22 + rt]]) / denom
    return m, delta ** -0.25


def count_points_ellipse(basis: Basis2, ell: EllipseForm, t: float,
                         center=(0.0, 0.0)) -> int:
    """|{n : q(basis n - center) <= t^2}| via the disk reduction."""
    if not (t >= 0.0 and math.isfinite(t)):
        raise ContractViolation("t must be finite and >= 0")
    m, s = ellipse_to_disk(ell)
    mc = m @ np.asarray(center, dtype=float)
    return _count_with_matrix(m @ basis.matrix, t * s, (float(mc[0]), float(mc[1])))
