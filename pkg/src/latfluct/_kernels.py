"""Compiled batch kernels mirroring the scalar reference paths.

Determinism contract: each kernel reproduces a scalar routine's float64
expressions operation for operation, so membership and boundary decisions
agree exactly.

* count_disk_kernel replicates counting._count_reduced for centered disks
  and flags rows whose boundary test falls inside the compensated window;
  callers recount flagged rows through the scalar path.
* prime_count_kernel and limit_draws_kernel replicate the candidate
  predicates of lattice.enumerate_prime_indices, so the set of prime
  indices they visit is identical to the scalar enumeration.  Only the
  visiting order differs (coefficient-major here, norm-sorted there),
  which perturbs accumulated sums by reassociation noise alone.
* The SplitMix64 helpers are bit-for-bit ports of rng.py.

No fastmath anywhere; IEEE semantics are part of the contract.  Weight
evaluation in the limit kernel uses a float32 lookup table away from the
cusp of phi (absolute error ~3e-7) and the exact float64 series near it.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from numba import njit

from .rng import GOLDEN, MASK64, MIX_A, MIX_B

_U_GOLDEN = np.uint64(GOLDEN)
_U_MIX_A = np.uint64(MIX_A)
_U_MIX_B = np.uint64(MIX_B)
_U1 = np.uint64(1)
_U11 = np.uint64(11)
_U27 = np.uint64(27)
_U30 = np.uint64(30)
_U31 = np.uint64(31)
_TO_UNIT = 2.0 ** -53

_INV_SQRT2 = math.sqrt(0.5)
_CUSP = 2.0 * math.sqrt(2.0) * math.pi

_REL_BOUNDARY = 1e-9

# widest possible k2 coordinate of a prime vector of norm <= A is
# A * n1 <= (4/3)^(1/4) A ~ 1.0746 A; rows beyond the cap fall back to gcd
COPRIME_CAP = 20000


@njit(cache=True, inline="always")
def _mix64(z):
    z = (z ^ (z >> _U30)) * _U_MIX_A
    z = (z ^ (z >> _U27)) * _U_MIX_B
    return z ^ (z >> _U31)


@njit(cache=True, inline="always")
def _index_key(key, a, b):
    return _mix64((key ^ (np.uint64(a) * _U_MIX_A)) + (np.uint64(b) * _U_MIX_B))


@njit(cache=True, inline="always")
def _uniform(key, i):
    out = _mix64(key + (np.uint64(i) + _U1) * _U_GOLDEN)
    return np.float64(out >> _U11) * _TO_UNIT


@njit(cache=True, inline="always")
def _gcd(a, b):
    while b != 0:
        a, b = b, a % b
    return a


@njit(cache=True)
def count_disk_kernel(ux, uy, vx, vy, t, counts, suspect):
    """Centered-disk counts for reduced pairs; mirrors _count_reduced.

    The scalar routine's center terms vanish identically for c = 0 (their
    contributions are signed zeros absorbed by the surrounding arithmetic),
    so the expressions below are bitwise equivalent to the scalar path.
    """
    t2 = t * t
    tol_q = _REL_BOUNDARY * max(t2, 1.0)
    for i in range(ux.shape[0]):
        e1x = ux[i]
        e1y = uy[i]
        e2x = vx[i]
        e2y = vy[i]
        x1 = e1x * e1x + e1y * e1y
        x2 = e1x * e2x + e1y * e2y
        x3 = e2x * e2x + e2y * e2y
        det = e1x * e2y - e1y * e2x
        d2 = det * det

        rtb = math.sqrt(d2 * (x1 * t2))
        blo = np.int64(math.ceil(0.0 - rtb / d2)) - 1
        bhi = np.int64(math.floor(0.0 + rtb / d2)) + 1

        total = np.int64(0)
        bad = False
        for b in range(blo, bhi + 1):
            b2 = x2 * b
            cq = x3 * (b * b) + (0.0 - t2)
            disc = b2 * b2 - x1 * cq
            if disc <= -x1 * tol_q:
                continue
            if disc >= 0.0:
                rt = math.sqrt(disc)
                alo = np.int64(math.ceil((-b2 - rt) / x1))
                ahi = np.int64(math.floor((-b2 + rt) / x1))
            else:
                alo = np.int64(math.ceil(-b2 / x1))
                ahi = alo - 1
            if ahi >= alo:
                total += ahi - alo + 1
            cand2 = ahi
            cand3 = ahi + 1
            for idx in range(4):
                if idx == 0:
                    a = alo - 1
                elif idx == 1:
                    a = alo
                elif idx == 2:
                    a = cand2
                    if a == alo or a == alo - 1:
                        continue
                else:
                    a = cand3
                    if a == cand2 or a == alo or a == alo - 1:
                        continue
                wx = a * e1x + b * e2x
                wy = a * e1y + b * e2y
                qv = wx * wx + wy * wy - t2
                if qv > tol_q:
                    member = False
                elif qv < -tol_q:
                    member = True
                else:
                    bad = True
                    member = qv <= 0.0
                in_base = alo <= a <= ahi
                if member and not in_base:
                    total += 1
                elif in_base and not member:
                    total -= 1
        counts[i] = total
        suspect[i] = bad


@njit(cache=True)
def prime_count_kernel(n1, n2, x2a, cutoff, out):
    """Number of prime-index pairs (one per +-class) of norm <= cutoff.

    Candidate generation and the norm test mirror enumerate_prime_indices
    exactly, so the count equals len(enumerate_prime_indices(frame, cutoff)).
    """
    a2 = cutoff * cutoff
    for i in range(n1.shape[0]):
        x1 = n1[i] * n1[i]
        x3 = n2[i] * n2[i]
        x2 = x2a[i]
        cnt = np.int64(0)
        if x3 <= a2 * (1.0 + 1e-15):
            cnt += 1
        k1_max = np.int64(math.floor(cutoff * n2[i] + 1e-9))
        for k1 in range(1, k1_max + 1):
            fk1 = np.float64(k1)
            disc = a2 * x3 - fk1 * fk1
            if disc < 0.0:
                continue
            rt = math.sqrt(disc)
            lo = np.int64(math.ceil((-fk1 * x2 - rt) / x3 - 1e-12))
            hi = np.int64(math.floor((-fk1 * x2 + rt) / x3 + 1e-12))
            for k2 in range(lo, hi + 1):
                ak2 = k2 if k2 >= 0 else -k2
                if _gcd(k1, ak2) != 1:
                    continue
                fk2 = np.float64(k2)
                q = (x3 * fk2 + 2.0 * fk1 * x2) * fk2 + fk1 * fk1 * x1
                if q <= a2 * (1.0 + 1e-15):
                    cnt += 1
        out[i] = cnt


@lru_cache(maxsize=4)
def coprime_table(span: int, cap: int = COPRIME_CAP):
    """CSR rows of coprime k2 in [-span, span] for k1 = 0 .. cap.

    Row k1 holds, ascending, every k2 with gcd(k1, |k2|) = 1.  Row 0 is
    empty (the k1 = 0 prime index is handled separately).  Built with
    np.gcd, the same filter the scalar enumeration applies.
    """
    k2 = np.arange(-span, span + 1, dtype=np.int64)
    counts = np.zeros(cap + 1, dtype=np.int64)
    parts = []
    chunk = max(1, (1 << 22) // (2 * span + 1))
    for start in range(1, cap + 1, chunk):
        k1v = np.arange(start, min(start + chunk, cap + 1), dtype=np.int64)
        mask = np.gcd.outer(k1v, np.abs(k2)) == 1
        ri, ci = np.nonzero(mask)
        parts.append(k2[ci].astype(np.int32))
        counts[start:start + len(k1v)] = np.bincount(ri, minlength=len(k1v))
    table = np.concatenate(parts) if parts else np.zeros(0, dtype=np.int32)
    offsets = np.zeros(cap + 2, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    return offsets, table


@njit(cache=True, inline="always")
def _phi_kernel(th, tab32, win, even_coef, odd_coef, g):
    """phi on [0, 1): f32 linear lookup in the bulk, exact series near 0."""
    if th < win or th > 1.0 - win:
        tt = th - 1.0 if th > 0.5 else th
        y = tt * tt
        a = 0.0
        for j in range(even_coef.shape[0] - 1, -1, -1):
            a = a * y + even_coef[j]
        b = 0.0
        for j in range(odd_coef.shape[0] - 1, -1, -1):
            b = b * y + odd_coef[j]
        val = _INV_SQRT2 * (tt * b - a)
        if tt > 0.0:
            val += _CUSP * math.sqrt(tt)
        return val
    s = th * g
    j = np.int64(s)
    f = s - j
    return (1.0 - f) * np.float64(tab32[j]) + f * np.float64(tab32[j + 1])


@njit(cache=True)
def limit_draws_kernel(n1, n2, x2a, keys, cutoff, mode,
                       offsets, table_k2, cap,
                       tab32, win, even_coef, odd_coef, out):
    """Weighted prime-vector sums sum_k z_k / ||v_k||^(3/2) per draw.

    Weight modes: 0 draws z = phi(U), 1 draws a Rademacher sign.  The
    uniform U of index (k1, k2) comes from the same key chain as the
    scalar path: uniform(index_key(draw_key, k1, k2), 0).
    """
    g = tab32.shape[0] - 2
    a2 = cutoff * cutoff
    for i in range(n1.shape[0]):
        x1 = n1[i] * n1[i]
        x3 = n2[i] * n2[i]
        x2 = x2a[i]
        key = keys[i]
        acc = 0.0

        if x3 <= a2 * (1.0 + 1e-15):
            u = _uniform(_index_key(key, 0, 1), 0)
            if mode == 0:
                z = _phi_kernel(u, tab32, win, even_coef, odd_coef, g)
            else:
                z = 1.0 if u < 0.5 else -1.0
            nrm = n2[i]
            acc += z / (nrm * math.sqrt(nrm))

        k1_max = np.int64(math.floor(cutoff * n2[i] + 1e-9))
        for k1 in range(1, k1_max + 1):
            fk1 = np.float64(k1)
            disc = a2 * x3 - fk1 * fk1
            if disc < 0.0:
                continue
            rt = math.sqrt(disc)
            lo = np.int64(math.ceil((-fk1 * x2 - rt) / x3 - 1e-12))
            hi = np.int64(math.floor((-fk1 * x2 + rt) / x3 + 1e-12))
            if hi < lo:
                continue
            if k1 <= cap:
                s0 = offsets[k1]
                s1 = offsets[k1 + 1]
                row_end = s1
                while s0 < s1:
                    mid = (s0 + s1) >> 1
                    if table_k2[mid] < lo:
                        s0 = mid + 1
                    else:
                        s1 = mid
                jj = s0
                while jj < row_end and table_k2[jj] <= hi:
                    k2 = np.int64(table_k2[jj])
                    jj += 1
                    fk2 = np.float64(k2)
                    q = (x3 * fk2 + 2.0 * fk1 * x2) * fk2 + fk1 * fk1 * x1
                    if q > a2 * (1.0 + 1e-15):
                        continue
                    nrm = math.sqrt(q)
                    u = _uniform(_index_key(key, k1, k2), 0)
                    if mode == 0:
                        z = _phi_kernel(u, tab32, win, even_coef, odd_coef, g)
                    else:
                        z = 1.0 if u < 0.5 else -1.0
                    acc += z / (nrm * math.sqrt(nrm))
            else:
                for k2 in range(lo, hi + 1):
                    ak2 = k2 if k2 >= 0 else -k2
                    if _gcd(k1, ak2) != 1:
                        continue
                    fk2 = np.float64(k2)
                    q = (x3 * fk2 + 2.0 * fk1 * x2) * fk2 + fk1 * fk1 * x1
                    if q > a2 * (1.0 + 1e-15):
                        continue
                    nrm = math.sqrt(q)
                    u = _uniform(_index_key(key, k1, k2), 0)
                    if mode == 0:
                        z = _phi_kernel(u, tab32, win, even_coef, odd_coef, g)
                    else:
                        z = 1.0 if u < 0.5 else -1.0
                    acc += z / (nrm * math.sqrt(nrm))
        out[i] = acc
