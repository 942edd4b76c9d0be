"""Unimodular planar lattices: bases, reduction, duality, prime vectors.

A lattice L = M Z^2 is described by a basis matrix M with columns as
generators and det M = 1, so the covolume is 1 throughout.  The reduced
frame (e1, e2) realizes the successive minima n1 <= n2 of L; in two
dimensions Lagrange-Gauss reduction produces it exactly.  Prime (primitive)
vectors are indexed by coprime integer pairs; the half set

    Pi = {(k1, k2): gcd(k1, k2) = 1, k1 >= 0, and k1 = 0 implies k2 = 1}

holds exactly one representative per +-pair, with k |-> k1 e1 + k2 e2.

Sign conventions for the frame: each e_i is flipped so its first coordinate
is positive.  When a first coordinate vanishes (to 1e-12 relative) the
second is made positive instead, and when distinct candidate vectors tie in
norm (to 1e-12 relative) the one with the larger first coordinate wins,
then the smaller second coordinate.  Either event sets ``tie_broken``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation, InvariantViolation

DET_TOL = 1e-12
FRAME_DET_TOL = 1e-9
TIE_REL_TOL = 1e-12
_REDUCE_MAX_ITER = 128


@dataclass(frozen=True)
class Basis2:
    """Basis of a unimodular planar lattice; columns (b11,b21), (b12,b22)."""

    b11: float
    b12: float
    b21: float
    b22: float

    def __post_init__(self):
        vals = (self.b11, self.b12, self.b21, self.b22)
        if not all(math.isfinite(v) for v in vals):
            raise ContractViolation("basis entries must be finite")
        if abs(self.det - 1.0) > DET_TOL:
            raise ContractViolation(
                f"basis determinant {self.det!r} is not 1 within {DET_TOL}"
            )

    @property
    def det(self) -> float:
        return self.b11 * self.b22 - self.b12 * self.b21

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.b11, self.b12], [self.b21, self.b22]])

    @property
    def generators(self) -> tuple[tuple[float, float], tuple[float, float]]:
        return (self.b11, self.b21), (self.b12, self.b22)

    @classmethod
    def from_matrix(cls, m) -> "Basis2":
        m = np.asarray(m, dtype=float)
        return cls(b11=float(m[0, 0]), b12=float(m[0, 1]),
                   b21=float(m[1, 0]), b22=float(m[1, 1]))

    @classmethod
    def identity(cls) -> "Basis2":
        return cls(1.0, 0.0, 0.0, 1.0)


@dataclass(frozen=True)
class ReducedFrame:
    """Canonical reduced basis: e1, e2 realize the successive minima."""

    e1: tuple[float, float]
    e2: tuple[float, float]
    n1: float
    n2: float
    tie_broken: bool

    def __post_init__(self):
        if self.n1 > self.n2 * (1.0 + TIE_REL_TOL):
            raise InvariantViolation("frame norms out of order")
        d = abs(self.det)
        if abs(d - 1.0) > FRAME_DET_TOL:
            raise InvariantViolation(f"frame |det| = {d!r} is not 1 within {FRAME_DET_TOL}")

    @property
    def det(self) -> float:
        return self.e1[0] * self.e2[1] - self.e1[1] * self.e2[0]

    def vector(self, k1: int, k2: int) -> tuple[float, float]:
        """The lattice vector k1 e1 + k2 e2."""
        return (k1 * self.e1[0] + k2 * self.e2[0],
                k1 * self.e1[1] + k2 * self.e2[1])

    def vector_norm(self, k1: int, k2: int) -> float:
        vx, vy = self.vector(k1, k2)
        return math.sqrt(vx * vx + vy * vy)


@dataclass(frozen=True)
class PrimeIndex:
    """Coprime coordinate pair indexing one +-pair of prime vectors."""

    k1: int
    k2: int

    def __post_init__(self):
        if self.k1 == 0 and self.k2 == 0:
            raise ContractViolation("(0, 0) indexes no vector")
        if math.gcd(self.k1, self.k2) != 1:
            raise ContractViolation(f"({self.k1}, {self.k2}) is not coprime")
        if self.k1 < 0:
            raise ContractViolation("k1 must be >= 0")
        if self.k1 == 0 and self.k2 != 1:
            raise ContractViolation("k1 = 0 requires k2 = 1")


@dataclass(frozen=True)
class ShapeCoords:
    """Frame shape coordinates.

    X1 = n1^2, X2 = <e1, e2>, X3 = n2^2, X4 = cot(alpha) with alpha the
    oriented angle from the positive x-axis to e1, and sign_beta the sign of
    the oriented angle from e1 to e2 (the sign of det(e1, e2)).  Unimodularity
    forces X1 X3 = 1 + X2^2.  When e1 lies on the positive x-axis cot(alpha)
    is infinite; ``axis_degenerate`` marks that case and X4 is +inf.
    """

    X1: float
    X2: float
    X3: float
    X4: float
    sign_beta: int
    axis_degenerate: bool = False


def is_prime_vector(k1: int, k2: int) -> bool:
    """True iff (k1, k2) are the coordinates of a primitive lattice vector."""
    if k1 == 0 and k2 == 0:
        raise ValueError("(0, 0) is not a lattice direction")
    return math.gcd(k1, k2) == 1


def dual(basis: Basis2) -> Basis2:
    """Dual lattice basis: the inverse transpose (exact coordinate shuffle).

    For det = 1 the inverse transpose of [[b11,b12],[b21,b22]] is
    [[b22,-b21],[-b12,b11]], so duality is involutive bit for bit.
    """
    return Basis2(b11=basis.b22, b12=-basis.b21, b21=-basis.b12, b22=basis.b11)


def dual_stack(bases: np.ndarray) -> np.ndarray:
    """dual() applied entrywise to a stack of basis matrices (n, 2, 2)."""
    bases = np.asarray(bases, dtype=float)
    out = np.empty_like(bases)
    out[:, 0, 0] = bases[:, 1, 1]
    out[:, 0, 1] = -bases[:, 1, 0]
    out[:, 1, 0] = -bases[:, 0, 1]
    out[:, 1, 1] = bases[:, 0, 0]
    return out


def _norm_sq(v: tuple[float, float]) -> float:
    return v[0] * v[0] + v[1] * v[1]


def _reduce_pair(u, v):
    """Lagrange-Gauss loop: returns a size-reduced pair with |u| <= |v|."""
    if _norm_sq(u) > _norm_sq(v):
        u, v = v, u
    for _ in range(_REDUCE_MAX_ITER):
        m = round((u[0] * v[0] + u[1] * v[1]) / _norm_sq(u))
        v = (v[0] - m * u[0], v[1] - m * u[1])
        if _norm_sq(v) < _norm_sq(u):
            u, v = v, u
        else:
            return u, v
    raise InvariantViolation("reduction did not terminate")


# candidate coefficient pairs (one per +-class) scanned for tie handling;
# after reduction every vector achieving n1 or n2 lies in this span
_TIE_PAIRS = ((0, 1), (1, -2), (1, -1), (1, 0), (1, 1), (1, 2), (2, -1), (2, 1))


def _canonical_sign(v, n):
    """Flip v so the first coordinate is positive; returns (v, axis_flag)."""
    tol = TIE_REL_TOL * n
    if v[0] > tol:
        return v, False
    if v[0] < -tol:
        return (-v[0], -v[1]), False
    # first coordinate vanishes: orient by the second
    if v[1] < 0.0:
        return (-v[0], -v[1]), True
    return v, True


def _pick_min(cands):
    """Minimal-norm candidate; ties prefer larger x then smaller y."""
    best = None
    best_n = math.inf
    best_axis = False
    tied = False
    for v, n, axis_flag in cands:
        if n < best_n * (1.0 - TIE_REL_TOL):
            best, best_n, best_axis = v, n, axis_flag
            tied = False
        elif n <= best_n * (1.0 + TIE_REL_TOL):
            tied = True
            tol = TIE_REL_TOL * best_n
            if (v[0] > best[0] + tol) or (abs(v[0] - best[0]) <= tol and v[1] < best[1] - tol):
                best, best_n, best_axis = v, n, axis_flag
    return best, best_n, tied, best_axis


def gauss_reduce(basis: Basis2) -> ReducedFrame:
    """Reduced frame of the lattice spanned by the basis columns.

    Lagrange-Gauss reduction realizes the successive minima exactly in 2-D;
    the candidate scan afterwards resolves norm ties and sign conventions
    deterministically (see the module docstring).
    """
    g1, g2 = basis.generators
    u, v = _reduce_pair(g1, g2)

    cands = []
    for a, b in _TIE_PAIRS:
        w = (a * u[0] + b * v[0], a * u[1] + b * v[1])
        n = math.sqrt(w[0] * w[0] + w[1] * w[1])
        w, axis_flag = _canonical_sign(w, n)
        cands.append((w, n, axis_flag))

    e1, n1, tied1, axis1 = _pick_min(cands)
    # second minimum: independent of e1 (nonzero cross product)
    indep = []
    for w, n, axis_flag in cands:
        cross = e1[0] * w[1] - e1[1] * w[0]
        if abs(cross) > 0.5:  # integer multiple of det: either 0 or >= 1
            indep.append((w, n, axis_flag))
    e2, n2, tied2, axis2 = _pick_min(indep)

    tie_broken = tied1 or tied2 or axis1 or axis2
    return ReducedFrame(e1=e1, e2=e2, n1=n1, n2=n2, tie_broken=tie_broken)


def shape_coords(frame: ReducedFrame) -> ShapeCoords:
    """Shape coordinates of a reduced frame (see ShapeCoords)."""
    e1, e2 = frame.e1, frame.e2
    x1 = frame.n1 * frame.n1
    x2 = e1[0] * e2[0] + e1[1] * e2[1]
    x3 = frame.n2 * frame.n2
    cross = e1[0] * e2[1] - e1[1] * e2[0]
    sign_beta = 1 if cross > 0 else -1
    if abs(e1[1]) <= TIE_REL_TOL * frame.n1:
        return ShapeCoords(X1=x1, X2=x2, X3=x3, X4=math.inf,
                           sign_beta=sign_beta, axis_degenerate=True)
    return ShapeCoords(X1=x1, X2=x2, X3=x3, X4=e1[0] / e1[1], sign_beta=sign_beta)


def _prime_entries(frame: ReducedFrame, cutoff: float):
    """Arrays (k1, k2, norm, q) of all prime indices with norm <= cutoff.

    q is the quadratic-form value norm^2 exactly as tested against
    cutoff^2 * (1 + 1e-15); callers re-filtering a larger enumeration by
    q against a smaller cutoff recover that cutoff's membership exactly.
    Sorted by norm ascending, ties by (k1, k2) lexicographic.
    """
    if not (cutoff >= 0.0 and math.isfinite(cutoff)):
        raise ValueError("cutoff must be finite and >= 0")
    x1 = frame.n1 * frame.n1
    x2 = frame.e1[0] * frame.e2[0] + frame.e1[1] * frame.e2[1]
    x3 = frame.n2 * frame.n2
    a2 = cutoff * cutoff

    k1s, k2s, norms, qs = [], [], [], []
    # k1 = 0 row: only (0, 1)
    if x3 <= a2 * (1.0 + 1e-15):
        k1s.append(0)
        k2s.append(1)
        norms.append(frame.n2)
        qs.append(x3)
    k1_max = int(math.floor(cutoff * frame.n2 + 1e-9))
    for k1 in range(1, k1_max + 1):
        disc = a2 * x3 - float(k1) * k1  # row feasibility discriminant, det 1
        if disc < 0.0:
            continue
        rt = math.sqrt(disc)
        lo = int(math.ceil((-k1 * x2 - rt) / x3 - 1e-12))
        hi = int(math.floor((-k1 * x2 + rt) / x3 + 1e-12))
        if hi < lo:
            continue
        k2 = np.arange(lo, hi + 1, dtype=np.int64)
        k2 = k2[np.gcd(k1, np.abs(k2)) == 1]
        if len(k2) == 0:
            continue
        q = (x3 * k2 + 2.0 * k1 * x2) * k2 + float(k1) * k1 * x1
        keep = q <= a2 * (1.0 + 1e-15)
        k2 = k2[keep]
        q = q[keep]
        nrm = np.sqrt(q)
        k1s.extend([k1] * len(k2))
        k2s.extend(int(t) for t in k2)
        norms.extend(float(t) for t in nrm)
        qs.extend(float(t) for t in q)

    k1a = np.asarray(k1s, dtype=np.int64)
    k2a = np.asarray(k2s, dtype=np.int64)
    na = np.asarray(norms, dtype=np.float64)
    qa = np.asarray(qs, dtype=np.float64)
    order = np.lexsort((k2a, k1a, na)) if k1s else np.array([], dtype=np.int64)
    return k1a[order], k2a[order], na[order], qa[order]


def enumerate_prime_indices(frame: ReducedFrame, cutoff: float):
    """All (PrimeIndex, norm) with ||k1 e1 + k2 e2|| <= cutoff.

    Sorted by norm ascending, ties by (k1, k2) lexicographic.  The scan walks
    k1 = 0 .. cutoff * n2 and solves the norm quadratic for the k2 interval,
    so the work is O(cutoff^2) candidates independent of the lattice shape.
    """
    k1a, k2a, norms, _ = _prime_entries(frame, cutoff)
    return [(PrimeIndex(int(k1a[i]), int(k2a[i])), float(norms[i]))
            for i in range(len(k1a))]


# ---------------------------------------------------------------------------
# batch path


@dataclass(frozen=True)
class FrameBatch:
    """Struct-of-arrays reduced frames for n lattices."""

    e1: np.ndarray  # (n, 2)
    e2: np.ndarray  # (n, 2)
    n1: np.ndarray  # (n,)
    n2: np.ndarray  # (n,)
    tie_broken: np.ndarray  # (n,) bool

    def __len__(self) -> int:
        return len(self.n1)

    @property
    def X1(self) -> np.ndarray:
        return self.n1 * self.n1

    @property
    def X2(self) -> np.ndarray:
        return self.e1[:, 0] * self.e2[:, 0] + self.e1[:, 1] * self.e2[:, 1]

    @property
    def X3(self) -> np.ndarray:
        return self.n2 * self.n2

    def frame(self, i: int) -> ReducedFrame:
        return ReducedFrame(
            e1=(float(self.e1[i, 0]), float(self.e1[i, 1])),
            e2=(float(self.e2[i, 0]), float(self.e2[i, 1])),
            n1=float(self.n1[i]), n2=float(self.n2[i]),
            tie_broken=bool(self.tie_broken[i]),
        )


def reduce_batch(bases: np.ndarray) -> FrameBatch:
    """Vectorized gauss_reduce over a stack of basis matrices (n, 2, 2).

    The fast path mirrors the scalar algorithm; rows where a tie or an axis
    case is detected are recomputed through the scalar path so that the
    canonical tie handling is identical bit for bit.
    """
    bases = np.asarray(bases, dtype=float)
    u = bases[:, :, 0].copy()
    v = bases[:, :, 1].copy()

    nu = np.einsum("ij,ij->i", u, u)
    nv = np.einsum("ij,ij->i", v, v)
    swap = nu > nv
    u[swap], v[swap] = v[swap], u[swap].copy()

    active = np.ones(len(u), dtype=bool)
    for _ in range(_REDUCE_MAX_ITER):
        if not active.any():
            break
        ua, va = u[active], v[active]
        uu = np.einsum("ij,ij->i", ua, ua)
        m = np.round(np.einsum("ij,ij->i", ua, va) / uu)
        va = va - m[:, None] * ua
        smaller = np.einsum("ij,ij->i", va, va) < uu
        new_u = np.where(smaller[:, None], va, ua)
        new_v = np.where(smaller[:, None], ua, va)
        u[active], v[active] = new_u, new_v
        idx = np.flatnonzero(active)
        active[idx[~smaller]] = False
    else:
        raise InvariantViolation("batch reduction did not terminate")

    n1 = np.sqrt(u[:, 0] * u[:, 0] + u[:, 1] * u[:, 1])
    n2 = np.sqrt(v[:, 0] * v[:, 0] + v[:, 1] * v[:, 1])

    # tie detection: equal minima, near-axis vectors, or |<u,v>| ~ |u|^2/2
    # (then v and v -+ u tie for the second minimum)
    udotv = np.einsum("ij,ij->i", u, v)
    near = TIE_REL_TOL * 8.0
    ties = (np.abs(n2 - n1) <= near * n2)
    ties |= np.abs(u[:, 0]) <= near * n1
    ties |= np.abs(v[:, 0]) <= near * n2
    ties |= np.abs(np.abs(udotv) - 0.5 * n1 * n1) <= near * n1 * n1

    flip_u = u[:, 0] < 0.0
    u[flip_u] = -u[flip_u]
    flip_v = v[:, 0] < 0.0
    v[flip_v] = -v[flip_v]

    tie_broken = np.zeros(len(u), dtype=bool)
    for i in np.flatnonzero(ties):
        f = gauss_reduce(Basis2.from_matrix(bases[i]))
        u[i] = f.e1
        v[i] = f.e2
        n1[i] = f.n1
        n2[i] = f.n2
        tie_broken[i] = f.tie_broken

    return FrameBatch(e1=u, e2=v, n1=n1, n2=n2, tie_broken=tie_broken)
