"""Generate the frozen direct-summation oracle for phi.

phi(theta) = sum_{m >= 1} cos(2 pi m theta - 3 pi / 4) / m^(3/2).

The oracle sums the series directly to an adaptive term count M(theta)
chosen so that the summation-by-parts tail bound

    |sum_{m > M}| <= (M + 1)^(-3/2) / |sin(pi theta)|

falls below TOL = 1e-9.  Evaluation points are seeded uniforms on
[0, 1); the rare points (about 0.3%) whose certified M would exceed
M_CAP sit too close to the cusp at 0 for a direct-summation certificate
and are skipped (the cusp neighborhood is covered by closed-form
endpoint values and the series evaluator's own error bound).

Output: tests/data/phi_oracle.npz with arrays theta, value, m_used and
scalars tol, seed.  Deterministic; rerunning reproduces the file.

Usage: python3 tools/gen_phi_oracle.py [--n 1000] [--out tests/data/phi_oracle.npz]
"""

from __future__ import annotations

import argparse
import math
import pathlib
import sys

import numpy as np

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from latfluct.rng import derive_key, uniform_array  # noqa: E402

TOL = 1e-9
M_CAP = 20_000_000
SEED = 20260814
_DOM_ORACLE = 0x4F524143
_PHASE = -0.75 * math.pi
_CHUNK = 1 << 21


def required_terms(theta: float) -> int:
    s = abs(math.sin(math.pi * theta))
    if s == 0.0:
        return M_CAP + 1
    return int(math.ceil((1.0 / (TOL * s)) ** (2.0 / 3.0)))


def direct_phi(theta: float, m_max: int) -> float:
    total = 0.0
    for lo in range(1, m_max + 1, _CHUNK):
        m = np.arange(lo, min(lo + _CHUNK, m_max + 1), dtype=float)
        phase = m * theta
        phase -= np.floor(phase)
        total += float(np.dot(np.cos((2.0 * math.pi) * phase + _PHASE),
                              m ** -1.5))
    return total


def generate(n: int):
    key = derive_key(_DOM_ORACLE, SEED, 0)
    thetas, values, m_used = [], [], []
    counter = 0
    while len(thetas) < n:
        batch = uniform_array(key, np.arange(counter, counter + 256,
                                             dtype=np.int64))
        counter += 256
        for theta in batch:
            if len(thetas) >= n:
                break
            m_req = required_terms(float(theta))
            if m_req > M_CAP:
                continue
            thetas.append(float(theta))
            m_used.append(m_req)
            values.append(direct_phi(float(theta), m_req))
    return (np.array(thetas), np.array(values),
            np.array(m_used, dtype=np.int64))


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=1000)
    parser.add_argument("--out", default=str(
        pathlib.Path(__file__).resolve().parents[1]
        / "tests" / "data" / "phi_oracle.npz"))
    args = parser.parse_args()

    theta, value, m_used = generate(args.n)
    np.savez(args.out, theta=theta, value=value, m_used=m_used,
             tol=np.array(TOL), seed=np.array(SEED, dtype=np.uint64))
    print(f"wrote {args.out}: {len(theta)} points, "
          f"total terms {int(m_used.sum())}, max M {int(m_used.max())}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
