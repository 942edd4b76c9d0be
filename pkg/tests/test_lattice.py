"""Reduction, duality, prime indices, and shape coordinates of unimodular lattices."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latfluct import (Basis2, ContractViolation, FrameBatch, PrimeIndex,
                      ReducedFrame, SamplerConfig, dual, dual_stack,
                      enumerate_prime_indices, gauss_reduce, is_prime_vector,
                      reduce_batch, sample_haar_batch, shape_coords)

import oracles


def basis_from_columns(col1, col2) -> Basis2:
    return Basis2(b11=col1[0], b12=col2[0], b21=col1[1], b22=col2[1])


def iwasawa_matrix(rng: np.random.Generator) -> np.ndarray:
    """Rotation times shear times diagonal: det 1 up to roundoff, mild shape."""
    x = rng.uniform(-0.5, 0.5)
    y = rng.uniform(0.5, 2.2)
    w = rng.uniform(0.0, 2.0 * math.pi)
    sy = math.sqrt(y)
    m = np.array([[math.cos(w), -math.sin(w)], [math.sin(w), math.cos(w)]])
    return m @ np.array([[1.0, x], [0.0, 1.0]]) @ np.array([[sy, 0.0],
                                                            [0.0, 1.0 / sy]])


def shear_word(rng: np.random.Generator, kmax: int = 5) -> np.ndarray:
    """One integer shear (or the identity): exact det 1, small entries."""
    k = int(rng.integers(-kmax, kmax + 1))
    if rng.uniform() < 0.5:
        return np.array([[1.0, k], [0.0, 1.0]])
    return np.array([[1.0, 0.0], [k, 1.0]])


def random_unimodular(rng: np.random.Generator) -> Basis2:
    """A mildly skewed unimodular basis (entries stay small enough that the
    determinant survives roundoff and minima live in a small coefficient box)."""
    return Basis2.from_matrix(iwasawa_matrix(rng) @ shear_word(rng))


# ---------------------------------------------------------------------------
# Basis2 and dual


def test_basis_rejects_non_unimodular():
    with pytest.raises(ContractViolation):
        Basis2(b11=2.0, b12=0.0, b21=0.0, b22=1.0)


def test_basis_accessors():
    b = basis_from_columns((1.0, 0.0), (0.3, 1.0))
    assert b.det == pytest.approx(1.0, abs=1e-15)
    assert np.array_equal(b.matrix, np.array([[1.0, 0.3], [0.0, 1.0]]))
    assert b.generators == ((1.0, 0.0), (0.3, 1.0))
    assert Basis2.identity().matrix.tolist() == [[1.0, 0.0], [0.0, 1.0]]


def test_dual_of_diagonal():
    b = basis_from_columns((2.0, 0.0), (0.0, 0.5))
    d = dual(b)
    assert d.generators == ((0.5, 0.0), (0.0, 2.0))


def test_dual_of_shear():
    b = basis_from_columns((1.0, 0.0), (1.0, 1.0))
    d = dual(b)
    assert d.generators == ((1.0, -1.0), (0.0, 1.0))


def test_dual_is_involutive_bitwise():
    rng = np.random.default_rng(7)
    for _ in range(50):
        b = random_unimodular(rng)
        bb = dual(dual(b))
        assert bb.matrix.tolist() == b.matrix.tolist()


def test_dual_pairings_are_integers():
    rng = np.random.default_rng(11)
    for _ in range(20):
        b = random_unimodular(rng)
        d = dual(b)
        for n in range(-5, 6):
            for m in range(-5, 6):
                v = n * np.array(b.generators[0]) + m * np.array(b.generators[1])
                for w_raw in d.generators:
                    w = np.array(w_raw)
                    pairing = float(v @ w)
                    assert abs(pairing - round(pairing)) < 1e-9


def test_dual_stack_matches_scalar():
    rng = np.random.default_rng(3)
    bases = np.stack([random_unimodular(rng).matrix for _ in range(40)])
    duals = dual_stack(bases)
    for i in range(len(bases)):
        expect = dual(Basis2.from_matrix(bases[i])).matrix
        assert np.array_equal(duals[i], expect)


# ---------------------------------------------------------------------------
# gauss_reduce examples


def test_reduce_identity_tie_break():
    f = gauss_reduce(Basis2.identity())
    assert f.tie_broken
    assert f.e1 == (1.0, 0.0)
    assert f.e2 == (0.0, 1.0)
    assert f.n1 == 1.0 and f.n2 == 1.0


def test_reduce_mild_shear_already_reduced():
    f = gauss_reduce(basis_from_columns((1.0, 0.0), (0.3, 1.0)))
    assert f.e1 == (1.0, 0.0)
    assert f.e2 == (0.3, 1.0)
    assert f.n2 == pytest.approx(math.sqrt(1.09), rel=1e-15)
    assert not f.tie_broken


def test_reduce_swaps_to_shorter_column():
    f = gauss_reduce(basis_from_columns((10.0, 0.0), (0.0, 0.1)))
    assert f.e1 == (0.0, 0.1)
    assert f.e2 == (10.0, 0.0)
    assert f.n1 == pytest.approx(0.1) and f.n2 == pytest.approx(10.0)


def test_reduce_matches_brute_minima_bulk():
    rng = np.random.default_rng(20260814)
    for _ in range(10_000):
        b = random_unimodular(rng)
        f = gauss_reduce(b)
        n1, n2 = oracles.brute_minima(b.matrix, coeff_bound=25)
        assert f.n1 == pytest.approx(n1, rel=1e-9)
        assert f.n2 == pytest.approx(n2, rel=1e-9)


def test_reduced_frame_contract():
    rng = np.random.default_rng(5)
    for _ in range(200):
        f = gauss_reduce(random_unimodular(rng))
        assert f.n1 <= f.n2 * (1.0 + 1e-12)
        assert f.n1 * f.n2 >= 1.0 - 1e-12
        # reduced angle condition: |<e1, e2>| <= ||e1||^2 / 2
        inner = f.e1[0] * f.e2[0] + f.e1[1] * f.e2[1]
        assert abs(inner) <= 0.5 * f.n1 * f.n1 * (1.0 + 1e-9)
        # orientation is not canonicalized, only unimodularity
        assert abs(f.det) == pytest.approx(1.0, abs=1e-9)


@given(st.integers(0, 2 ** 32 - 1))
@settings(max_examples=60, deadline=None)
def test_reduce_is_lattice_invariant(seed):
    rng = np.random.default_rng(seed)
    # two different integer-shear images of one lattice share their minima
    a = iwasawa_matrix(rng)
    f0 = gauss_reduce(Basis2.from_matrix(a @ shear_word(rng)))
    f1 = gauss_reduce(Basis2.from_matrix(a @ shear_word(rng)))
    assert f1.n1 == pytest.approx(f0.n1, rel=1e-9)
    assert f1.n2 == pytest.approx(f0.n2, rel=1e-9)


def test_frame_vector_and_norm():
    f = gauss_reduce(basis_from_columns((1.0, 0.0), (0.3, 1.0)))
    v = f.vector(2, -1)
    assert v == (2.0 * 1.0 - 0.3, -1.0)
    assert f.vector_norm(2, -1) == pytest.approx(math.hypot(*v), rel=1e-15)


def test_reduce_batch_matches_scalar_bitwise():
    bases = sample_haar_batch(SamplerConfig(master_seed=99, stream_index=0), 300)
    batch = reduce_batch(bases)
    assert isinstance(batch, FrameBatch)
    for i in range(len(batch)):
        f = gauss_reduce(Basis2.from_matrix(bases[i]))
        g = batch.frame(i)
        assert g.e1 == f.e1 and g.e2 == f.e2
        assert g.n1 == f.n1 and g.n2 == f.n2
        assert g.tie_broken == f.tie_broken


# ---------------------------------------------------------------------------
# prime vectors and indices


def test_is_prime_vector_examples():
    assert not is_prime_vector(2, 4)
    assert is_prime_vector(3, 5)
    assert is_prime_vector(0, -1)  # primitive vector, yet not in the half set
    with pytest.raises(ValueError):
        is_prime_vector(0, 0)


def test_prime_index_half_set_constraints():
    assert PrimeIndex(0, 1).k2 == 1
    assert PrimeIndex(3, -2).k1 == 3
    with pytest.raises(ValueError):
        PrimeIndex(0, -1)
    with pytest.raises(ValueError):
        PrimeIndex(-1, 2)
    with pytest.raises(ValueError):
        PrimeIndex(2, 4)
    with pytest.raises(ValueError):
        PrimeIndex(0, 0)


@given(k1=st.integers(-40, 40), k2=st.integers(-40, 40))
@settings(max_examples=300, deadline=None)
def test_is_prime_vector_equals_gcd_one(k1, k2):
    if k1 == 0 and k2 == 0:
        with pytest.raises(ValueError):
            is_prime_vector(k1, k2)
    else:
        assert is_prime_vector(k1, k2) == (math.gcd(k1, k2) == 1)


def square_frame() -> ReducedFrame:
    return gauss_reduce(Basis2.identity())


def test_enumerate_square_lattice_unit_cutoff():
    got = [(k.k1, k.k2) for k, _ in enumerate_prime_indices(square_frame(), 1.0)]
    assert got == [(0, 1), (1, 0)]


def test_enumerate_square_lattice_cutoff_1_5():
    entries = enumerate_prime_indices(square_frame(), 1.5)
    assert [(k.k1, k.k2) for k, _ in entries] == [(0, 1), (1, 0), (1, -1), (1, 1)]
    norms = [n for _, n in entries]
    assert norms == pytest.approx([1.0, 1.0, math.sqrt(2), math.sqrt(2)])


def test_enumerate_below_shortest_vector_is_empty():
    f = square_frame()
    assert enumerate_prime_indices(f, 0.5) == []


def test_enumerate_sorted_and_monotone():
    rng = np.random.default_rng(17)
    for _ in range(20):
        f = gauss_reduce(random_unimodular(rng))
        small = enumerate_prime_indices(f, 4.0)
        large = enumerate_prime_indices(f, 7.5)
        keys_small = [(k.k1, k.k2) for k, _ in small]
        keys_large = [(k.k1, k.k2) for k, _ in large]
        # sorted by norm, ties by lexicographic index
        tagged = [(n, k.k1, k.k2) for k, n in large]
        assert tagged == sorted(tagged)
        # monotone: a larger cutoff extends, never edits
        assert set(keys_small) <= set(keys_large)
        assert keys_large[:len(keys_small)] == keys_small


def test_enumerate_matches_direct_double_loop():
    rng = np.random.default_rng(23)
    for _ in range(12):
        f = gauss_reduce(random_unimodular(rng))
        for cutoff in (2.5, 6.0):
            got = [(k.k1, k.k2) for k, _ in enumerate_prime_indices(f, cutoff)]
            want = [(a, b) for a, b, _ in oracles.prime_pairs_in_disk(f, cutoff)]
            assert got == want


def test_enumerate_coefficient_bounds():
    rng = np.random.default_rng(29)
    for _ in range(10):
        f = gauss_reduce(random_unimodular(rng))
        cutoff = 5.0
        for k, norm in enumerate_prime_indices(f, cutoff):
            assert norm <= cutoff * (1.0 + 1e-12)
            assert abs(k.k1) <= cutoff * f.n2 + 1e-9
            assert abs(k.k2) <= cutoff * f.n1 + 1e-9


def test_enumerate_norms_match_frame():
    f = gauss_reduce(basis_from_columns((1.0, 0.0), (0.3, 1.0)))
    for k, norm in enumerate_prime_indices(f, 3.0):
        assert norm == pytest.approx(f.vector_norm(k.k1, k.k2), rel=1e-14)


# ---------------------------------------------------------------------------
# shape coordinates


def test_shape_identity_unimodular():
    rng = np.random.default_rng(31)
    for _ in range(100):
        f = gauss_reduce(random_unimodular(rng))
        c = shape_coords(f)
        assert c.X1 * c.X3 == pytest.approx(1.0 + c.X2 * c.X2, rel=1e-9)
        assert c.X1 == pytest.approx(f.n1 ** 2, rel=1e-15)
        assert c.X3 == pytest.approx(f.n2 ** 2, rel=1e-15)
        assert c.sign_beta in (-1, 1)
        cross = f.e1[0] * f.e2[1] - f.e1[1] * f.e2[0]
        assert c.sign_beta == (1 if cross > 0 else -1)


def test_shape_cotangent_matches_angle():
    rng = np.random.default_rng(37)
    for _ in range(100):
        f = gauss_reduce(random_unimodular(rng))
        c = shape_coords(f)
        if c.axis_degenerate:
            assert math.isinf(c.X4)
            continue
        alpha = math.atan2(f.e1[1], f.e1[0])
        assert c.X4 == pytest.approx(1.0 / math.tan(alpha), rel=1e-9)


def test_shape_degenerate_axis_marker():
    c = shape_coords(gauss_reduce(Basis2.identity()))
    assert c.axis_degenerate
    assert math.isinf(c.X4)
    assert c.X1 == 1.0 and c.X3 == 1.0 and c.X2 == 0.0
