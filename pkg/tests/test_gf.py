import numpy as np
import pytest

from coded_pir import gf


# --- rank ---------------------------------------------------------------


def test_rank_identity():
    assert gf.mat_rank(np.eye(3, dtype=np.int64), 7) == 3


def test_rank_zero_matrix():
    assert gf.mat_rank(np.zeros((2, 2), dtype=np.int64), 7) == 0


def test_rank_tall_vandermonde_mod5():
    # Rows (1,1),(1,2),(1,3),(1,4): first two rows already independent,
    # and only two columns exist, so the rank is exactly 2.
    a = [[1, 1], [1, 2], [1, 3], [1, 4]]
    assert gf.mat_rank(a, 5) == 2


def test_rank_transpose_agrees():
    rng = gf.FieldRng(123, 13)
    for _ in range(25):
        a = rng.matrix(4, 6)
        assert gf.mat_rank(a, 13) == gf.mat_rank(a.T, 13)


def test_rank_counts_dependent_rows():
    a = np.array([[1, 2, 3], [2, 4, 6], [0, 1, 1]], dtype=np.int64)  # row1 = 2*row0 mod 7
    assert gf.mat_rank(a, 7) == 2


# --- solve / inverse ------------------------------------------------------


def test_solve_identity_returns_rhs():
    b = np.array([[3, 1], [4, 1]], dtype=np.int64)
    x = gf.mat_solve(np.eye(2, dtype=np.int64), b, 5)
    assert np.array_equal(x, b)


def test_solve_two_by_two_mod5():
    x = gf.mat_solve([[1, 1], [1, 2]], [3, 4], 5)
    assert x.tolist() == [2, 1]


def test_solve_rank_deficient_inconsistent():
    with pytest.raises(gf.NoSolution):
        gf.mat_solve([[1, 1], [2, 2]], [1, 0], 5)


def test_solve_rank_deficient_consistent_still_rejected():
    # Underdetermined systems have no unique answer; the contract is
    # full column rank, so this must refuse even though solutions exist.
    with pytest.raises(gf.NoSolution):
        gf.mat_solve([[1, 1], [2, 2]], [1, 2], 5)


def test_solve_overdetermined_consistent_and_not():
    a = [[1, 0], [0, 1], [1, 1]]
    assert gf.mat_solve(a, [2, 3, 5], 7).tolist() == [2, 3]
    with pytest.raises(gf.NoSolution):
        gf.mat_solve(a, [2, 3, 6], 7)


def test_solve_roundtrip_random_invertible():
    p = 65537
    rng = gf.FieldRng(5, p)
    for _ in range(10):
        a = gf.sample_invertible(5, p, rng)
        b = rng.matrix(5, 3)
        x = gf.mat_solve(a, b, p)
        assert np.array_equal(gf.mat_mul(a, x, p), b)


def test_inverse_roundtrip():
    p = 97
    rng = gf.FieldRng(9, p)
    a = gf.sample_invertible(6, p, rng)
    assert np.array_equal(gf.mat_mul(a, gf.mat_inv(a, p), p), np.eye(6, dtype=np.int64))


def test_inverse_singular_raises():
    with pytest.raises(gf.NoSolution):
        gf.mat_inv([[1, 1], [2, 2]], 5)


# --- multiplication -------------------------------------------------------


def test_mat_mul_matches_python_ints_small():
    rng = gf.FieldRng(3, 11)
    a, b = rng.matrix(3, 4), rng.matrix(4, 2)
    want = [[sum(int(a[i, t]) * int(b[t, j]) for t in range(4)) % 11 for j in range(2)] for i in range(3)]
    assert gf.mat_mul(a, b, 11).tolist() == want


def test_mat_mul_chunked_large_modulus():
    # 2**31 - 1 forces the chunked accumulation path; verify exactness
    # against plain Python integers.
    p = 2**31 - 1
    assert gf.is_prime(p)
    rng = gf.FieldRng(4, p)
    a, b = rng.matrix(3, 7), rng.matrix(7, 3)
    want = [[sum(int(a[i, t]) * int(b[t, j]) for t in range(7)) % p for j in range(3)] for i in range(3)]
    assert gf.mat_mul(a, b, p).tolist() == want


# --- deterministic randomness ---------------------------------------------


def test_rng_streams_are_reproducible():
    a = gf.FieldRng(42, 65537)
    b = gf.FieldRng(42, 65537)
    assert np.array_equal(a.elements(100), b.elements(100))
    assert a.below(17) == b.below(17)
    assert a.permutation(9) == b.permutation(9)


def test_rng_batching_does_not_change_the_stream():
    a = gf.FieldRng(7, 101)
    b = gf.FieldRng(7, 101)
    one = np.concatenate([a.elements(3), a.elements(5)])
    other = b.elements(8)
    assert np.array_equal(one, other)


def test_rng_outputs_in_range():
    rng = gf.FieldRng(0, 5)
    vals = rng.elements(2000)
    assert vals.min() >= 0 and vals.max() < 5
    # every residue shows up in a healthy stream
    assert set(np.unique(vals).tolist()) == {0, 1, 2, 3, 4}


def test_rng_below_and_nonzero():
    rng = gf.FieldRng(11, 13)
    assert all(0 <= rng.below(6) < 6 for _ in range(200))
    assert all(1 <= v < 13 for v in rng.nonzero(200))


def test_permutation_is_a_permutation():
    rng = gf.FieldRng(2, 65537)
    for n in (1, 2, 5, 12):
        assert sorted(rng.permutation(n)) == list(range(n))


def test_derive_seed_separates_streams():
    seeds = {gf.derive_seed(99, s) for s in range(50)}
    assert len(seeds) == 50


# --- invertible sampling ----------------------------------------------------


def test_sample_invertible_one_by_one_nonzero():
    m = gf.sample_invertible(1, 65537, 0)
    assert m.shape == (1, 1) and int(m[0, 0]) != 0


def test_sample_invertible_full_rank():
    m = gf.sample_invertible(3, 65537, 5)
    assert gf.mat_rank(m, 65537) == 3


def test_sample_invertible_distinct_across_seeds():
    # 100 seeds, all pairwise distinct draws (spot check of uniformity).
    seen = {gf.sample_invertible(4, 65537, seed).tobytes() for seed in range(100)}
    assert len(seen) == 100


def test_sample_invertible_reproducible():
    a = gf.sample_invertible(4, 65537, 77)
    b = gf.sample_invertible(4, 65537, 77)
    assert np.array_equal(a, b)


def test_modulus_validation():
    with pytest.raises(gf.FieldError):
        gf.FieldRng(0, 10)
    with pytest.raises(gf.FieldError):
        gf.check_modulus(gf.MAX_MODULUS + 2)
