from itertools import combinations, product

import numpy as np
import pytest

from coded_pir import gf, rs


# --- independent oracles -----------------------------------------------------


def lagrange_extend(points, known_x, known_y, p):
    """Evaluate the interpolant of (known_x, known_y) at every point.

    Classic Lagrange form, written without touching the library's solve
    or interpolation machinery.
    """
    out = []
    for x in points:
        total = 0
        for i, xi in enumerate(known_x):
            term = known_y[i]
            for j, xj in enumerate(known_x):
                if i != j:
                    term = term * (x - xj) % p * pow(int(xi - xj) % p, -1, p) % p
            total = (total + term) % p
        out.append(total % p)
    return out


def all_codewords(code):
    """Every codeword of a small code, by brute-force message enumeration."""
    words = []
    for msg in product(range(code.p), repeat=code.k):
        words.append(tuple(int(v) for v in rs.encode(code, np.array(msg, dtype=np.int64))))
    return words


def nearest_codeword(code, received):
    """(best distance, the codewords at that distance), exhaustively."""
    best, hits = None, []
    for word in all_codewords(code):
        d = sum(1 for a, b in zip(word, received) if a != b)
        if best is None or d < best:
            best, hits = d, [word]
        elif d == best:
            hits.append(word)
    return best, hits


# --- construction ------------------------------------------------------------


def test_generator_column_of_ones_for_k1():
    code = rs.rs_transposed_generator(3, 1, 7)
    assert code.gen_t.tolist() == [[1], [1], [1]]


def test_generator_square_vandermonde():
    code = rs.rs_transposed_generator(2, 2, 5)
    assert code.gen_t.tolist() == [[1, 1], [1, 2]]
    assert gf.mat_rank(code.gen_t, 5) == 2


def test_generator_36_30_random_row_subsets_full_rank():
    code = rs.rs_transposed_generator(36, 30, 65537)
    rng = np.random.default_rng(0)
    for _ in range(50):
        rows = rng.choice(36, size=30, replace=False)
        assert gf.mat_rank(code.gen_t[rows], 65537) == 30


def test_any_k_rows_invertible_exhaustive_n_le_8():
    for n in range(1, 9):
        for k in range(1, n + 1):
            code = rs.rs_transposed_generator(n, k, 65537)
            for rows in combinations(range(n), k):
                assert gf.mat_rank(code.gen_t[list(rows)], 65537) == k


def test_generator_shape_errors():
    with pytest.raises(rs.InvalidShape):
        rs.rs_transposed_generator(4, 5, 7)
    with pytest.raises(rs.InvalidShape):
        rs.rs_transposed_generator(7, 2, 7)  # length needs p > n


# --- erasure completion ------------------------------------------------------


def test_erasure_complete_no_erasures_is_identity():
    code = rs.rs_transposed_generator(4, 4, 5)
    word = rs.encode(code, np.array([1, 2, 3, 4]))
    back = rs.erasure_complete(code, dict(enumerate(word)))
    assert np.array_equal(back, word)


def test_erasure_complete_two_known_positions():
    # encode (2,1) on points 1..4 over GF(5) -> (3,4,0,1); erase the
    # first two symbols and re-solve from the rest.
    code = rs.rs_transposed_generator(4, 2, 5)
    assert rs.encode(code, np.array([2, 1])).tolist() == [3, 4, 0, 1]
    assert rs.erasure_complete(code, {2: 0, 3: 1}).tolist() == [3, 4, 0, 1]


def test_erasure_complete_detects_non_codeword():
    code = rs.rs_transposed_generator(4, 2, 5)
    with pytest.raises(rs.NotACodeword):
        rs.erasure_complete(code, {0: 3, 1: 4, 2: 1})


def test_erasure_complete_too_few_known():
    code = rs.rs_transposed_generator(4, 2, 5)
    with pytest.raises(rs.TooFewKnown):
        rs.erasure_complete(code, {1: 4})


def test_erasure_complete_vector_symbols():
    code = rs.rs_transposed_generator(5, 2, 13)
    msg = np.array([[1, 2], [3, 4]], dtype=np.int64)
    word = rs.encode(code, msg)
    got = rs.erasure_complete(code, {0: word[0], 3: word[3]})
    assert np.array_equal(got, word)


def test_erasure_complete_matches_lagrange_oracle():
    p = 13
    rng = gf.FieldRng(21, p)
    for n in range(2, 8):
        for k in range(1, n + 1):
            code = rs.rs_transposed_generator(n, k, p)
            msg = rng.elements(k)
            word = rs.encode(code, msg)
            for known in combinations(range(n), k):
                got = rs.erasure_complete(code, {i: word[i] for i in known})
                want = lagrange_extend(
                    code.eval_points.tolist(),
                    [int(code.eval_points[i]) for i in known],
                    [int(word[i]) for i in known],
                    p,
                )
                assert got.tolist() == want
                assert np.array_equal(got, word)


# --- bounded-distance error correction ----------------------------------------


def test_error_correct_codeword_is_fixed_point():
    code = rs.rs_transposed_generator(6, 2, 7)
    word = rs.encode(code, np.array([3, 5]))
    assert np.array_equal(rs.error_correct(code, word), word)


def test_error_correct_single_error_mod5():
    code = rs.rs_transposed_generator(4, 2, 5)
    best, hits = nearest_codeword(code, (3, 1, 0, 1))
    assert best == 1 and hits == [(3, 4, 0, 1)]
    assert rs.error_correct(code, [3, 1, 0, 1]).tolist() == [3, 4, 0, 1]


def test_error_correct_zero_word():
    code = rs.rs_transposed_generator(4, 2, 5)
    assert rs.error_correct(code, [0, 0, 0, 0]).tolist() == [0, 0, 0, 0]


def test_error_correct_beyond_radius_fails():
    # Find a word at distance >= 2 from every codeword of the (4,2)
    # code over GF(5); the decoder must refuse it.
    code = rs.rs_transposed_generator(4, 2, 5)
    for received in product(range(5), repeat=4):
        best, _ = nearest_codeword(code, received)
        if best > code.max_errors:
            with pytest.raises(rs.DecodingFailure):
                rs.error_correct(code, np.array(received, dtype=np.int64))
            return
    pytest.fail("no word beyond the packing radius found")


def test_error_correct_vector_symbols_errors_in_distinct_columns():
    code = rs.rs_transposed_generator(7, 3, 13)
    msg = np.arange(6, dtype=np.int64).reshape(3, 2)
    word = rs.encode(code, msg)
    hit = word.copy()
    hit[0, 0] = (hit[0, 0] + 5) % 13  # column 0, row 0
    hit[4, 1] = (hit[4, 1] + 1) % 13  # column 1, row 4
    hit[6, 0] = (hit[6, 0] + 2) % 13
    assert np.array_equal(rs.error_correct(code, hit), word)


def test_error_correct_matches_bw_reference_on_random_words():
    rng = np.random.default_rng(7)
    for _ in range(200):
        p = int(rng.choice([5, 7, 13]))
        n = int(rng.integers(2, min(p, 9)))
        k = int(rng.integers(1, n + 1))
        code = rs.rs_transposed_generator(n, k, p)
        word = rng.integers(0, p, n).astype(np.int64)
        via_gao = rs._gao_decode_column(code, word, code.max_errors)
        via_bw = rs.bw_decode_column(code, word)
        if via_gao is None:
            assert via_bw is None
        else:
            assert via_bw is not None and np.array_equal(via_gao, via_bw)


def test_roundtrip_random_messages_and_error_patterns():
    p = 7
    rng = np.random.default_rng(3)
    for n in range(2, 7):
        for k in range(1, n):
            code = rs.rs_transposed_generator(n, k, p)
            e = code.max_errors
            for _ in range(20):
                msg = rng.integers(0, p, k).astype(np.int64)
                word = rs.encode(code, msg)
                hit = word.copy()
                wt = int(rng.integers(0, e + 1))
                where = rng.choice(n, size=wt, replace=False)
                for i in where:
                    hit[i] = (hit[i] + int(rng.integers(1, p))) % p
                assert np.array_equal(rs.error_correct(code, hit), word)


# --- puncturing ---------------------------------------------------------------


def test_puncture_identity():
    code = rs.rs_transposed_generator(5, 3, 11)
    same = rs.puncture(code, range(5))
    assert np.array_equal(same.gen_t, code.gen_t)


def test_puncture_keeps_eval_points():
    code = rs.rs_transposed_generator(4, 2, 7)
    sub = rs.puncture(code, {0, 1, 2})
    assert sub.n == 3 and sub.k == 2
    assert sub.eval_points.tolist() == [1, 2, 3]


def test_puncture_too_short():
    code = rs.rs_transposed_generator(4, 3, 7)
    with pytest.raises(rs.TooShort):
        rs.puncture(code, {0, 1})


def test_punctured_long_code_corrects_91_errors():
    # (392, 182) code punctured to 364 positions still has dimension 182,
    # so its packing radius is floor((364 - 182) / 2) = 91.
    code = rs.rs_transposed_generator(392, 182, 65537)
    sub = rs.puncture(code, range(28, 392))
    assert sub.n == 364 and sub.k == 182
    assert sub.max_errors == 91


def test_punctured_code_still_decodes():
    code = rs.rs_transposed_generator(8, 2, 13)
    sub = rs.puncture(code, {1, 3, 4, 6, 7})
    msg = np.array([5, 9], dtype=np.int64)
    word = rs.encode(sub, msg)
    hit = word.copy()
    hit[2] = (hit[2] + 4) % 13
    assert np.array_equal(rs.error_correct(sub, hit), word)


def test_message_from_codeword_roundtrip_and_rejection():
    code = rs.rs_transposed_generator(6, 3, 11)
    msg = np.array([1, 2, 3], dtype=np.int64)
    word = rs.encode(code, msg)
    assert np.array_equal(rs.message_from_codeword(code, word), msg)
    word[5] = (word[5] + 1) % 11
    with pytest.raises(rs.NotACodeword):
        rs.message_from_codeword(code, word)
