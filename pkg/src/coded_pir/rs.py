"""Reed-Solomon realizations of the MDS codes the retrieval schemes use.

A code is held by the transpose of its generator matrix: the n x k
Vandermonde matrix on distinct nonzero evaluation points (1..n for
freshly built codes), so any k rows are invertible and every code is
MDS.  Codeword "symbols" may themselves be row vectors: all routines
accept an (n,) vector or an (n, w) matrix whose columns are decoded
independently.

Decoding surfaces:

- :func:`erasure_complete` rebuilds a codeword from any >= k known
  positions, verifying consistency of over-determined inputs.
- :func:`error_correct` is a bounded-distance rational-interpolation
  decoder correcting up to floor((n - k) / 2) wrong positions; the
  slower Berlekamp-Welch linear-system form is kept as
  :func:`bw_decode_column` for cross-checks.
- :func:`puncture` restricts a code to a subset of positions (used when
  only part of a codeword is observable but errors must be corrected).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .gf import as_field, mat_inv, mat_mul, row_reduce


class CodingError(Exception):
    pass


class InvalidShape(CodingError):
    pass


class TooFewKnown(CodingError):
    pass


class TooShort(CodingError):
    pass


class NotACodeword(CodingError):
    pass


class DecodingFailure(CodingError):
    pass


@dataclass(frozen=True)
class RsCode:
    """An (n, k) Reed-Solomon code over GF(p) on distinct eval points."""

    n: int
    k: int
    p: int
    eval_points: np.ndarray  # (n,) distinct, nonzero
    gen_t: np.ndarray  # (n, k), row i = powers of eval_points[i]

    @property
    def max_errors(self) -> int:
        """Bounded-distance radius floor((n - k) / 2)."""
        return (self.n - self.k) // 2

    @property
    def min_distance(self) -> int:
        return self.n - self.k + 1


def _vandermonde(points: np.ndarray, width: int, p: int) -> np.ndarray:
    """Matrix of powers points[i]**j for j < width, over GF(p)."""
    out = np.empty((len(points), width), dtype=np.int64)
    if width == 0:
        return out
    out[:, 0] = 1
    for j in range(1, width):
        out[:, j] = out[:, j - 1] * points % p
    return out


def code_on_points(points, k: int, p: int) -> RsCode:
    """RS code of dimension k on the given evaluation points."""
    points = as_field(points, p)
    n = len(points)
    if not 1 <= k <= n:
        raise InvalidShape(f"need 1 <= k <= n, got k={k}, n={n}")
    if len(set(points.tolist())) != n or np.any(points == 0):
        raise InvalidShape("evaluation points must be distinct and nonzero")
    return RsCode(n=n, k=k, p=p, eval_points=points, gen_t=_vandermonde(points, k, p))


def rs_transposed_generator(n: int, k: int, p: int) -> RsCode:
    """The canonical (n, k) code on evaluation points 1..n."""
    if not 1 <= k <= n:
        raise InvalidShape(f"need 1 <= k <= n, got k={k}, n={n}")
    if n >= p:
        raise InvalidShape(f"code length {n} needs a field larger than {p}")
    return code_on_points(np.arange(1, n + 1, dtype=np.int64), k, p)


def encode(code: RsCode, message) -> np.ndarray:
    """Codeword gen_t @ message; message is (k,) or (k, w)."""
    message = as_field(message, code.p)
    if message.shape[0] != code.k:
        raise InvalidShape(f"message has {message.shape[0]} rows, expected {code.k}")
    return mat_mul(code.gen_t, message, code.p)


def puncture(code: RsCode, keep) -> RsCode:
    """Restriction of the code to the kept positions (still MDS)."""
    positions = sorted(set(int(i) for i in keep))
    if any(i < 0 or i >= code.n for i in positions):
        raise InvalidShape(f"positions out of range [0, {code.n})")
    if len(positions) < code.k:
        raise TooShort(f"{len(positions)} positions kept, need at least k={code.k}")
    return code_on_points(code.eval_points[positions], code.k, code.p)


def _as_columns(code: RsCode, values) -> tuple[np.ndarray, bool]:
    v = as_field(values, code.p)
    if v.ndim == 1:
        return v[:, None], True
    if v.ndim != 2:
        raise InvalidShape(f"expected a vector or matrix of symbols, got ndim={v.ndim}")
    return v, False


_INV_CACHE: dict[tuple, np.ndarray] = {}


def _cached_inv(a: np.ndarray, p: int) -> np.ndarray:
    """Inverse of a square matrix, memoized by content (bounded cache)."""
    key = (p, a.shape[0], a.tobytes())
    hit = _INV_CACHE.get(key)
    if hit is None:
        hit = mat_inv(a, p)
        if len(_INV_CACHE) >= 256:
            _INV_CACHE.pop(next(iter(_INV_CACHE)))
        _INV_CACHE[key] = hit
    return hit


def recover_message(code: RsCode, known: Mapping[int, object]) -> np.ndarray:
    """Message solved from >= k known positions, consistency-checked.

    Any k rows of the transposed generator are invertible, so the first
    k known positions determine the message; the remaining positions are
    verified against it.  Raises TooFewKnown below k positions and
    NotACodeword when an over-determined set fits no codeword.
    """
    positions = sorted(int(i) for i in known)
    if any(i < 0 or i >= code.n for i in positions):
        raise InvalidShape(f"positions out of range [0, {code.n})")
    if len(positions) != len(set(positions)):
        raise InvalidShape("duplicate positions")
    if len(positions) < code.k:
        raise TooFewKnown(f"{len(positions)} known positions, need at least k={code.k}")
    rows = np.stack([as_field(known[i], code.p) for i in positions])
    vector = rows.ndim == 1
    if vector:
        rows = rows[:, None]
    head, tail = positions[: code.k], positions[code.k :]
    message = mat_mul(_cached_inv(code.gen_t[head], code.p), rows[: code.k], code.p)
    if tail:
        if not np.array_equal(mat_mul(code.gen_t[tail], message, code.p), rows[code.k :]):
            raise NotACodeword("known positions fit no codeword")
    return message[:, 0] if vector else message


def erasure_complete(code: RsCode, known: Mapping[int, object]) -> np.ndarray:
    """The unique codeword consistent with the known positions."""
    return encode(code, recover_message(code, known))


def message_from_codeword(code: RsCode, word) -> np.ndarray:
    """Inverse of :func:`encode`; verifies the input is a codeword."""
    cols, vector = _as_columns(code, word)
    if cols.shape[0] != code.n:
        raise InvalidShape(f"word has {cols.shape[0]} rows, expected {code.n}")
    message = recover_message(code, {i: cols[i] for i in range(code.n)})
    return message[:, 0] if vector else message


def _solve_any(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray | None:
    """One solution of a @ x = b (free variables set to 0), or None."""
    rows, cols = a.shape
    reduced, pivots = row_reduce(np.hstack([a, b[:, None]]), p, pivot_cols=cols)
    tail = reduced[len(pivots):]
    if tail.size and np.any(tail[:, cols:]):
        return None
    x = np.zeros(cols, dtype=np.int64)
    for r, c in enumerate(pivots):
        x[c] = reduced[r, cols]
    return x


# --- polynomial helpers (coefficients low degree first, trimmed) ------------


def _poly_trim(a: np.ndarray) -> np.ndarray:
    nz = np.nonzero(a)[0]
    return a[: int(nz[-1]) + 1] if nz.size else a[:0]


def _poly_mul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    if len(a) == 0 or len(b) == 0:
        return np.zeros(0, dtype=np.int64)
    if min(len(a), len(b)) * (p - 1) ** 2 < 2**63:
        return _poly_trim(np.convolve(a, b) % p)
    exact = np.convolve(a.astype(object), b.astype(object)) % p
    return _poly_trim(exact.astype(np.int64))


def _poly_sub(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    width = max(len(a), len(b))
    out = np.zeros(width, dtype=np.int64)
    out[: len(a)] = a
    out[: len(b)] = (out[: len(b)] - b) % p
    return _poly_trim(out % p)


def _poly_divmod(num: np.ndarray, den: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    """Quotient and remainder over GF(p); den need not be monic."""
    if len(den) == 0:
        raise ZeroDivisionError("polynomial division by zero")
    num = num.copy() % p
    dd = len(den) - 1
    if len(num) - 1 < dd:
        return np.zeros(0, dtype=np.int64), _poly_trim(num)
    lead_inv = pow(int(den[-1]), -1, p)
    quot = np.zeros(len(num) - dd, dtype=np.int64)
    for i in range(len(num) - 1, dd - 1, -1):
        c = int(num[i]) % p
        if c:
            c = c * lead_inv % p
            quot[i - dd] = c
            num[i - dd : i + 1] = (num[i - dd : i + 1] - c * den) % p
    return quot, _poly_trim(num[:dd])


_INTERP_CACHE: dict[tuple, tuple[np.ndarray, np.ndarray]] = {}


def _interp_setup(p: int, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cached (g0, basis) for interpolation through the given points.

    g0 = prod(x - x_i); basis column i holds the coefficients of the
    Lagrange polynomial L_i, so an interpolant is one matrix-vector
    product basis @ y.
    """
    key = (p, points.tobytes())
    hit = _INTERP_CACHE.get(key)
    if hit is not None:
        return hit
    n = len(points)
    g0 = np.array([1], dtype=np.int64)
    for x in points:
        g0 = _poly_mul(g0, np.array([-int(x) % p, 1], dtype=np.int64), p)
    g0 = np.concatenate([g0, np.zeros(n + 1 - len(g0), dtype=np.int64)])
    # Synthetic division g0 / (x - x_i) for all i at once (Horner, high to low).
    quots = np.zeros((n, n), dtype=np.int64)
    quots[n - 1] = g0[n]
    for j in range(n - 1, 0, -1):
        quots[j - 1] = (g0[j] + points * quots[j]) % p
    # Evaluate each quotient at its own point, again by Horner.
    vals = quots[n - 1].copy()
    for j in range(n - 2, -1, -1):
        vals = (vals * points + quots[j]) % p
    scale = np.array([pow(int(v), -1, p) for v in vals], dtype=np.int64)
    basis = quots * scale % p
    if len(_INTERP_CACHE) >= 16:
        _INTERP_CACHE.pop(next(iter(_INTERP_CACHE)))
    _INTERP_CACHE[key] = (g0, basis)
    return g0, basis


def _gao_decode_column(code: RsCode, received: np.ndarray, radius: int) -> np.ndarray | None:
    """Nearest codeword within ``radius`` errors via rational interpolation.

    Partial extended Euclid on (prod(x - x_i), interpolant of the
    received word) stops at the first remainder of degree below
    (n + k) / 2; the message polynomial is that remainder divided by its
    Bezout cofactor.  Equivalent to the Berlekamp-Welch linear system
    (the cofactor is the error locator) but quadratic instead of cubic.
    """
    p, n, k = code.p, code.n, code.k
    if radius == 0:
        try:
            return encode(code, recover_message(code, dict(enumerate(received))))
        except CodingError:
            return None
    g0, basis = _interp_setup(p, code.eval_points)
    g1 = _poly_trim(mat_mul(basis, received, p))
    r_prev, r = g0, g1
    v_prev, v = np.zeros(0, dtype=np.int64), np.array([1], dtype=np.int64)
    while len(r) and 2 * (len(r) - 1) >= n + k:
        q, rem = _poly_divmod(r_prev, r, p)
        v_prev, v = v, _poly_sub(v_prev, _poly_mul(q, v, p), p)
        r_prev, r = r, rem
    if len(v) == 0:
        return None
    f, rem = _poly_divmod(r, v, p)
    if len(rem) or len(f) > k:
        return None
    message = np.zeros(k, dtype=np.int64)
    message[: len(f)] = f
    word = mat_mul(code.gen_t, message, p)
    if int(np.count_nonzero((word - received) % p)) > radius:
        return None
    return word


def bw_decode_column(code: RsCode, received, radius: int | None = None) -> np.ndarray | None:
    """Berlekamp-Welch reference decoder (one column), or None.

    Solves the linear system Q(x_i) = y_i * E(x_i) for Q of degree below
    k + radius and monic E of degree radius.  Cubic in n; kept as an
    independent implementation for cross-checking the production path.
    """
    p = code.p
    k = code.k
    received = as_field(received, p)
    radius = code.max_errors if radius is None else radius
    if radius == 0:
        try:
            return encode(code, recover_message(code, dict(enumerate(received))))
        except CodingError:
            return None
    powers = _vandermonde(code.eval_points, k + radius, p)
    lhs = np.hstack([powers, (-received[:, None] * powers[:, :radius]) % p])
    rhs = received * powers[:, radius] % p
    sol = _solve_any(lhs, rhs, p)
    if sol is None:
        return None
    q_poly = _poly_trim(sol[: k + radius])
    e_poly = np.concatenate([sol[k + radius :], [1]])
    quot, rem = _poly_divmod(q_poly, e_poly, p)
    if len(rem):
        return None
    message = np.zeros(k, dtype=np.int64)
    message[: min(k, len(quot))] = quot[:k]
    word = mat_mul(code.gen_t, message, p)
    if int(np.count_nonzero((word - received) % p)) > radius:
        return None
    return word


def error_correct(code: RsCode, received) -> np.ndarray:
    """Unique codeword within floor((n - k) / 2) of ``received``.

    Columns of a matrix input are decoded independently (errors in a row
    vector may hit any subset of its coordinates).  Raises
    DecodingFailure when no codeword lies within the radius.
    """
    cols, vector = _as_columns(code, received)
    if cols.shape[0] != code.n:
        raise InvalidShape(f"received word has {cols.shape[0]} rows, expected {code.n}")
    out = np.empty_like(cols)
    for j in range(cols.shape[1]):
        word = _gao_decode_column(code, cols[:, j], code.max_errors)
        if word is None:
            raise DecodingFailure(
                f"no codeword within {code.max_errors} errors of column {j}"
            )
        out[:, j] = word
    return out[:, 0] if vector else out
