"""Exact dense linear algebra over a prime field GF(p).

Matrices are numpy int64 arrays with entries reduced into [0, p).  All
routines are exact: products are accumulated in chunks small enough that
no intermediate value can exceed the int64 range, so any prime modulus
below 2**31 is supported.

Randomness comes from a counter-based SplitMix64 stream mapped onto field
elements by rejection sampling below the largest multiple of p, which
keeps every draw uniform and every run bit-reproducible from a single
64-bit seed.
"""

from __future__ import annotations

import numpy as np

DEFAULT_MODULUS = 65537

_U64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

# Largest supported modulus: row operations form products of two reduced
# entries, which must stay below 2**63.
MAX_MODULUS = 3037000499


class FieldError(Exception):
    pass


class NoSolution(FieldError):
    """The linear system is inconsistent or lacks full column rank."""


def is_prime(n: int) -> bool:
    """Trial-division primality test; adequate for desk-scale moduli."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def check_modulus(p: int) -> None:
    if not isinstance(p, int) or not 2 <= p <= MAX_MODULUS:
        raise FieldError(f"modulus must be an integer in [2, {MAX_MODULUS}], got {p}")
    if not is_prime(p):
        raise FieldError(f"modulus {p} is not prime")


def as_field(a, p: int) -> np.ndarray:
    """Return ``a`` as an int64 array with entries reduced mod p."""
    return np.asarray(a, dtype=np.int64) % p


def mat_mul(a, b, p: int) -> np.ndarray:
    """Exact matrix product ``a @ b`` over GF(p)."""
    a = as_field(a, p)
    b = as_field(b, p)
    if a.shape[-1] != b.shape[0]:
        raise FieldError(f"shape mismatch for product: {a.shape} @ {b.shape}")
    inner = a.shape[-1]
    # Number of addends whose partial sum is guaranteed to fit in int64.
    step = max(1, (2**63 - 1) // max(1, (p - 1) ** 2))
    if inner <= step:
        return (a @ b) % p
    acc = (a[..., :step] @ b[:step]) % p
    for i in range(step, inner, step):
        acc = (acc + a[..., i : i + step] @ b[i : i + step]) % p
    return acc


def row_reduce(a, p: int, pivot_cols: int | None = None) -> tuple[np.ndarray, list[int]]:
    """Reduced row-echelon form of ``a`` over GF(p).

    Pivots are searched only in the first ``pivot_cols`` columns (all
    columns by default), which lets callers reduce augmented systems.
    Returns the reduced matrix and the list of pivot column indices.
    """
    m = as_field(a, p).copy()
    rows, cols = m.shape
    limit = cols if pivot_cols is None else pivot_cols
    pivots: list[int] = []
    r = 0
    for c in range(limit):
        if r == rows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if nz.size == 0:
            continue
        pr = r + int(nz[0])
        if pr != r:
            m[[r, pr]] = m[[pr, r]]
        inv = pow(int(m[r, c]), -1, p)
        m[r] = m[r] * inv % p
        col = m[:, c].copy()
        col[r] = 0
        touched = np.nonzero(col)[0]
        if touched.size:
            m[touched] = (m[touched] - np.outer(col[touched], m[r])) % p
        pivots.append(c)
        r += 1
    return m, pivots


def mat_rank(a, p: int) -> int:
    """Rank of ``a`` over GF(p) (forward elimination only)."""
    m = as_field(a, p).copy()
    if m.size == 0:
        return 0
    rows, cols = m.shape
    rank = 0
    for c in range(cols):
        if rank == rows:
            break
        nz = np.nonzero(m[rank:, c])[0]
        if nz.size == 0:
            continue
        pr = rank + int(nz[0])
        if pr != rank:
            m[[rank, pr]] = m[[pr, rank]]
        inv = pow(int(m[rank, c]), -1, p)
        m[rank] = m[rank] * inv % p
        below = m[rank + 1 :, c].copy()
        touched = np.nonzero(below)[0]
        if touched.size:
            m[rank + 1 + touched] = (m[rank + 1 + touched] - np.outer(below[touched], m[rank])) % p
        rank += 1
    return rank


def mat_solve(a, b, p: int) -> np.ndarray:
    """Solve ``a @ x = b`` over GF(p).

    Requires ``a`` to have full column rank and the system to be
    consistent (extra equations of an over-determined system are
    verified); raises :class:`NoSolution` otherwise.  ``b`` may be a
    vector or a matrix of stacked right-hand sides.
    """
    a = as_field(a, p)
    b = as_field(b, p)
    vector_rhs = b.ndim == 1
    if vector_rhs:
        b = b[:, None]
    if a.shape[0] != b.shape[0]:
        raise FieldError(f"shape mismatch for solve: {a.shape} vs {b.shape}")
    rows, cols = a.shape
    reduced, pivots = row_reduce(np.hstack([a, b]), p, pivot_cols=cols)
    if len(pivots) < cols:
        raise NoSolution(f"matrix has column rank {len(pivots)} < {cols}")
    # Any nonzero row beyond the pivots signals inconsistency.
    tail = reduced[len(pivots):]
    if tail.size and np.any(tail[:, cols:]):
        raise NoSolution("inconsistent system")
    x = reduced[:cols, cols:]
    return x[:, 0] if vector_rhs else x


def mat_inv(a, p: int) -> np.ndarray:
    """Inverse of a square matrix over GF(p)."""
    a = as_field(a, p)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise FieldError(f"inverse needs a square matrix, got shape {a.shape}")
    try:
        return mat_solve(a, np.eye(a.shape[0], dtype=np.int64), p)
    except NoSolution as exc:
        raise NoSolution("matrix is singular") from exc


def mix64(z: int) -> int:
    """SplitMix64 finalizer: the avalanche permutation on 64-bit words."""
    z &= _U64
    z ^= z >> 30
    z = z * _MIX1 & _U64
    z ^= z >> 27
    z = z * _MIX2 & _U64
    z ^= z >> 31
    return z


def derive_seed(seed: int, stream: int) -> int:
    """Deterministic sub-seed for a named stream of a master seed.

    Streams used by this package: 1 = plan, 2 = database, 3 = adversary;
    per-server adversary streams hash the server index in as well.
    """
    return mix64((seed & _U64) + mix64(stream))


class FieldRng:
    """Counter-based deterministic generator of uniform field elements.

    Output i of the stream is ``mix64(seed + (i+1) * GOLDEN)``; 64-bit
    draws at or above the largest multiple of p are rejected, the rest
    reduced mod p.  The draw sequence depends only on (seed, p) and the
    sequence of method calls, never on platform or numpy version.
    """

    def __init__(self, seed: int, p: int = DEFAULT_MODULUS):
        check_modulus(p)
        self.p = p
        self.seed = seed & _U64
        self.counter = 0
        self._accept = (1 << 64) - ((1 << 64) % p)

    def raw(self, n: int) -> np.ndarray:
        """Next n raw 64-bit words of the stream."""
        idx = np.arange(self.counter + 1, self.counter + n + 1, dtype=np.uint64)
        self.counter += n
        z = np.uint64(self.seed) + idx * np.uint64(_GOLDEN)
        z ^= z >> np.uint64(30)
        z *= np.uint64(_MIX1)
        z ^= z >> np.uint64(27)
        z *= np.uint64(_MIX2)
        z ^= z >> np.uint64(31)
        return z

    def elements(self, n: int) -> np.ndarray:
        """n uniform field elements as an int64 array."""
        out = np.empty(n, dtype=np.int64)
        filled = 0
        while filled < n:
            r = self.raw(n - filled)
            keep = r < np.uint64(self._accept)
            got = int(keep.sum())
            out[filled : filled + got] = (r[keep] % np.uint64(self.p)).astype(np.int64)
            filled += got
        return out

    def element(self) -> int:
        return int(self.elements(1)[0])

    def matrix(self, rows: int, cols: int) -> np.ndarray:
        return self.elements(rows * cols).reshape(rows, cols)

    def below(self, k: int) -> int:
        """Uniform integer in [0, k), by rejection on the raw stream."""
        if k <= 0:
            raise FieldError(f"below() needs a positive bound, got {k}")
        accept = (1 << 64) - ((1 << 64) % k)
        while True:
            self.counter += 1
            z = mix64(self.seed + self.counter * _GOLDEN)
            if z < accept:
                return z % k

    def nonzero(self, n: int) -> np.ndarray:
        """n uniform nonzero field elements."""
        return np.array([self.below(self.p - 1) + 1 for _ in range(n)], dtype=np.int64)

    def permutation(self, n: int) -> list[int]:
        """Fisher-Yates shuffle of range(n)."""
        order = list(range(n))
        for i in range(n - 1, 0, -1):
            j = self.below(i + 1)
            order[i], order[j] = order[j], order[i]
        return order


def sample_invertible(size: int, p: int, rng: "FieldRng | int") -> np.ndarray:
    """Uniform invertible size x size matrix over GF(p).

    Sampled by rejection: draw a uniform matrix, keep it iff full rank.
    Deterministic in (size, p, seed); an int is accepted in place of a
    prepared generator.
    """
    if size < 1:
        raise FieldError(f"matrix size must be positive, got {size}")
    if isinstance(rng, int):
        rng = FieldRng(rng, p)
    if rng.p != p:
        raise FieldError(f"generator modulus {rng.p} does not match {p}")
    while True:
        m = rng.matrix(size, size)
        if mat_rank(m, p) == size:
            return m
