"""Server-side storage encoding and retrieval sessions.

Each of the M files is an L x K matrix; server n stores, file-major, the
projection of every file row onto column n of the (N, K) storage code.
A session answers each server's query list with plain dot products, then
applies the configured adversary: robust servers stay silent, Byzantine
servers corrupt every response.  Download accounting only counts
responses that actually arrived.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .gf import DEFAULT_MODULUS, FieldRng, as_field, derive_seed, mat_mul, mat_rank
from .plans import QueryPlan

DATABASE_STREAM = 2
ADVERSARY_STREAM = 3


class StorageError(Exception):
    pass


class ShapeMismatch(StorageError):
    pass


@dataclass(frozen=True)
class StorageCode:
    """The (N, K) MDS code spreading every file row over the servers."""

    gen: np.ndarray  # K x N
    p: int

    @property
    def n_servers(self) -> int:
        return self.gen.shape[1]

    @property
    def k(self) -> int:
        return self.gen.shape[0]

    def column(self, n: int) -> np.ndarray:
        return self.gen[:, n]


def rs_storage_code(n_servers: int, k: int, p: int = DEFAULT_MODULUS) -> StorageCode:
    """Canonical storage code: Vandermonde columns on points 1..N."""
    points = np.arange(1, n_servers + 1, dtype=np.int64) % p
    gen = np.empty((k, n_servers), dtype=np.int64)
    gen[0] = 1
    for j in range(1, k):
        gen[j] = gen[j - 1] * points % p
    return StorageCode(gen=gen, p=p)


def is_mds(code: StorageCode) -> bool:
    """Exhaustively check that every K columns are linearly independent."""
    from itertools import combinations

    k = code.k
    for cols in combinations(range(code.n_servers), k):
        if mat_rank(code.gen[:, cols], code.p) != k:
            return False
    return True


@dataclass(frozen=True)
class Database:
    """M files of identical L x K shape over a common field."""

    files: tuple[np.ndarray, ...]
    p: int

    def __post_init__(self):
        shapes = {f.shape for f in self.files}
        if len(shapes) > 1:
            raise ShapeMismatch(f"files differ in shape: {sorted(shapes)}")

    @property
    def m(self) -> int:
        return len(self.files)

    @property
    def l_rows(self) -> int:
        return self.files[0].shape[0]

    @property
    def k(self) -> int:
        return self.files[0].shape[1]


def random_database(m: int, l_rows: int, k: int, p: int, seed: int = 0) -> Database:
    """Uniform random database, deterministic in the seed."""
    rng = FieldRng(derive_seed(seed, DATABASE_STREAM), p)
    return Database(files=tuple(rng.matrix(l_rows, k) for _ in range(m)), p=p)


def database_for_plan(plan: QueryPlan, seed: int | None = None) -> Database:
    s = plan.params.seed if seed is None else seed
    return random_database(
        plan.params.n_files, plan.l_rows, plan.params.code_dim, plan.params.modulus, s
    )


def database_to_json(db: Database) -> str:
    doc = {"p": db.p, "files": [f.tolist() for f in db.files]}
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def database_from_json(text: str) -> Database:
    doc = json.loads(text)
    return Database(
        files=tuple(np.array(f, dtype=np.int64) for f in doc["files"]), p=doc["p"]
    )


@dataclass(frozen=True)
class ServerState:
    """One server's contents: the stacked files projected on its column."""

    index: int
    contents: np.ndarray  # length M * L


def encode_database(db: Database, code: StorageCode) -> tuple[ServerState, ...]:
    if code.k != db.k:
        raise ShapeMismatch(f"storage code dimension {code.k} != file width {db.k}")
    if code.p != db.p:
        raise ShapeMismatch(f"storage code modulus {code.p} != database modulus {db.p}")
    stacked = np.vstack(db.files)
    projected = mat_mul(stacked, code.gen, db.p)  # (M*L) x N
    return tuple(
        ServerState(index=n, contents=projected[:, n].copy())
        for n in range(code.n_servers)
    )


def answer_query(query, server: ServerState, p: int) -> int:
    """The server's response: dot product of the query with its contents."""
    query = as_field(query, p)
    if query.shape != server.contents.shape:
        raise ShapeMismatch(
            f"query length {query.shape} != server contents {server.contents.shape}"
        )
    return int(mat_mul(query[None, :], server.contents[:, None], p)[0, 0])


CorruptionFn = Callable[[FieldRng, int, np.ndarray], np.ndarray]


def _default_corruption(rng: FieldRng, server: int, responses: np.ndarray) -> np.ndarray:
    """Add an independent uniform nonzero element to every response."""
    return (responses + rng.nonzero(len(responses))) % rng.p


@dataclass(frozen=True)
class Adversary:
    """Fault placement for one session.

    ``robust_set`` servers never answer; ``byzantine_set`` servers pass
    their honest responses through ``corruption`` (by default adding an
    independent uniform nonzero element to each, so every corrupted
    response is actually wrong).
    """

    robust_set: tuple[int, ...] = ()
    byzantine_set: tuple[int, ...] = ()
    seed: int = 0
    corruption: CorruptionFn = field(default=_default_corruption, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "robust_set", tuple(sorted(set(self.robust_set))))
        object.__setattr__(self, "byzantine_set", tuple(sorted(set(self.byzantine_set))))


@dataclass(frozen=True)
class Transcript:
    """Per-server responses of one session; None marks an absent server."""

    responses: tuple[np.ndarray | None, ...]
    downloaded_symbols: int


def run_session(
    plan: QueryPlan,
    db: Database,
    code: StorageCode | None = None,
    adversary: Adversary | None = None,
) -> Transcript:
    """Answer every planned query against the encoded database."""
    p = plan.params.modulus
    if code is None:
        code = rs_storage_code(plan.params.n_servers, plan.params.code_dim, p)
    if adversary is None:
        adversary = Adversary()
    if db.m != plan.params.n_files or db.l_rows != plan.l_rows or db.k != plan.params.code_dim:
        raise ShapeMismatch(
            f"database shape ({db.m}, {db.l_rows}, {db.k}) does not match the plan"
        )
    if any(n < 0 or n >= code.n_servers for n in adversary.robust_set + adversary.byzantine_set):
        raise ShapeMismatch("adversary names servers outside the system")

    servers = encode_database(db, code)
    responses: list[np.ndarray | None] = []
    downloaded = 0
    for n in range(code.n_servers):
        if n in adversary.robust_set:
            responses.append(None)
            continue
        qids = plan.server_queries[n]
        if qids:
            qmat = np.stack([plan.queries[q].vector for q in qids])
            answers = mat_mul(qmat, servers[n].contents, p)
        else:
            answers = np.zeros(0, dtype=np.int64)
        if n in adversary.byzantine_set:
            rng = FieldRng(derive_seed(derive_seed(adversary.seed, ADVERSARY_STREAM), n), p)
            answers = as_field(adversary.corruption(rng, n, answers), p)
            if answers.shape != (len(qids),):
                raise ShapeMismatch("corruption strategy changed the response count")
        responses.append(answers)
        downloaded += len(qids)
    return Transcript(responses=tuple(responses), downloaded_symbols=downloaded)
