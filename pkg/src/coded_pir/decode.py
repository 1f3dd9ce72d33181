"""User-side decoding of retrieval sessions.

Decoding follows a fixed order: (1) solve every shared query from the K
responses of its symbol's servers; (2) per group, rebuild the
interference codeword from the pure blocks (completing erasures or
correcting errors as the variant demands); (3) subtract interference
from mixed blocks; (4) per desired block, recover the mask rows behind
the block's atoms; (5) invert the desired files' masks.  Wherever more
values are available than needed, consistency is verified and any
mismatch surfaces as DecodingFailure.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from . import rs
from .gf import NoSolution, mat_inv, mat_mul, mat_solve
from .plans import QueryPlan, Variant
from .storage import StorageCode, Transcript, rs_storage_code

# Mask inverses are reused across every session decoded from one plan.
_MASK_INV: "weakref.WeakKeyDictionary[QueryPlan, dict[int, np.ndarray]]" = (
    weakref.WeakKeyDictionary()
)


def _mask_inverse(plan: QueryPlan, f: int) -> np.ndarray:
    per_plan = _MASK_INV.setdefault(plan, {})
    if f not in per_plan:
        per_plan[f] = mat_inv(plan.masks[f], plan.params.modulus)
    return per_plan[f]


class DecodeError(Exception):
    pass


class DecodingFailure(DecodeError):
    pass


class MissingResponses(DecodeError):
    pass


class SingularSystem(DecodeError):
    pass


FLAG_DIRECT = "direct"
FLAG_ERASURE = "erasure-completed"
FLAG_ERROR = "error-corrected"


@dataclass
class RecoveredAtoms:
    """Atom values a decoding session reconstituted, with provenance.

    ``values[f][a]`` is the K-vector value of atom ``a`` of file ``f``;
    ``flags`` marks how each value was obtained: read straight off a
    (possibly interference-subtracted) query, filled in by erasure
    completion, or repaired by error correction.  Every atom of every
    desired file is present; undesired files appear where their atoms
    are individually recoverable (blocks mixing a single undesired file).
    """

    values: dict[int, dict[int, np.ndarray]]
    flags: dict[int, dict[int, str]]

    def add(self, f: int, atom: int, value: np.ndarray, flag: str) -> None:
        self.values.setdefault(f, {})[atom] = value
        self.flags.setdefault(f, {})[atom] = flag


def decode_shared_query(responses: Mapping[int, int], code: StorageCode) -> np.ndarray:
    """The K-vector x with x . g_n = responses[n] for each server n."""
    servers = sorted(responses)
    if len(servers) != code.k:
        raise SingularSystem(f"need exactly {code.k} responses, got {len(servers)}")
    rhs = np.array([int(responses[n]) for n in servers], dtype=np.int64)
    try:
        return mat_solve(code.gen[:, servers].T, rhs, code.p)
    except NoSolution as exc:
        raise SingularSystem(f"storage code is not MDS on columns {servers}") from exc


def _query_values(
    plan: QueryPlan, transcript: Transcript, code: StorageCode
) -> list[np.ndarray | None]:
    """Value of every shared query, batched per symbol; None = unretrievable."""
    p = plan.params.modulus
    absent = {n for n, r in enumerate(transcript.responses) if r is None}
    position = [
        {qid: i for i, qid in enumerate(qids)} for qids in plan.server_queries
    ]
    n_blocks = len(plan.blocks)
    values: list[np.ndarray | None] = [None] * len(plan.queries)
    for s, subset in enumerate(plan.array.symbols):
        if absent & set(subset):
            continue
        try:
            inv = mat_inv(code.gen[:, list(subset)].T, p)
        except NoSolution as exc:
            raise SingularSystem(f"storage code is not MDS on columns {subset}") from exc
        qids = [blk * plan.n_symbols + s for blk in range(n_blocks)]
        resp = np.empty((len(subset), n_blocks), dtype=np.int64)
        for i, n in enumerate(subset):
            resp[i] = [transcript.responses[n][position[n][q]] for q in qids]
        solved = mat_mul(inv, resp, p)
        for j, qid in enumerate(qids):
            values[qid] = solved[:, j]
    return values


def _group_interference(
    plan: QueryPlan, values: list[np.ndarray | None], record: RecoveredAtoms
) -> dict[int, np.ndarray]:
    """Interference value of every mixed-block query, group by group.

    Pure-block query values of a group lie on one codeword of the big
    code (positions beta*b onward); the mixed positions 0..beta*b-1 are
    recovered by erasure completion, or bounded-distance correction for
    the Byzantine variant.  Groups mixing a single undesired file yield
    that file's atoms individually and are recorded.
    """
    b = plan.n_symbols
    ab = plan.ab
    byz = plan.params.variant is Variant.BYZANTINE
    assert plan.big_code is not None
    interference: dict[int, np.ndarray] = {}
    pure_positions = list(range(ab.beta * b, ab.total * b))
    punctured = rs.puncture(plan.big_code, pure_positions) if byz else None
    for group in plan.groups:
        known: dict[int, np.ndarray] = {}
        for i, blk_id in enumerate(group.pure_blocks):
            for s in range(b):
                v = values[blk_id * b + s]
                if v is not None:
                    known[ab.beta * b + i * b + s] = v
        if byz:
            received = np.stack([known[t] for t in pure_positions])
            corrected = rs.error_correct(punctured, received)
            message = rs.message_from_codeword(punctured, corrected)
            full = rs.encode(plan.big_code, message)
        else:
            full = rs.erasure_complete(plan.big_code, known)
        for j, blk_id in enumerate(group.mixed_blocks):
            for s in range(b):
                interference[blk_id * b + s] = full[j * b + s]
        if len(group.base_label) == 1:
            f = group.base_label[0]
            start = group.atom_start[f]
            for t in range(ab.total * b):
                if t not in known:
                    flag = FLAG_ERASURE
                elif byz and not np.array_equal(full[t], known[t]):
                    flag = FLAG_ERROR
                else:
                    flag = FLAG_DIRECT
                record.add(f, start + t, full[t], flag)
    return interference


def _reconstruct_standard(
    plan: QueryPlan, values: list[np.ndarray | None]
) -> tuple[dict[int, np.ndarray], RecoveredAtoms]:
    p = plan.params.modulus
    des = plan.params.desired[0]
    b = plan.n_symbols
    variant = plan.params.variant
    record = RecoveredAtoms(values={}, flags={})
    interference = _group_interference(plan, values, record)

    rows_value = np.zeros((plan.l_rows, plan.params.code_dim), dtype=np.int64)
    for blk in plan.blocks:
        if des not in blk.label:
            continue
        vals: dict[int, np.ndarray] = {}
        for s in range(b):
            qid = blk.index * b + s
            v = values[qid]
            if v is None:
                continue
            if len(blk.label) > 1:
                v = (v - interference[qid]) % p
            vals[s] = v
        if variant is Variant.BYZANTINE:
            received = np.stack([vals[s] for s in range(b)])
            corrected = rs.error_correct(plan.small_code, received)
            message = rs.message_from_codeword(plan.small_code, corrected)
            restored = corrected
        elif variant is Variant.ROBUST:
            message = rs.recover_message(plan.small_code, vals)
            restored = rs.encode(plan.small_code, message)
        else:
            for s, v in vals.items():
                rows_value[blk.atoms[des][s]] = v
                record.add(des, blk.atoms[des][s], v, FLAG_DIRECT)
            continue
        for s in range(b):
            if s not in vals:
                flag = FLAG_ERASURE
            elif not np.array_equal(restored[s], vals[s]):
                flag = FLAG_ERROR
            else:
                flag = FLAG_DIRECT
            record.add(des, blk.atoms[des][s], restored[s], flag)
        lo, hi = blk.desired_rows
        rows_value[lo:hi] = message
    return {des: mat_mul(_mask_inverse(plan, des), rows_value, p)}, record


def _reconstruct_multifile(
    plan: QueryPlan, values: list[np.ndarray | None]
) -> tuple[dict[int, np.ndarray], RecoveredAtoms]:
    p = plan.params.modulus
    b = plan.n_symbols
    ab = plan.ab
    k = plan.params.code_dim
    desired = list(plan.params.desired)
    undesired = [f for f in range(plan.params.n_files) if f not in plan.params.desired]
    assert plan.big_code is not None and plan.mix_matrix is not None
    record = RecoveredAtoms(values={}, flags={})

    atom_vals = {f: np.zeros((plan.l_rows, k), dtype=np.int64) for f in range(plan.params.n_files)}
    sigma: dict[tuple[int, int], int] = {}
    for blk in plan.blocks:
        if blk.mix_row is not None:
            sigma[(blk.mix_round, blk.mix_row)] = blk.index
            continue
        f = blk.label[0]
        for s in range(b):
            atom_vals[f][blk.atoms[f][s]] = values[blk.index * b + s]
            record.add(f, blk.atoms[f][s], values[blk.index * b + s], FLAG_DIRECT)

    # Undesired files ride the big code: singleton positions determine the rest.
    shared = ab.beta * b
    for f in undesired:
        message = mat_solve(plan.big_code.gen_t[shared:], atom_vals[f][shared:], p)
        atom_vals[f][:shared] = rs.encode(plan.big_code, message)[:shared]
        for t in range(shared):
            record.add(f, t, atom_vals[f][t], FLAG_ERASURE)

    h = plan.mix_matrix
    try:
        hd_inv = mat_inv(h[:, desired], p)
    except NoSolution as exc:
        raise DecodingFailure("mixing matrix is singular on the desired columns") from exc
    for lam in range(ab.beta):
        rhs = np.empty((len(desired), b, k), dtype=np.int64)
        for row in range(len(desired)):
            blk = plan.blocks[sigma[(lam, row)]]
            for s in range(b):
                acc = values[blk.index * b + s].copy()
                t = lam * b + s
                for f in undesired:
                    acc = (acc - int(h[row, f]) * atom_vals[f][t]) % p
                rhs[row, s] = acc
        solved = mat_mul(hd_inv, rhs.reshape(len(desired), b * k), p).reshape(len(desired), b, k)
        for i, f in enumerate(desired):
            atom_vals[f][lam * b : (lam + 1) * b] = solved[i]
            for s in range(b):
                record.add(f, lam * b + s, solved[i, s], FLAG_DIRECT)

    files = {f: mat_mul(_mask_inverse(plan, f), atom_vals[f], p) for f in desired}
    return files, record


def _run_pipeline(
    plan: QueryPlan, transcript: Transcript, code: StorageCode | None
) -> tuple[dict[int, np.ndarray], RecoveredAtoms]:
    params = plan.params
    if code is None:
        code = rs_storage_code(params.n_servers, params.code_dim, params.modulus)
    absent = [n for n, r in enumerate(transcript.responses) if r is None]
    if absent and params.variant is not Variant.ROBUST:
        raise MissingResponses(
            f"servers {absent} are absent; only the robust variant tolerates erasures"
        )
    values = _query_values(plan, transcript, code)
    try:
        if params.variant is Variant.MULTI_FILE:
            return _reconstruct_multifile(plan, values)
        return _reconstruct_standard(plan, values)
    except rs.CodingError as exc:
        raise DecodingFailure(str(exc)) from exc
    except NoSolution as exc:
        raise DecodingFailure(str(exc)) from exc


def reconstruct(
    plan: QueryPlan, transcript: Transcript, code: StorageCode | None = None
) -> dict[int, np.ndarray]:
    """Recover the desired file(s) exactly, or raise a decode error.

    The adversary must respect the plan's bounds: at most S absent
    servers for the robust variant (none elsewhere), at most B Byzantine
    servers for the Byzantine variant.  Inconsistencies beyond those
    bounds surface as DecodingFailure rather than silent corruption
    wherever redundancy allows detection.
    """
    files, _ = _run_pipeline(plan, transcript, code)
    return files


def recovered_atoms(
    plan: QueryPlan, transcript: Transcript, code: StorageCode | None = None
) -> RecoveredAtoms:
    """Decode a session and report every atom value with its provenance."""
    _, record = _run_pipeline(plan, transcript, code)
    return record
