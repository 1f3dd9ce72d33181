"""Privacy rank audits, exact rate accounting, and closed-form rates.

Every rate and bound is an exact ``fractions.Fraction``; nothing here
touches floating point.  The privacy audit is rank-level: for a given
set of colluding servers it stacks, per file, the coefficient vectors of
every atom those servers see, and passes iff all files show the same
rank and that rank matches the construction's predicted view dimension.
Equal ranks are the machine-checkable face of the schemes' privacy
argument; distributional indistinguishability beyond rank is out of
scope and documented as such.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .gf import mat_rank
from .patterns import family_eval
from .plans import PreconditionViolated, QueryPlan, SchemeParams, Variant
from .storage import Transcript


@dataclass(frozen=True)
class PrivacyAudit:
    """Rank check for one collusion set; passes iff ranks agree and match."""

    collusion_set: tuple[int, ...]
    per_file_rank: tuple[int, ...]
    expected_rank: int
    passed: bool


@dataclass(frozen=True)
class RateReport:
    achieved: Fraction
    closed_form: Fraction
    match: bool


@dataclass(frozen=True)
class NaiveComparison:
    adapted: Fraction
    naive: Fraction
    better: bool


def inverse_geometric_sum(ratio: Fraction, m: int) -> Fraction:
    """1 / (1 + ratio + ratio**2 + ... + ratio**(m-1)), exactly."""
    total = sum((ratio**i for i in range(m)), Fraction(0))
    return 1 / total


def closed_form_rate(params: SchemeParams) -> Fraction:
    """The variant's closed-form rate at these parameters."""
    params.validate()
    n, k, t, m = params.n_servers, params.code_dim, params.collusion_size, params.n_files
    if params.variant is Variant.PATTERN:
        ev = family_eval(params.pattern, params.family)
        return inverse_geometric_sum(ev.ratio, m)
    cn = comb(n, k)
    hit = cn - comb(n - t, k)
    if params.variant is Variant.PROTOTYPE:
        return inverse_geometric_sum(Fraction(hit, cn), m)
    if params.variant is Variant.ROBUST:
        s = params.s_robust
        prefactor = Fraction(comb(n - s - 1, k - 1), comb(n - 1, k - 1))
        return prefactor * inverse_geometric_sum(Fraction(hit, comb(n - s, k)), m)
    if params.variant is Variant.BYZANTINE:
        spare = 2 * comb(n - params.b_byzantine, k) - cn
        return Fraction(spare, cn) * inverse_geometric_sum(Fraction(hit, spare), m)
    # Multifile: P files at once.
    p_files = params.p_desired
    return Fraction(p_files * cn, m * hit + p_files * comb(n - t, k))


def achieved_rate(plan: QueryPlan, transcript: Transcript) -> Fraction:
    """Retrieved field elements over downloaded field elements."""
    retrieved = plan.params.p_desired * plan.l_rows * plan.params.code_dim
    return Fraction(retrieved, transcript.downloaded_symbols)


def rate_report(plan: QueryPlan, transcript: Transcript) -> RateReport:
    achieved = achieved_rate(plan, transcript)
    closed = closed_form_rate(plan.params)
    return RateReport(achieved=achieved, closed_form=closed, match=achieved == closed)


def collusion_view_ranks(plan: QueryPlan, servers) -> PrivacyAudit:
    """Per-file rank of the atom coefficients visible to these servers."""
    view = tuple(sorted(set(int(n) for n in servers)))
    if not view:
        raise ValueError("collusion set must be nonempty")
    visible = plan.visible_symbols(view)
    ranks = []
    for f in range(plan.params.n_files):
        atom_ids: set[int] = set()
        for blk in plan.blocks:
            if f in blk.label:
                atom_ids.update(blk.atoms[f][s] for s in visible)
        rows = plan.atom_coeffs[f][sorted(atom_ids)]
        ranks.append(mat_rank(rows, plan.params.modulus))
    expected = plan.expected_view_dim(view)
    ranks_t = tuple(ranks)
    passed = len(set(ranks_t)) == 1 and ranks_t[0] == expected
    return PrivacyAudit(
        collusion_set=view, per_file_rank=ranks_t, expected_rank=expected, passed=passed
    )


def full_privacy_sweep(plan: QueryPlan) -> list[PrivacyAudit]:
    """One audit per maximal collusion set of the plan's variant."""
    return [collusion_view_ranks(plan, t) for t in plan.maximal_collusion_sets()]


def multifile_capacity_bound(
    n_servers: int, k_or_t: int, n_files: int, p_files: int, case: str = "T=1"
) -> Fraction:
    """Upper bound on the multi-retrieval capacity in a degenerate regime.

    ``case`` names which of the two collusion/storage parameters is 1;
    ``k_or_t`` is the value of the other one (K when case is "T=1", T
    when case is "K=1"; the bound has the same shape in both).  For
    n_files <= 2 * p_files this reduces to
    (1 + k_or_t * (M - P) / (P * N))**-1.
    """
    if case not in ("K=1", "T=1"):
        raise ValueError(f'case must be "K=1" or "T=1", got {case!r}')
    if p_files < 1 or n_files < p_files:
        raise ValueError(f"need 1 <= P <= M, got P={p_files}, M={n_files}")
    q = Fraction(k_or_t, n_servers)
    whole = n_files // p_files
    frac = Fraction(n_files, p_files) - whole
    denom = sum((q**i for i in range(whole)), Fraction(0)) + frac * q**whole
    return 1 / denom


def naive_comparison(params: SchemeParams) -> NaiveComparison:
    """Adapted multi-retrieval rate vs running one scheme per file.

    The naive route runs P independent single-file schemes, crediting
    the side retrievals of the other desired files each run yields for
    free.  ``better`` is a strict comparison.
    """
    if params.variant is not Variant.MULTI_FILE:
        raise PreconditionViolated("naive comparison applies to the multifile variant")
    params.validate()
    n, k, t, m = params.n_servers, params.code_dim, params.collusion_size, params.n_files
    r = 1 - Fraction(comb(n - t, k), comb(n, k))
    naive = (1 + r ** (m - 1) * params.p_desired - r ** (m - 1)) * inverse_geometric_sum(r, m)
    adapted = closed_form_rate(params)
    return NaiveComparison(adapted=adapted, naive=naive, better=adapted > naive)


def audit_report(plan: QueryPlan) -> dict:
    """JSON-ready report of the full privacy sweep."""
    audits = full_privacy_sweep(plan)
    from .plans import params_to_dict

    return {
        "schema": "coded-pir-audit/1",
        "params": params_to_dict(plan.params),
        "audits": [
            {
                "collusion_set": list(a.collusion_set),
                "per_file_rank": list(a.per_file_rank),
                "expected_rank": a.expected_rank,
                "pass": a.passed,
            }
            for a in audits
        ],
        "all_pass": all(a.passed for a in audits),
    }


def session_report(plan: QueryPlan, transcript: Transcript) -> dict:
    """Combined JSON-ready report: privacy audits plus rate accounting."""
    doc = audit_report(plan)
    report = rate_report(plan, transcript)
    doc["achieved"] = f"{report.achieved.numerator}/{report.achieved.denominator}"
    doc["closed_form"] = f"{report.closed_form.numerator}/{report.closed_form.denominator}"
    doc["match"] = report.match
    return doc
