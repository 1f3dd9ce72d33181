"""Exploiting a known collusion structure instead of any-T-collude.

Five servers in a ring: only adjacent pairs can collude.  A family of
five triples aligned with the ring gives delta/b = 4/5, beating the
10/19 rate of the uniform two-collusion scheme with 5/9.  The audit
shows the pattern pairs are protected while a non-adjacent pair is not,
which is the accepted trade.
"""

import numpy as np

import coded_pir as cp

pentagon = cp.CollusionPattern(((0, 1), (1, 2), (2, 3), (3, 4), (0, 4)))
family, evaluation = cp.optimize_family(pentagon, k=3, n_servers=5)
print("best family found:", [list(blk) for blk in family.blocks])
print(f"b={evaluation.b}, delta={evaluation.delta}, ratio={evaluation.ratio}")

rate = cp.inverse_geometric_sum(evaluation.ratio, 2)
uniform = cp.closed_form_rate(cp.SchemeParams(
    variant="prototype", n_servers=5, code_dim=3, n_files=2, collusion_size=2))
print(f"pattern-aware rate {rate} vs any-2-collude rate {uniform}")

params = cp.SchemeParams(
    variant="pattern", n_servers=5, code_dim=3, n_files=2,
    desired=(0,), pattern=pentagon, family=family, seed=31,
)
plan = cp.build_plan(params)
db = cp.database_for_plan(plan, seed=32)
transcript = cp.run_session(plan, db)
recovered = cp.reconstruct(plan, transcript)
print("exact recovery:", np.array_equal(recovered[0], db.files[0]))
print("achieved rate: ", cp.achieved_rate(plan, transcript))

print("\nrank audit over the pattern's pairs:")
for audit in cp.full_privacy_sweep(plan):
    print(f"  {audit.collusion_set}: ranks {audit.per_file_rank} "
          f"(expected {audit.expected_rank}) pass={audit.passed}")

outside = cp.collusion_view_ranks(plan, (0, 2))
print(f"\nnon-adjacent pair (0, 2): ranks {outside.per_file_rank} -> pass={outside.passed}")
print("that pair sees every atom; the desired file's atoms stand out as independent")
