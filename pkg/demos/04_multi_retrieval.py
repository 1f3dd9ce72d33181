"""Retrieving several files at once beats repeating a single-file scheme.

Two of three files are wanted.  Singleton blocks fetch most atoms
directly; two fully mixed blocks share atom indices across all files
with independent mixing rows, and a 2x2 solve separates the desired
pair.  The rate is compared against naive repetition and against the
capacity bound of the degenerate regimes.
"""

import numpy as np

import coded_pir as cp

params = cp.SchemeParams(
    variant="multifile", n_servers=4, code_dim=2, n_files=3,
    desired=(0, 1), collusion_size=2, seed=21,
)
plan = cp.build_plan(params)
print(f"alpha={plan.ab.alpha}, beta={plan.ab.beta}, L={plan.l_rows}")
singles = sum(1 for blk in plan.blocks if blk.mix_row is None)
print(f"blocks: {singles} single-atom + {len(plan.blocks) - singles} fully mixed")
print("mixing matrix rows:")
for row in plan.mix_matrix:
    print("  ", row.tolist())

db = cp.database_for_plan(plan, seed=22)
transcript = cp.run_session(plan, db)
recovered = cp.reconstruct(plan, transcript)
exact = all(np.array_equal(recovered[f], db.files[f]) for f in params.desired)
print("\nboth files recovered exactly:", exact)
print("achieved rate:", cp.achieved_rate(plan, transcript))

cmp = cp.naive_comparison(params)
print(f"\nadapted {cmp.adapted} vs naive repetition {cmp.naive}: better = {cmp.better}")

# in the degenerate regimes the scheme meets the capacity bound exactly
for case, x in (("K=1", params.collusion_size), ("T=1", params.code_dim)):
    bound = cp.multifile_capacity_bound(4, x, 3, 2, case)
    print(f"capacity bound, case {case}: {bound}")
