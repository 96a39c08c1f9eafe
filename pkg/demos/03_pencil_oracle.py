"""
Exact counts from a matrix pencil
=================================

For a two-dimensional subspace of a d x d system the rank-deficient members
are the roots of det(alpha A + beta B).  This gives an exact check on the
numerical searches.
"""

import numpy as np

from entsub import (
    RngStream,
    SearchConfig,
    count_rank_deficient_pencil,
    enumerate_low_rank,
    enumerate_products,
    random_subspace,
)

# 2 x 2: the two roots are the two product states.
S = random_subspace((2, 2), 2, RngStream(5, 0))
roots = count_rank_deficient_pencil(S)
found = enumerate_products(S, SearchConfig(), RngStream(6, 0))
print("pencil roots:", roots.count, "clustered products:", found.count)

# 3 x 3: three states of Schmidt rank 2, found by alternating projections.
S = random_subspace((3, 3), 2, RngStream(5, 1))
roots = count_rank_deficient_pencil(S)
low = enumerate_low_rank(S, 2, SearchConfig(), RngStream(6, 1))
for x in roots.states:
    best = max(abs(np.vdot(x.amps, y.amps)) ** 2 for y in low.representatives)
    print(f"root matched with fidelity {best:.12f}")
