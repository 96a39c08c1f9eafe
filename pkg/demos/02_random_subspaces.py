"""
Searching random subspaces for product states
=============================================

A random subspace of dimension s_max almost never meets the product states,
one dimension more meets them in a fixed finite number of points.
"""

from entsub import RngStream, SearchConfig, enumerate_products, find_product_in_subspace, random_subspace, s_max

cfg = SearchConfig(restarts=200)

for dims in [(2, 2), (2, 3), (3, 3), (2, 2, 2)]:
    s = s_max(dims)
    S = random_subspace(dims, s, RngStream(1, 0))
    res = find_product_in_subspace(S, cfg, RngStream(2, 0))
    # the best overlap stays visibly below one; absence is heuristic
    print(dims, f"s={s}", res.verdict, f"best overlap {res.best_overlap:.5f}")

    S = random_subspace(dims, s + 1, RngStream(1, 1))
    count = enumerate_products(S, cfg, RngStream(2, 1))
    print(dims, f"s={s + 1}", "count", count.count, "formula", count.formula_expected,
          "saturated", count.saturated)
