"""
Moving the root
===============

Re-rooting a tree at a vertex w one edge away changes the end space.  Here
is how far, measured by the optimal exponent, next to the distance d(v, w).
"""
from dendrorho.generators import gen_regular
from dendrorho.search import exact_kappa
from dendrorho.trees import end_space

for depth in (3, 4, 5):
    t = gen_regular(2, depth)
    for w in ("v.0", "v.0.0"):
        d = t.hops[w]
        r = exact_kappa(end_space(t), end_space(t.rebase(w)), time_limit=30)
        k = r.kappa if r.complete else f"[{r.lower_bound}, {r.upper_bound}]"
        print(f"binary depth {depth}, d(v,w)={d}: kappa={k}")

# A new root of degree 3 inside a binary tree breaks the branching, so the
# exponent is at least 1 even for d(v, w) = 1.
