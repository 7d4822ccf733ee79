"""
Trees, their ends, and a cheap lower bound
==========================================

A tree with trifurcations against the binary tree.  Vertex orders alone give
a lower bound on the optimal exponent; the exact search confirms it.
"""
from dendrorho.formats import tree_to_newick
from dendrorho.generators import gen_regular
from dendrorho.search import exact_kappa
from dendrorho.suites import trifurcation_pair_16
from dendrorho.trees import end_space, lemma_lower_bound, satisfies_min_degree_3

T, B = trifurcation_pair_16()
print("T =", tree_to_newick(T).strip())
print("leaves:", len(T.leaves), "vs", len(B.leaves), "| valence gate:", satisfies_min_degree_3(T))

bound = lemma_lower_bound(T, B)
print(f"bound {bound.value} from vertex {bound.vertex} of the {bound.side} tree")
r = exact_kappa(end_space(T), end_space(B))
print(f"exact kappa {r.kappa}, rho = ln(1 + 2*{r.kappa}) = {r.rho:.4f}")

print("binary vs binary:", lemma_lower_bound(gen_regular(2, 3), gen_regular(2, 4)))
