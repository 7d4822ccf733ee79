from __future__ import annotations

import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from dendrorho.equivalence import isometry_oracle
from dendrorho.generators import gen_example41, gen_random_tree, gen_regular, gen_random_ultrametric
from dendrorho.search import exact_kappa
from dendrorho.suites import trifurcation_pair_8
from dendrorho.trees import (
    RootedTree, TreeError, canonical_code, dendrogram_from_ultrametric, end_space,
    lemma_lower_bound, satisfies_min_degree_3, subdivide, truncate,
)
from dendrorho.ultrametric import relabel, restrict, validate

from conftest import spaces

seeds = st.integers(0, 2**32 - 1)


def root_path(t, x):
    path = [x]
    while x != t.root:
        x = t.parent[x]
        path.append(x)
    return path


@st.composite
def trees(draw, max_depth=3):
    return gen_random_tree(draw(seeds), draw(st.integers(1, max_depth)), 2, 3)


def ex41_tree():
    U, _ = gen_example41(1)
    return dendrogram_from_ultrametric(U)


def test_construction_errors():
    with pytest.raises(TreeError):
        RootedTree("r", {"a": "b", "b": "a"})
    with pytest.raises(TreeError):
        RootedTree("r", {"a": "r"}, {"a": 0})
    with pytest.raises(TreeError):
        RootedTree("r", {"a": "r", "b": "r", "c": "a"}, truncation_depth=2)


def test_meet_examples():
    t = ex41_tree()
    assert t.meet("F0", "F0") == "F0"
    assert t.depth[t.meet("F1", "H1")] == 2
    assert t.gromov_product("F0", "G0") == 1
    with pytest.raises(KeyError):
        t.meet("F0", "nope")


def test_gromov_product_errors_and_root_siblings():
    t = gen_regular(2, 1)
    assert t.gromov_product("v.0", "v.1") == 0
    with pytest.raises(ValueError):
        t.gromov_product("v.0", "v.0")


@given(trees())
def test_meet_matches_path_intersection(t):
    for x, y in itertools.combinations(t.vertices, 2):
        common = set(root_path(t, x)) & set(root_path(t, y))
        m = max(common, key=lambda v: t.hops[v])
        assert t.meet(x, y) == m


def test_end_space_binary_depth_2():
    s = end_space(gen_regular(2, 2))
    assert len(s) == 4
    assert s.height("v.0.0", "v.0.1") == 1 and s.height("v.0.0", "v.1.0") == 0


def test_end_space_reproduces_example_table():
    U, _ = gen_example41(2)
    back = end_space(dendrogram_from_ultrametric(U))
    for x, y in itertools.combinations(U.points, 2):
        assert back.height(x, y) == U.height(x, y)
    assert back.height("F1", "H1") == 2 and back.height("G2", "H2") == 1


@given(trees())
def test_end_space_validates(t):
    s = end_space(t)
    assert validate(s).ok
    assert all(h < t.truncation_depth for h in s.height_set())


def test_dendrogram_two_points():
    s = end_space(RootedTree("r", {"m": "r", "a": "m", "b": "m"}))
    t = dendrogram_from_ultrametric(s)
    assert sorted(t.depth[v] for v in t.vertices) == [0, 1, 2, 2]
    assert t.truncation_depth == 2


def test_dendrogram_trifurcation():
    U, _ = gen_example41(1)
    t = dendrogram_from_ultrametric(restrict(U, ["F0", "G0", "H0"]))
    internal = [v for v in t.vertices if t.children[v] and v != t.root]
    assert len(internal) == 1 and t.depth[internal[0]] == 1 and len(t.children[internal[0]]) == 3


@given(spaces())
def test_dendrogram_round_trip(s):
    back = end_space(dendrogram_from_ultrametric(s))
    assert set(back.points) == set(s.points)
    for x, y in itertools.combinations(s.points, 2):
        assert back.height(x, y) == s.height(x, y)


def test_ord_examples():
    t = ex41_tree()
    assert t.ord("F0") == 1
    assert gen_regular(2, 3).ord("v") == 2
    tri = t.parent["F0"]
    assert t.ord(tri) == 4


def test_descendants():
    t = gen_regular(2, 4)
    assert t.descendants("v.0", 0) == {"v.0"}
    assert len(t.descendants("v.0", 2)) == 4
    with pytest.raises(TreeError):
        ex41_tree().descendants("F0", 1)


@given(trees())
def test_descendants_match_bfs_frontier(t):
    for x in t.vertices:
        for k in range(4):
            expect = {v for v in t.vertices if t.hops[v] == t.hops[x] + k and x in root_path(t, v)}
            assert t.descendants(x, k) == expect


def test_rebase_examples():
    t = RootedTree("a", {"b": "a", "c": "b"})
    assert t.rebase("a") is t
    r = t.rebase("b")
    assert r.depth["a"] == 1 and r.depth["c"] == 1


@given(trees(), st.data())
def test_rebase_involution_and_validity(t, data):
    w = data.draw(st.sampled_from(t.vertices))
    r = t.rebase(w)
    assert validate(end_space(r)).ok
    back = r.rebase(t.root)
    assert canonical_code(back) == canonical_code(RootedTree(t.root, t.parent, t.edge_length))


def test_subtree_examples():
    t = gen_regular(2, 3)
    assert canonical_code(t.subtree("v")) == canonical_code(t)
    leaf = t.subtree("v.0.0.0")
    assert tuple(leaf.vertices) == ("v.0.0.0",)
    assert t.subtree("v.1").truncation_depth == 2


@given(trees(), st.data())
def test_subtree_is_descendant_closure(t, data):
    x = data.draw(st.sampled_from(t.vertices))
    sub = t.subtree(x)
    assert set(sub.vertices) == {v for v in t.vertices if x in root_path(t, v)}


def test_canonical_code_label_invariance():
    t = gen_regular(3, 2)
    perm = {v: f"q{i}" for i, v in enumerate(reversed(t.vertices))}
    other = RootedTree(perm[t.root], {perm[c]: perm[p] for c, p in reversed(list(t.parent.items()))})
    for w in (True, False):
        assert canonical_code(t, w) == canonical_code(other, w)


def test_canonical_code_edge_weight():
    a = RootedTree("r", {"x": "r", "y": "r"})
    b = RootedTree("r", {"x": "r", "y": "r"}, {"x": 1, "y": Fraction(3, 2)})
    assert canonical_code(a) != canonical_code(b)
    assert canonical_code(a, weighted=False) == canonical_code(b, weighted=False)


def test_canonical_code_example_pair_differs():
    U, V = gen_example41(1)
    a, b = dendrogram_from_ultrametric(U), dendrogram_from_ultrametric(V)
    assert canonical_code(a, weighted=False) != canonical_code(b, weighted=False)


def test_unary_chains_contracted():
    a = RootedTree("r", {"x": "r", "y": "r"}, {"x": 2, "y": 2})
    b = subdivide(a)
    assert len(b.vertices) == 5
    assert canonical_code(a) == canonical_code(b)


@given(seeds, seeds, st.integers(2, 7))
def test_weighted_code_equality_iff_isometry(s1, s2, n):
    U = gen_random_ultrametric(s1, n, (0, 1, 2))
    V = gen_random_ultrametric(s2, n, (0, 1, 2))
    V = relabel(V, {p: f"q{p}" for p in V.points})
    same = canonical_code(dendrogram_from_ultrametric(U)) == canonical_code(dendrogram_from_ultrametric(V))
    assert same == isometry_oracle(U, V)


def test_min_degree_gate():
    assert satisfies_min_degree_3(gen_regular(2, 3))
    assert not satisfies_min_degree_3(RootedTree("r", {"a": "r", "b": "a", "c": "a"}))
    assert not satisfies_min_degree_3(RootedTree("r", {"a": "r", "b": "a", "c": "b", "d": "b"}))


@given(seeds, st.integers(1, 3))
def test_random_tree_generator_in_gate_class(seed, depth):
    t = gen_random_tree(seed, depth, 2, 3)
    assert satisfies_min_degree_3(t)
    assert canonical_code(t) == canonical_code(gen_random_tree(seed, depth, 2, 3))


def test_truncate():
    t = truncate(gen_regular(2, 3), 2)
    assert len(t.leaves) == 4 and t.truncation_depth == 2


def test_lemma_binary_vs_binary():
    b = lemma_lower_bound(gen_regular(2, 3), gen_regular(2, 4))
    assert b.value == 0 and b.vertex is None


def test_lemma_trifurcation_vs_binary():
    parent = {"a": "r", "b": "r", "a0": "a", "a1": "a", "a2": "a", "b0": "b", "b1": "b", "b2": "b"}
    T = RootedTree("r", parent, truncation_depth=2)
    b = lemma_lower_bound(T, gen_regular(2, 3))
    assert b.value == 1 and b.vertex in ("a", "b")


def test_lemma_sound_on_eight_leaf_pair():
    T, T2 = trifurcation_pair_8()
    b = lemma_lower_bound(T, T2)
    k = exact_kappa(end_space(T), end_space(T2)).kappa
    assert b.value == 1 and k >= 1 and b.value <= k


def test_lemma_needs_simplicial_truncation():
    U, V = gen_example41(1)
    with pytest.raises(TreeError):
        lemma_lower_bound(dendrogram_from_ultrametric(U), dendrogram_from_ultrametric(V))
    with pytest.raises(TreeError):
        lemma_lower_bound(RootedTree("r", {"a": "r"}), gen_regular(2, 2))
