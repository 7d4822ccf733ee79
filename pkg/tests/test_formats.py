from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from dendrorho.formats import (
    FormatError, load_space, load_tree, space_from_json, space_to_json, tree_from_json,
    tree_from_newick, tree_to_json, tree_to_newick,
)
from dendrorho.generators import gen_example41, gen_random_tree
from dendrorho.trees import RootedTree, canonical_code, end_space

from conftest import spaces


def test_space_json_example():
    s = space_from_json('{"points": ["a", "b"], "heights": [[null, "1/2"], [0.5, null]]}')
    assert s.height("a", "b") == Fraction(1, 2)
    assert s.heights[1][0] == Fraction(1, 2)


@given(spaces())
def test_space_json_round_trip_is_bit_exact(s):
    text = space_to_json(s)
    again = space_from_json(text)
    assert again == s
    assert space_to_json(again) == text


def test_example_space_round_trip():
    for s in gen_example41(3):
        assert space_from_json(space_to_json(s)) == s


@pytest.mark.parametrize(
    "text",
    [
        '{"points": ["a", "b"], "heights": [[null, 1e-3], [1e-3, null]]}',
        '{"points": ["a", "b"], "heights": [[null, "1/0"], ["1", null]]}',
        '{"points": ["a", "b"], "heights": [[null, "x"], ["1", null]]}',
        '{"points": ["a"], "heights": []}',
        '{"points": ["a", "a"], "heights": [[null, 1], [1, null]]}',
        '{"points": ["a", "b"], "heights": [[null, 1], [1, null]',
        '[]',
    ],
)
def test_space_json_rejects(text):
    with pytest.raises(FormatError):
        space_from_json(text)


def test_json_error_has_position():
    with pytest.raises(FormatError) as exc:
        space_from_json('{"points": ["a"],\n "heights": [[null]')
    assert "line 2" in str(exc.value)
    with pytest.raises(FormatError) as exc:
        space_from_json('{"points": ["a", "b"], "heights": [[null, "q"], ["1", null]]}')
    assert exc.value.position == "heights[0][1]"


def test_newick_basic():
    t = tree_from_newick("((a:1,b:1)x:1,(c:1,d:1)y:1)r;")
    assert t.root == "r" and tuple(t.leaves) == ("a", "b", "c", "d")
    assert t.truncation_depth == 2 and t.simplicial


def test_newick_exact_lengths_and_defaults():
    t = tree_from_newick("((a:3/2,b:1.5),c:0.25);")
    assert t.depth["a"] == Fraction(5, 2) and t.depth["b"] == Fraction(5, 2)
    assert t.depth["c"] == Fraction(1, 4)
    assert t.truncation_depth is None


def test_newick_quoted_labels():
    t = tree_from_newick("('a b':1,'it''s':1)'r;';")
    assert set(t.leaves) == {"a b", "it's"} and t.root == "r;"
    assert tree_from_newick(tree_to_newick(t)).leaves == t.leaves


@pytest.mark.parametrize(
    "text",
    ["(a:1,b:1e2);", "(a:1,b:1)r:1;", "(a:1,b:1)[c]r;", "(a:1,a:1);", "(a:1,b:0);",
     "(a:1,b:-1);", "(a:1,b:1", "(a:1,b:1);x", "(a:1,,b:1);x"],
)
def test_newick_rejects(text):
    with pytest.raises(FormatError):
        tree_from_newick(text)


def test_newick_error_has_position():
    with pytest.raises(FormatError) as exc:
        tree_from_newick("(a:1,b:1e2);")
    assert exc.value.position is not None


seeds = st.integers(0, 2**32 - 1)


@given(seeds, st.integers(1, 3))
def test_tree_round_trips(seed, depth):
    t = gen_random_tree(seed, depth, 2, 3)
    nwk = tree_from_newick(tree_to_newick(t))
    js = tree_from_json(tree_to_json(t))
    for other in (nwk, js):
        assert other.parent == t.parent and other.edge_length == t.edge_length
        assert other.truncation_depth == t.truncation_depth
        assert canonical_code(other) == canonical_code(t)
    assert tree_to_newick(nwk) == tree_to_newick(t)
    assert tree_to_json(js) == tree_to_json(t)


def test_tree_json_weighted_round_trip():
    t = RootedTree("r", {"a": "r", "b": "a"}, {"a": Fraction(1, 3), "b": 2})
    again = tree_from_json(tree_to_json(t))
    assert again.edge_length == t.edge_length and again.truncation_depth is None


def test_load_helpers(tmp_path):
    t = gen_random_tree(5, 2)
    (tmp_path / "t.nwk").write_text(tree_to_newick(t))
    (tmp_path / "t.json").write_text(tree_to_json(t))
    (tmp_path / "s.json").write_text(space_to_json(end_space(t)))
    for name in ("t.nwk", "t.json", "s.json"):
        assert load_space(tmp_path / name) == end_space(t)
    assert load_tree(tmp_path / "t.nwk").parent == t.parent
    assert load_tree(tmp_path / "t.json").parent == t.parent
