"""Readers and writers for ultrametric spaces and trees.

Ultrametric space JSON::

    {"points": ["a", "b"], "heights": [[null, "1/2"], ["1/2", null]]}

Tree JSON mirrors :class:`RootedTree`::

    {"root": "v", "parent": {"a": "v"}, "edge_length": {"a": "1"},
     "truncation_depth": "1"}

Newick subset: rooted, optional labels (bare or single-quoted), branch
lengths as exact rationals (``3``, ``3/2`` or ``1.5``; missing means 1), no
comments, no root branch length.
"""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .rationals import format_rational, parse_rational
from .trees import RootedTree
from .ultrametric import UltrametricSpace


class FormatError(ValueError):
    def __init__(self, message: str, position=None):
        where = "" if position is None else f" (at {position})"
        super().__init__(message + where)
        self.position = position


def _exact_float(text: str) -> str:
    # keep the literal; parse_rational decides whether it is an exact decimal
    return text


def _loads(text: str):
    try:
        return json.loads(text, parse_float=_exact_float)
    except json.JSONDecodeError as exc:
        raise FormatError(exc.msg, f"line {exc.lineno}, column {exc.colno}") from None


def _rational(value, where) -> Fraction:
    try:
        return parse_rational(value)
    except ValueError as exc:
        raise FormatError(str(exc), where) from None


# -- ultrametric spaces -----------------------------------------------------

def space_from_json(text: str) -> UltrametricSpace:
    doc = _loads(text)
    if not isinstance(doc, dict) or "points" not in doc or "heights" not in doc:
        raise FormatError("expected an object with 'points' and 'heights'")
    points = doc["points"]
    rows = doc["heights"]
    if not isinstance(points, list) or not all(isinstance(p, str) for p in points):
        raise FormatError("'points' must be a list of strings")
    if not isinstance(rows, list) or len(rows) != len(points):
        raise FormatError("'heights' must have one row per point")
    parsed = []
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != len(points):
            raise FormatError("height row has the wrong length", f"row {i}")
        parsed.append(tuple(
            None if h is None else _rational(h, f"heights[{i}][{j}]")
            for j, h in enumerate(row)
        ))
    try:
        return UltrametricSpace(tuple(points), tuple(parsed))
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def space_to_json(space: UltrametricSpace) -> str:
    def cell(h):
        return "null" if h is None else json.dumps(format_rational(h))

    rows = ",\n".join(
        "    [" + ", ".join(cell(h) for h in row) + "]" for row in space.heights
    )
    points = ", ".join(json.dumps(p) for p in space.points)
    return '{\n  "points": [' + points + '],\n  "heights": [\n' + rows + "\n  ]\n}\n"


# -- trees ------------------------------------------------------------------

def tree_from_json(text: str) -> RootedTree:
    doc = _loads(text)
    if not isinstance(doc, dict) or "root" not in doc or "parent" not in doc:
        raise FormatError("expected an object with 'root' and 'parent'")
    lengths = doc.get("edge_length")
    if lengths is not None:
        lengths = {k: _rational(v, f"edge_length[{k!r}]") for k, v in lengths.items()}
    tag = doc.get("truncation_depth")
    if tag is not None:
        tag = _rational(tag, "truncation_depth")
    try:
        return RootedTree(doc["root"], doc["parent"], lengths, truncation_depth=tag)
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def tree_to_json(tree: RootedTree) -> str:
    order = [v for v in tree.vertices if v != tree.root]
    doc = {
        "root": tree.root,
        "parent": {v: tree.parent[v] for v in order},
        "edge_length": {v: format_rational(tree.edge_length[v]) for v in order},
        "truncation_depth": None
        if tree.truncation_depth is None
        else format_rational(tree.truncation_depth),
    }
    return json.dumps(doc, indent=2) + "\n"


_SPECIAL = set("()[]':;, \t\r\n")


class _NewickParser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.parent: dict[str, str] = {}
        self.length: dict[str, Fraction] = {}
        self.named: list[str] = []
        self.anonymous: list[int] = []
        self.nodes: list[dict] = []

    def error(self, message: str):
        raise FormatError(message, f"offset {self.pos}")

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t\r\n":
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def label(self):
        self.skip()
        if self.peek() == "'":
            self.pos += 1
            out = []
            while True:
                if self.pos >= len(self.text):
                    self.error("unterminated quoted label")
                ch = self.text[self.pos]
                self.pos += 1
                if ch == "'":
                    if self.text[self.pos:self.pos + 1] == "'":
                        out.append("'")
                        self.pos += 1
                        continue
                    break
                out.append(ch)
            return "".join(out)
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos] not in _SPECIAL:
            self.pos += 1
        return self.text[start:self.pos] or None

    def branch_length(self):
        if self.peek() != ":":
            return None
        self.pos += 1
        self.skip()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos] not in _SPECIAL:
            self.pos += 1
        token = self.text[start:self.pos]
        try:
            q = parse_rational(token)
        except ValueError:
            self.pos = start
            self.error(f"branch length {token!r} is not an exact rational")
        if q <= 0:
            self.pos = start
            self.error("branch lengths must be positive")
        return q

    def subtree(self) -> int:
        node = {"children": [], "label": None}
        idx = len(self.nodes)
        self.nodes.append(node)
        if self.peek() == "(":
            self.pos += 1
            while True:
                child = self.subtree()
                length = self.branch_length()
                self.nodes[child]["length"] = Fraction(1) if length is None else length
                node["children"].append(child)
                ch = self.peek()
                if ch == ",":
                    self.pos += 1
                    continue
                if ch == ")":
                    self.pos += 1
                    break
                if ch == "[":
                    self.error("comments are not supported")
                self.error("expected ',' or ')'")
        if self.peek() == "[":
            self.error("comments are not supported")
        node["label"] = self.label()
        return idx

    def parse(self) -> RootedTree:
        root = self.subtree()
        if self.peek() == ":":
            self.error("a root branch length is not allowed")
        if self.peek() == "[":
            self.error("comments are not supported")
        if self.peek() != ";":
            self.error("expected ';'")
        self.pos += 1
        if self.peek():
            self.error("trailing text after ';'")
        labels = [n["label"] for n in self.nodes if n["label"] is not None]
        if len(set(labels)) != len(labels):
            dup = next(l for l in labels if labels.count(l) > 1)
            raise FormatError(f"duplicate label {dup!r}")
        prefix = "_"
        while any(l.startswith(prefix) for l in labels):
            prefix += "_"
        names = [
            n["label"] if n["label"] is not None else f"{prefix}{i}"
            for i, n in enumerate(self.nodes)
        ]
        parent, length = {}, {}
        for i, n in enumerate(self.nodes):
            for c in n["children"]:
                parent[names[c]] = names[i]
                length[names[c]] = self.nodes[c]["length"]
        tree = RootedTree(names[root], parent, length)
        depths = {tree.depth[v] for v in tree.leaves}
        if len(tree.leaves) > 1 and len(depths) == 1:
            tree = RootedTree(names[root], parent, length, truncation_depth=depths.pop())
        return tree


def tree_from_newick(text: str) -> RootedTree:
    """Parse a Newick string.

    Unlabelled vertices get fresh labels; a tree whose leaves all sit at one
    depth is tagged as a truncation at that depth.
    """
    return _NewickParser(text).parse()


def _quote(label: str) -> str:
    if label and not any(ch in _SPECIAL for ch in label):
        return label
    return "'" + label.replace("'", "''") + "'"


def tree_to_newick(tree: RootedTree) -> str:
    def render(v: str) -> str:
        kids = tree.children[v]
        body = ""
        if kids:
            body = "(" + ",".join(
                f"{render(c)}:{format_rational(tree.edge_length[c])}" for c in kids
            ) + ")"
        return body + _quote(v)

    return render(tree.root) + ";\n"


# -- file helpers -----------------------------------------------------------

def load_space(path) -> UltrametricSpace:
    """Load an ultrametric space; tree files are converted to their end space."""
    from .trees import end_space

    path = Path(path)
    text = path.read_text()
    if path.suffix in (".nwk", ".newick", ".tree"):
        return end_space(tree_from_newick(text))
    doc_start = text.lstrip()[:1]
    if doc_start == "{" and '"root"' in text and '"points"' not in text:
        return end_space(tree_from_json(text))
    return space_from_json(text)


def load_tree(path) -> RootedTree:
    path = Path(path)
    text = path.read_text()
    if text.lstrip().startswith("{"):
        return tree_from_json(text)
    return tree_from_newick(text)
