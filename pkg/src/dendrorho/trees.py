"""Finite rooted trees with exact edge lengths.

A :class:`RootedTree` is the finite stand-in for a rooted geodesically
complete tree: when ``truncation_depth`` is set, every leaf sits at exactly
that depth and each leaf stands for the ray continuing through it.  The end
space of such a tree is the ultrametric space of its leaves, with the depth
of the meet of two leaves as their height.
"""
from __future__ import annotations

from collections import deque
from fractions import Fraction
from typing import Mapping, NamedTuple, Optional

from .rationals import format_rational, parse_rational
from .ultrametric import UltrametricSpace, validate, InvalidSpaceError


class TreeError(ValueError):
    pass


class RootedTree:
    """Immutable rooted tree.

    ``parent`` maps every non-root vertex to its parent and ``edge_length``
    maps it to the (positive, exact) length of that edge.  Children keep the
    insertion order of ``parent``, which fixes leaf order and every
    tie-break downstream.
    """

    __slots__ = (
        "root", "parent", "edge_length", "truncation_depth",
        "children", "vertices", "depth", "hops", "leaves",
    )

    def __init__(
        self,
        root: str,
        parent: Mapping[str, str],
        edge_length: Optional[Mapping[str, object]] = None,
        truncation_depth=None,
    ):
        parent = {str(k): str(v) for k, v in parent.items()}
        if edge_length is None:
            edge_length = {v: 1 for v in parent}
        lengths = {}
        for v in parent:
            if v not in edge_length:
                raise TreeError(f"missing edge length for {v!r}")
            q = parse_rational(edge_length[v])
            if q <= 0:
                raise TreeError(f"edge length of {v!r} must be positive")
            lengths[v] = q
        if set(edge_length) - set(parent):
            raise TreeError("edge lengths given for vertices without a parent")
        root = str(root)
        if root in parent:
            raise TreeError("the root cannot have a parent")
        children: dict[str, list[str]] = {root: []}
        for v in parent:
            children.setdefault(v, [])
        for v, p in parent.items():
            if p not in children:
                raise TreeError(f"parent {p!r} of {v!r} is not a vertex")
            children[p].append(v)

        # preorder walk from the root; anything unreached sits on a cycle
        order, depth, hops = [], {root: Fraction(0)}, {root: 0}
        stack = [root]
        while stack:
            v = stack.pop()
            order.append(v)
            for c in reversed(children[v]):
                depth[c] = depth[v] + lengths[c]
                hops[c] = hops[v] + 1
                stack.append(c)
        if len(order) != len(children):
            raise TreeError("parent map has a cycle or does not reach the root")

        leaves = tuple(v for v in order if not children[v])
        if truncation_depth is not None:
            truncation_depth = parse_rational(truncation_depth)
            bad = [v for v in leaves if depth[v] != truncation_depth]
            if bad:
                raise TreeError(
                    f"leaf {bad[0]!r} at depth {depth[bad[0]]}, "
                    f"truncation depth is {truncation_depth}"
                )

        s = object.__setattr__
        s(self, "root", root)
        s(self, "parent", parent)
        s(self, "edge_length", lengths)
        s(self, "truncation_depth", truncation_depth)
        s(self, "children", {v: tuple(c) for v, c in children.items()})
        s(self, "vertices", tuple(order))
        s(self, "depth", depth)
        s(self, "hops", hops)
        s(self, "leaves", leaves)

    def __setattr__(self, name, value):
        raise AttributeError("RootedTree is immutable")

    def __repr__(self) -> str:
        return (
            f"RootedTree(root={self.root!r}, vertices={len(self.vertices)}, "
            f"leaves={len(self.leaves)}, truncation_depth={self.truncation_depth})"
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, RootedTree):
            return NotImplemented
        return (
            self.root == other.root
            and self.parent == other.parent
            and self.edge_length == other.edge_length
            and self.truncation_depth == other.truncation_depth
        )

    def __hash__(self):
        return hash((self.root, tuple(sorted(self.parent.items()))))

    @property
    def simplicial(self) -> bool:
        return all(q == 1 for q in self.edge_length.values())

    def _check(self, x: str) -> None:
        if x not in self.children:
            raise KeyError(f"unknown vertex {x!r}")

    def is_leaf(self, x: str) -> bool:
        self._check(x)
        return not self.children[x]

    def norm(self, x: str) -> Fraction:
        """Distance from the root."""
        self._check(x)
        return self.depth[x]

    def meet(self, x: str, y: str) -> str:
        """Deepest common ancestor of ``x`` and ``y``."""
        self._check(x)
        self._check(y)
        while self.hops[x] > self.hops[y]:
            x = self.parent[x]
        while self.hops[y] > self.hops[x]:
            y = self.parent[y]
        while x != y:
            x, y = self.parent[x], self.parent[y]
        return x

    def gromov_product(self, f: str, g: str) -> Fraction:
        if f == g:
            raise ValueError("the Gromov product of an end with itself is infinite")
        for v in (f, g):
            if not self.is_leaf(v):
                raise ValueError(f"{v!r} is not a leaf")
        return self.depth[self.meet(f, g)]

    def ord(self, x: str) -> int:
        """Graph degree of ``x``."""
        self._check(x)
        return len(self.children[x]) + (x != self.root)

    def descendants(self, x: str, k: int) -> set[str]:
        """Vertices exactly ``k`` edges below ``x``."""
        self._check(x)
        if not self.simplicial:
            raise TreeError("descendants by hop count need a simplicial tree")
        if k < 0:
            raise ValueError("k must be non-negative")
        frontier = [x]
        for _ in range(k):
            frontier = [c for v in frontier for c in self.children[v]]
        return set(frontier)

    def subtree(self, x: str) -> "RootedTree":
        """The tree of vertices whose root path passes through ``x``, rooted at ``x``."""
        self._check(x)
        keep, queue = [], deque([x])
        while queue:
            v = queue.popleft()
            keep.append(v)
            queue.extend(self.children[v])
        keep = set(keep)
        parent = {v: self.parent[v] for v in self.vertices if v in keep and v != x}
        tag = None
        if self.truncation_depth is not None:
            tag = self.truncation_depth - self.depth[x]
            if tag == 0:
                tag = None
        return RootedTree(
            x, parent, {v: self.edge_length[v] for v in parent}, truncation_depth=tag
        )

    def rebase(self, w: str) -> "RootedTree":
        """Same underlying tree, rooted at ``w``.

        The truncation tag is dropped unless ``w`` is the current root, since
        leaf depths are no longer uniform.
        """
        self._check(w)
        if w == self.root:
            return self
        adj: dict[str, list[tuple[str, Fraction]]] = {v: [] for v in self.vertices}
        for v in self.vertices:
            if v != self.root:
                p = self.parent[v]
                adj[v].append((p, self.edge_length[v]))
        for v in self.vertices:
            for c in self.children[v]:
                adj[v].append((c, self.edge_length[c]))
        parent, lengths = {}, {}
        seen, stack = {w}, [w]
        while stack:
            v = stack.pop()
            for u, q in adj[v]:
                if u not in seen:
                    seen.add(u)
                    parent[u] = v
                    lengths[u] = q
                    stack.append(u)
        # re-walk to store parents in a stable preorder
        order = {}
        stack = [w]
        kids: dict[str, list[str]] = {v: [] for v in self.vertices}
        for u, v in parent.items():
            kids[v].append(u)
        while stack:
            v = stack.pop()
            order[v] = len(order)
            stack.extend(reversed(kids[v]))
        ordered = sorted(parent, key=order.__getitem__)
        return RootedTree(w, {u: parent[u] for u in ordered}, {u: lengths[u] for u in ordered})

    def distance(self, x: str, y: str) -> Fraction:
        m = self.meet(x, y)
        return self.depth[x] + self.depth[y] - 2 * self.depth[m]


def end_space(tree: RootedTree) -> UltrametricSpace:
    """Leaves as points, meet depths as heights."""
    leaves = tree.leaves
    n = len(leaves)
    rows = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            rows[i][j] = rows[j][i] = tree.depth[tree.meet(leaves[i], leaves[j])]
    return UltrametricSpace(leaves, tuple(tuple(r) for r in rows))


def _fresh_prefix(labels) -> str:
    prefix = "_"
    while any(str(p).startswith(prefix) for p in labels):
        prefix += "_"
    return prefix


def dendrogram_from_ultrametric(space: UltrametricSpace) -> RootedTree:
    """Canonical tree of merge clusters of ``space``.

    Each cluster of two or more points becomes a vertex at depth equal to
    its smallest internal height; leaves sit at uniform depth
    ``max height + 1``.  The end space of the result reproduces ``space``
    exactly, labels included.
    """
    verdict = validate(space)
    if not verdict.ok:
        raise InvalidSpaceError(verdict)
    H = space.heights
    P = space.points
    n = len(P)
    heights = space.height_set()
    leaf_depth = (heights[-1] if heights else Fraction(0)) + 1
    prefix = _fresh_prefix(P)
    counter = iter(range(10**9))

    root = f"{prefix}{next(counter)}"
    parent: dict[str, str] = {}
    lengths: dict[str, Fraction] = {}

    def attach(cluster: list[int], above: str, above_depth: Fraction) -> None:
        if len(cluster) == 1:
            leaf = P[cluster[0]]
            parent[leaf] = above
            lengths[leaf] = leaf_depth - above_depth
            return
        level = min(H[i][j] for i in cluster for j in cluster if i < j)
        if level > above_depth:
            v = f"{prefix}{next(counter)}"
            parent[v] = above
            lengths[v] = level - above_depth
        else:
            v = above
        remaining = list(cluster)
        while remaining:
            head = remaining[0]
            block = [head] + [j for j in remaining[1:] if H[head][j] > level]
            remaining = [j for j in remaining if j not in block]
            attach(block, v, level)

    if n == 0:
        raise ValueError("empty space")
    attach(list(range(n)), root, Fraction(0))
    return RootedTree(root, parent, lengths, truncation_depth=leaf_depth)


def canonical_code(tree: RootedTree, weighted: bool = True) -> bytes:
    """Bottom-up canonical encoding with unary chains contracted.

    Weighted codes are equal iff the trees are rooted isometric; unweighted
    codes compare only the branching shape.
    """

    def contract(v: str, length: Fraction) -> tuple[str, Fraction]:
        while len(tree.children[v]) == 1:
            v = tree.children[v][0]
            length += tree.edge_length[v]
        return v, length

    def code(v: str) -> str:
        parts = []
        for c in tree.children[v]:
            c, length = contract(c, tree.edge_length[c])
            if weighted:
                parts.append(f"{format_rational(length)}:{code(c)}")
            else:
                parts.append(code(c))
        return "(" + ",".join(sorted(parts)) + ")"

    top = tree.root
    if not weighted:
        top, _ = contract(top, Fraction(0))
    return code(top).encode()


def canonical_leaf_order(tree: RootedTree) -> list[str]:
    """Leaves in the order induced by sorting children by weighted code."""
    memo: dict[str, str] = {}

    def key(v: str) -> str:
        if v not in memo:
            memo[v] = format_rational(tree.edge_length.get(v, 0)) + ":" + canonical_code(
                tree.subtree(v), weighted=True
            ).decode()
        return memo[v]

    out, stack = [], [tree.root]
    while stack:
        v = stack.pop()
        if not tree.children[v]:
            out.append(v)
        stack.extend(sorted(tree.children[v], key=key, reverse=True))
    return out


def subdivide(tree: RootedTree) -> RootedTree:
    """Split integer-length edges into unit edges (inserting degree-2 vertices)."""
    parent, lengths = {}, {}
    prefix = _fresh_prefix(tree.vertices)
    for v in tree.vertices:
        if v == tree.root:
            continue
        q = tree.edge_length[v]
        if q.denominator != 1:
            raise TreeError(f"edge to {v!r} has non-integer length {q}")
        above = tree.parent[v]
        for i in range(1, int(q)):
            mid = f"{prefix}{v}.{i}"
            parent[mid] = above
            lengths[mid] = 1
            above = mid
        parent[v] = above
        lengths[v] = 1
    return RootedTree(tree.root, parent, lengths, truncation_depth=tree.truncation_depth)


def truncate(tree: RootedTree, depth) -> RootedTree:
    """Keep the vertices at depth ``<= depth``; every leaf must reach it."""
    depth = parse_rational(depth)
    keep = [v for v in tree.vertices if tree.depth[v] <= depth]
    parent = {v: tree.parent[v] for v in keep if v != tree.root}
    return RootedTree(
        tree.root, parent, {v: tree.edge_length[v] for v in parent}, truncation_depth=depth
    )


def satisfies_min_degree_3(tree: RootedTree) -> bool:
    """Gate for the valence >= 3 class, checked on internal vertices only.

    Leaves of a truncation continue as rays, so they are exempt; the root
    needs at least two children and every other internal vertex degree 3.
    """
    for v in tree.vertices:
        if not tree.children[v]:
            continue
        if v == tree.root:
            if len(tree.children[v]) < 2:
                return False
        elif tree.ord(v) < 3:
            return False
    return True


class LemmaBound(NamedTuple):
    value: int
    vertex: Optional[str]
    side: Optional[str]


def _desc_profile(tree: RootedTree) -> dict[str, list[int]]:
    """For every vertex, the sizes of desc_k for k = 0, 1, ... down to the leaves."""
    prof: dict[str, list[int]] = {}
    for v in reversed(tree.vertices):
        counts = [1]
        for c in tree.children[v]:
            for k, m in enumerate(prof[c], start=1):
                if k == len(counts):
                    counts.append(0)
                counts[k] += m
        prof[v] = counts
    return prof


def _one_sided_bound(T: RootedTree, T2: RootedTree) -> LemmaBound:
    depth2 = int(T2.truncation_depth)
    prof2 = _desc_profile(T2)
    # max_k[k] = max |desc_k(x')| over vertices with depth(x') + k <= depth2
    max_k = [0] * (depth2 + 1)
    for v, counts in prof2.items():
        room = depth2 - int(T2.depth[v])
        for k in range(1, room + 1):
            size = counts[k] if k < len(counts) else 0
            max_k[k] = max(max_k[k], size)
    best = LemmaBound(0, None, None)
    for x in T.vertices:
        if not T.children[x]:
            continue
        m = T.ord(x) - 1
        D = next((k for k in range(1, depth2 + 1) if max_k[k] < m), 0)
        if D > best.value:
            best = LemmaBound(D, x, None)
    return best


def lemma_lower_bound(T: RootedTree, T2: RootedTree) -> LemmaBound:
    """Lower bound on the optimal distortion exponent from vertex orders.

    For an internal vertex ``x`` of one tree with ``ord(x) = m + 1``, ``D(x)``
    is the least ``k >= 1`` such that every vertex of the other tree whose
    ``k``-th descendant layer fits above the truncation has fewer than ``m``
    descendants at hop distance ``k``.  The bound is the largest ``D(x)``
    over both trees (0 when no ``k`` qualifies; ``vertex`` is then ``None``).
    """
    for t in (T, T2):
        if not t.simplicial or t.truncation_depth is None:
            raise TreeError("lemma bound needs simplicial truncated trees")
    a = _one_sided_bound(T, T2)
    b = _one_sided_bound(T2, T)
    if b.value > a.value:
        return LemmaBound(b.value, b.vertex, "second")
    if a.value > 0:
        return LemmaBound(a.value, a.vertex, "first")
    return LemmaBound(0, None, None)
