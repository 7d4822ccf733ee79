"""Deterministic constructions of spaces and trees.

Random objects use numpy's PCG64 generator (``numpy.random.default_rng``)
seeded with the given integer.  Corpora derive per-instance seeds with
``numpy.random.SeedSequence(seed).spawn(k)``; :func:`spawn_seeds` returns
those as plain integers so that every instance can be regenerated alone.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .rationals import parse_rational
from .trees import RootedTree
from .ultrametric import UltrametricSpace, InvalidSpaceError, validate


def spawn_seeds(seed: int, count: int) -> list[int]:
    children = np.random.SeedSequence(seed).spawn(count)
    return [int(c.generate_state(1, dtype=np.uint32)[0]) for c in children]


def gen_example41(N: int) -> tuple[UltrametricSpace, UltrametricSpace]:
    """Finite truncation of the two end spaces from the h_n example.

    ``U`` has triples ``F_i, G_i, H_i`` for ``0 <= i <= N``: the triple with
    ``i = 0`` is a trifurcation at height 1, the others have
    ``h(F_i, G_i) = 1`` and ``h(F_i, H_i) = 2``.  ``U'`` has triples for
    ``1 <= i <= N + 1`` with ``h(F'_i, G'_i) = 1`` and
    ``h(F'_i, H'_i) = 1 + 1/i``.  Pairs not listed above are
    forced by the three-point condition: ``h(G_i, H_i) = 1`` and different
    triples meet at height 0.
    """
    if N < 1:
        raise ValueError("N must be at least 1")

    def build(indices, tag, fh):
        points, pairs = [], {}
        for i in indices:
            F, G, H = f"F{tag}{i}", f"G{tag}{i}", f"H{tag}{i}"
            points += [F, G, H]
            pairs[(F, G)] = Fraction(1)
            pairs[(F, H)] = fh(i)
            pairs[(G, H)] = Fraction(1)
        for a in range(len(points)):
            for b in range(a + 1, len(points)):
                pairs.setdefault((points[a], points[b]), Fraction(0))
        return UltrametricSpace.from_heights(points, pairs)

    U = build(range(0, N + 1), "", lambda i: Fraction(1) if i == 0 else Fraction(2))
    U2 = build(range(1, N + 2), "'", lambda i: 1 + Fraction(1, i))
    return U, U2


def h_n_map(N: int, n: int) -> dict[str, str]:
    """The bijection ``h_n`` between the two spaces of :func:`gen_example41`.

    The trifurcating triple goes to triple ``n``; triples ``1 <= i < n`` are
    fixed and triples ``i >= n`` shift up by one.  Needs ``1 <= n <= N + 1``.
    """
    if not 1 <= n <= N + 1:
        raise ValueError("need 1 <= n <= N + 1")
    f = {}
    for i in range(N + 1):
        j = n if i == 0 else (i if i < n else i + 1)
        for letter in "FGH":
            f[f"{letter}{i}"] = f"{letter}'{j}"
    return f


def gen_regular(arity: int, depth: int) -> RootedTree:
    """Full ``arity``-ary simplicial tree truncated at ``depth``."""
    if arity < 2:
        raise ValueError("arity must be at least 2")
    if depth < 1:
        raise ValueError("depth must be at least 1")
    parent = {}
    layer = ["v"]
    for _ in range(depth):
        nxt = []
        for p in layer:
            for k in range(arity):
                c = f"{p}.{k}"
                parent[c] = p
                nxt.append(c)
        layer = nxt
    return RootedTree("v", parent, truncation_depth=depth)


def gen_random_tree(seed: int, depth: int, min_children: int = 2, max_children: int = 3) -> RootedTree:
    """Random simplicial tree with all leaves at ``depth``.

    Every internal vertex gets a uniform number of children in
    ``[min_children, max_children]``.
    """
    if depth < 1 or min_children < 1 or max_children < min_children:
        raise ValueError("impossible bounds")
    rng = np.random.default_rng(seed)
    parent = {}
    layer = ["v"]
    for _ in range(depth):
        nxt = []
        for p in layer:
            for k in range(int(rng.integers(min_children, max_children + 1))):
                c = f"{p}.{k}"
                parent[c] = p
                nxt.append(c)
        layer = nxt
    return RootedTree("v", parent, truncation_depth=depth)


def gen_random_ultrametric(seed: int, n: int, heights: Sequence = (0, 1, 2), max_split: int = 3) -> UltrametricSpace:
    """Random ultrametric space on points ``p0 .. p{n-1}``.

    The point set is split recursively; cross-block pairs of a split receive
    a height drawn from ``heights`` strictly above the enclosing split, and a
    block that runs out of heights splits into singletons.
    """
    if n < 1:
        raise ValueError("n must be positive")
    levels = sorted({parse_rational(h) for h in heights})
    if not levels or levels[0] < 0:
        raise ValueError("heights must be non-negative and non-empty")
    rng = np.random.default_rng(seed)
    points = [f"p{i}" for i in range(n)]
    pairs = {}

    def split(block: list[int], lo: int) -> None:
        if len(block) < 2:
            return
        # choose a level index >= lo for this split
        k = int(rng.integers(lo, len(levels)))
        last = k == len(levels) - 1
        parts = len(block) if last else int(rng.integers(2, min(max_split, len(block)) + 1))
        labels = rng.integers(0, parts, size=len(block))
        labels[:parts] = np.arange(parts)  # no empty blocks
        rng.shuffle(labels)
        groups = [[b for b, g in zip(block, labels) if g == q] for q in range(parts)]
        for a in range(len(groups)):
            for b in range(a + 1, len(groups)):
                for x in groups[a]:
                    for y in groups[b]:
                        pairs[(points[x], points[y])] = levels[k]
        for g in groups:
            split(g, k + 1)

    split(list(range(n)), 0)
    return UltrametricSpace.from_heights(points, pairs)


def gen_shape_twin(space: UltrametricSpace, height_map: Mapping) -> UltrametricSpace:
    """Same dendrogram shape with every height ``h`` replaced by ``height_map[h]``.

    The map must be strictly increasing on the realized heights and keep
    them non-negative; unmapped heights are left unchanged.
    """
    verdict = validate(space)
    if not verdict.ok:
        raise InvalidSpaceError(verdict)
    hm = {parse_rational(k): parse_rational(v) for k, v in height_map.items()}
    realized = space.height_set()
    image = [hm.get(h, h) for h in realized]
    if any(b <= a for a, b in zip(image, image[1:])) or (image and image[0] < 0):
        raise ValueError("height map must be strictly increasing and non-negative")
    rows = tuple(
        tuple(None if h is None else hm.get(h, h) for h in row) for row in space.heights
    )
    return UltrametricSpace(space.points, rows)
