"""Finite ultrametric spaces stored in the height (Gromov product) domain.

A space is a list of point labels plus a symmetric matrix of exact
non-negative rational heights ``h(x, y)``; the distance is ``exp(-h(x, y))``.
The diagonal holds ``SELF`` (``None``), conceptually height +infinity.

Larger height means closer points, so every comparison of distances is a
reversed comparison of heights.  Distances are only materialized as floats
for display.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .rationals import parse_rational

SELF = None
UNBOUNDED = math.inf


class InvalidSpaceError(ValueError):
    """Raised when an operation needs a valid ultrametric space."""

    def __init__(self, verdict: "Verdict"):
        super().__init__(str(verdict))
        self.verdict = verdict


@dataclass(frozen=True)
class Verdict:
    """Outcome of :func:`validate`.

    ``kind`` is ``"ok"`` or one of ``"diagonal"``, ``"missing"``,
    ``"negative"``, ``"asymmetric"`` (malformed matrix) or ``"three_point"``
    (a well-formed matrix that is not ultrametric).  ``where`` holds the
    offending labels.
    """

    kind: str
    where: tuple = ()

    @property
    def ok(self) -> bool:
        return self.kind == "ok"

    @property
    def malformed(self) -> bool:
        return self.kind not in ("ok", "three_point")

    def __str__(self) -> str:
        if self.ok:
            return "ok"
        return f"{self.kind} at {', '.join(self.where)}"


@dataclass(frozen=True)
class UltrametricSpace:
    points: tuple[str, ...]
    heights: tuple[tuple[Optional[Fraction], ...], ...]
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        points = tuple(str(p) for p in self.points)
        if len(set(points)) != len(points):
            raise ValueError("duplicate point labels")
        rows = tuple(
            tuple(None if h is None else parse_rational(h) for h in row)
            for row in self.heights
        )
        if len(rows) != len(points) or any(len(r) != len(points) for r in rows):
            raise ValueError(
                f"height matrix shape does not match {len(points)} points"
            )
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "heights", rows)
        object.__setattr__(self, "_index", {p: i for i, p in enumerate(points)})

    @classmethod
    def from_heights(cls, points: Sequence[str], pair_heights) -> "UltrametricSpace":
        """Build from a mapping ``{(x, y): h}``; each unordered pair given once."""
        n = len(points)
        index = {p: i for i, p in enumerate(points)}
        rows = [[None] * n for _ in range(n)]
        for (x, y), h in pair_heights.items():
            i, j = index[x], index[y]
            rows[i][j] = rows[j][i] = parse_rational(h)
        return cls(tuple(points), tuple(tuple(r) for r in rows))

    def __len__(self) -> int:
        return len(self.points)

    def index(self, x: str) -> int:
        try:
            return self._index[x]
        except KeyError:
            raise KeyError(f"unknown point {x!r}") from None

    def height(self, x: str, y: str) -> Optional[Fraction]:
        return self.heights[self.index(x)][self.index(y)]

    def distance(self, x: str, y: str) -> float:
        """Display-only float distance ``exp(-h)``."""
        h = self.height(x, y)
        return 0.0 if h is None else math.exp(-h)

    def height_set(self) -> list[Fraction]:
        """Sorted distinct off-diagonal heights."""
        n = len(self.points)
        return sorted({self.heights[i][j] for i in range(n) for j in range(i + 1, n)})

    def check(self) -> "UltrametricSpace":
        verdict = validate(self)
        if not verdict.ok:
            raise InvalidSpaceError(verdict)
        return self


def validate(space: UltrametricSpace) -> Verdict:
    """Check the diagonal, symmetry, non-negativity and the three-point condition.

    Structural defects are reported before any three-point violation.  The
    three-point condition is the height form of the ultrametric inequality:
    the minimum of the three heights of a triple is attained at least twice.
    Violations are reported in lexicographic label-index order.
    """
    H = space.heights
    P = space.points
    n = len(P)
    for i in range(n):
        if H[i][i] is not None:
            return Verdict("diagonal", (P[i],))
    for i in range(n):
        for j in range(i + 1, n):
            a, b = H[i][j], H[j][i]
            if a is None or b is None:
                return Verdict("missing", (P[i], P[j]))
            if a < 0 or b < 0:
                return Verdict("negative", (P[i], P[j]))
            if a != b:
                return Verdict("asymmetric", (P[i], P[j]))
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                hs = sorted((H[i][j], H[j][k], H[i][k]))
                if hs[0] != hs[1]:
                    return Verdict("three_point", (P[i], P[j], P[k]))
    return Verdict("ok")


def sphere(space: UltrametricSpace, x: str, t) -> set[str]:
    """Points at height exactly ``t`` from ``x``, i.e. the sphere of radius ``exp(-t)``."""
    t = parse_rational(t)
    if t < 0:
        raise ValueError("level must be non-negative")
    i = space.index(x)
    row = space.heights[i]
    return {p for j, p in enumerate(space.points) if j != i and row[j] == t}


def level_spectrum(space: UltrametricSpace, x: str) -> list[Fraction]:
    i = space.index(x)
    return sorted({h for j, h in enumerate(space.heights[i]) if j != i})


def pseudo_discreteness_gap(space: UltrametricSpace):
    """Smallest gap between consecutive realized levels at a common center.

    Returns an exact Fraction, or ``UNBOUNDED`` when no point sees two
    distinct levels.  ``exp(gap)`` is the largest admissible separation
    constant for pseudo-discreteness (boundary case counted as admissible).
    """
    best = UNBOUNDED
    for x in space.points:
        levels = level_spectrum(space, x)
        for lo, hi in zip(levels, levels[1:]):
            if hi - lo < best:
                best = hi - lo
    return best


def restrict(space: UltrametricSpace, subset: Iterable[str]) -> UltrametricSpace:
    """Induced subspace on ``subset``, keeping the parent space's point order."""
    wanted = set(subset)
    if not wanted:
        raise ValueError("cannot restrict to an empty subset")
    for p in wanted:
        space.index(p)
    idx = [i for i, p in enumerate(space.points) if p in wanted]
    H = space.heights
    return UltrametricSpace(
        tuple(space.points[i] for i in idx),
        tuple(tuple(H[i][j] for j in idx) for i in idx),
    )


def relabel(space: UltrametricSpace, mapping) -> UltrametricSpace:
    """Rename points through ``mapping`` (labels absent from it are kept)."""
    return UltrametricSpace(
        tuple(mapping.get(p, p) for p in space.points), space.heights
    )
