"""Branching equivalence and isometry of finite ultrametric spaces.

A bijection preserves the branching when, at every base point, it keeps
equal heights equal and keeps their strict order.  Whether *some* such
bijection exists is decided by comparing the unweighted canonical codes of
the two dendrograms; :func:`same_branching_oracle` answers the same question
by enumerating every bijection and is used to cross-check the fast route.
"""
from __future__ import annotations

import itertools
from typing import NamedTuple, Optional

import numpy as np

from .distortion import Bijection, check_bijection, scaled_matrices
from .trees import canonical_code, canonical_leaf_order, dendrogram_from_ultrametric
from .ultrametric import UltrametricSpace


class BranchingCheck(NamedTuple):
    ok: bool
    triple: Optional[tuple[str, str, str]] = None

    def __bool__(self) -> bool:
        return self.ok


def _sign(a, b) -> int:
    return (a > b) - (a < b)


def preserves_branching(f: Bijection, U: UltrametricSpace, U2: UltrametricSpace) -> BranchingCheck:
    """Check every based triple ``(x; y, z)``.

    Heights are compared directly: ``h(x, y) > h(x, z)`` means ``y`` is the
    closer point, so preserving the strict distance order is the same as
    preserving the strict height order.  The first failing triple in label
    order is returned.
    """
    check_bijection(f, U, U2)
    H, H2 = U.heights, U2.heights
    img = [U2.index(f[p]) for p in U.points]
    n = len(U)
    for x in range(n):
        for y in range(n):
            if y == x:
                continue
            for z in range(y + 1, n):
                if z == x:
                    continue
                s = _sign(H[x][y], H[x][z])
                s2 = _sign(H2[img[x]][img[y]], H2[img[x]][img[z]])
                if s != s2:
                    P = U.points
                    return BranchingCheck(False, (P[x], P[y], P[z]))
    return BranchingCheck(True)


def same_branching_oracle(U: UltrametricSpace, U2: UltrametricSpace, cap: int = 8) -> bool:
    """Exhaustive search for a branching-preserving bijection."""
    n = len(U)
    if n != len(U2):
        return False
    if n > cap:
        raise ValueError(f"{n} points exceeds the oracle cap {cap}")
    A, B, _ = scaled_matrices(U, U2)
    # sign pattern of every based pair comparison; the diagonal (height
    # +infinity) maps to itself under any bijection so it needs no masking
    SA = np.sign(A[:, :, None] - A[:, None, :])
    perms_iter = itertools.permutations(range(n))
    while True:
        chunk = list(itertools.islice(perms_iter, 5040))
        if not chunk:
            return False
        P = np.array(chunk, dtype=np.int64)
        M = B[P[:, :, None], P[:, None, :]]
        SM = np.sign(M[:, :, :, None] - M[:, :, None, :])
        if (SM == SA[None]).all(axis=(1, 2, 3)).any():
            return True


def _dendrogram(space: UltrametricSpace):
    return dendrogram_from_ultrametric(space)


def same_branching(U: UltrametricSpace, U2: UltrametricSpace) -> bool:
    if len(U) != len(U2):
        return False
    return canonical_code(_dendrogram(U), weighted=False) == canonical_code(
        _dendrogram(U2), weighted=False
    )


def exists_isometry(U: UltrametricSpace, U2: UltrametricSpace) -> Optional[dict[str, str]]:
    """An isometry ``U -> U2`` as a label map, or ``None`` if there is none."""
    if len(U) != len(U2):
        return None
    t1, t2 = _dendrogram(U), _dendrogram(U2)
    if canonical_code(t1, weighted=True) != canonical_code(t2, weighted=True):
        return None
    return dict(zip(canonical_leaf_order(t1), canonical_leaf_order(t2)))


def isometry_oracle(U: UltrametricSpace, U2: UltrametricSpace, cap: int = 8) -> bool:
    """Exhaustive search for a height-preserving bijection."""
    n = len(U)
    if n != len(U2):
        return False
    if n > cap:
        raise ValueError(f"{n} points exceeds the oracle cap {cap}")
    A, B, _ = scaled_matrices(U, U2)
    for perm in itertools.permutations(range(n)):
        p = np.array(perm)
        if (B[np.ix_(p, p)] == A).all():
            return True
    return False
