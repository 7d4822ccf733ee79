"""Optimal distortion exponent between two finite ultrametric spaces.

``exact_kappa`` minimizes the pair exponent (worst sphere distortion of a
bijection and of its inverse, in log form) over all bijections.  On finite
spaces every bijection is a homeomorphism and the infimum is attained, so
the result always carries a certificate.

The search is a depth-first branch and bound over partial bijections:

* heights are scaled to integers so that all bookkeeping is exact;
* for every assigned center and level we keep the range of image heights,
  in both directions, so the cost of extending the map by one pair is O(k);
* the cost of every (unassigned point, free image) pair is evaluated at
  once; a point whose cheapest image already reaches the incumbent prunes
  the node, and the point with fewest viable images is branched on next;
* images that are interchangeable under an isometry of the codomain fixing
  the images already used are tried once (orbit pruning).  The search runs
  with the side having more isometries as codomain.

The certificate is recomputed by a deterministic first-found search at the
optimal value, so results do not depend on the worker count.
"""
from __future__ import annotations

import math
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .distortion import BIG, inverse, scaled_matrices
from .rationals import format_rational
from .trees import canonical_code, dendrogram_from_ultrametric
from .ultrametric import UltrametricSpace

__all__ = ["KappaResult", "exact_kappa", "kappa_upper_heuristic", "rho", "rho_exact_form"]


@dataclass
class KappaResult:
    """Optimal distortion exponent and how it was obtained.

    ``kappa`` is ``None`` when the spaces have different cardinalities (no
    bijection exists, rho is infinite) or when the budget ran out before
    the bracket closed; ``lower_bound``/``upper_bound`` always bracket the
    optimum and ``certificate`` attains ``upper_bound``.
    """

    kappa: Optional[Fraction]
    certificate: Optional[dict]
    lower_bound: Optional[Fraction]
    upper_bound: Optional[Fraction]
    complete: bool
    node_count: int = 0
    stats: dict = field(default_factory=dict)

    @property
    def rho(self) -> float:
        return rho(self)

    @property
    def undefined(self) -> bool:
        return self.lower_bound is None

    def to_dict(self) -> dict:
        def fmt(q):
            return None if q is None else format_rational(q)

        if self.undefined:
            verdict = "INFINITE"
        elif self.complete:
            verdict = "EXACT"
        else:
            verdict = "BOUNDS"
        r = rho(self) if self.complete else None
        n = rho_exact_form(self) if self.complete and not self.undefined else None
        return {
            "verdict": verdict,
            "kappa": fmt(self.kappa),
            "lower_bound": fmt(self.lower_bound),
            "upper_bound": fmt(self.upper_bound),
            "rho": "INFINITE" if self.undefined else (None if r is None else f"{r:.12g}"),
            "rho_exact_n": "NON-INTEGER" if self.complete and not self.undefined and n is None else n,
            "certificate": self.certificate,
            "node_count": self.node_count,
        }


def rho(result: KappaResult) -> float:
    """``ln(1 + 2 kappa)``; infinite when no bijection exists."""
    if result.kappa is None:
        if result.undefined:
            return math.inf
        raise ValueError("search incomplete; only bounds are known")
    return math.log1p(2 * result.kappa)


def rho_exact_form(result: KappaResult) -> Optional[int]:
    """``n`` with ``rho = ln(1 + 2n)`` when kappa is an integer, else ``None``."""
    if result.kappa is None or result.kappa.denominator != 1:
        return None
    return int(result.kappa)


# -- problem encoding --------------------------------------------------------

def _level_index(M: np.ndarray) -> np.ndarray:
    n = M.shape[0]
    off = ~np.eye(n, dtype=bool)
    values = np.unique(M[off]) if n > 1 else np.array([], dtype=np.int64)
    L = np.searchsorted(values, M)
    L[~off] = -1
    return L, max(len(values), 1)


def _aut_log_size(space: UltrametricSpace) -> float:
    """log |isometry group| of a space, from its dendrogram."""
    tree = dendrogram_from_ultrametric(space)
    total = 0.0
    for v in tree.vertices:
        kids = tree.children[v]
        if len(kids) < 2:
            continue
        codes = Counter(
            (tree.depth[c], canonical_code(tree.subtree(c))) for c in kids
        )
        total += sum(math.lgamma(m + 1) for m in codes.values())
        # subtree automorphisms are counted at their own vertices
    return total


class _Orbits:
    """Orbit keys of codomain points under isometries fixing a set of points."""

    def __init__(self, space: UltrametricSpace):
        tree = dendrogram_from_ultrametric(space)
        index = {p: i for i, p in enumerate(space.points)}
        memo: dict[str, tuple] = {}

        def code(v):
            if v not in memo:
                memo[v] = (tree.depth[v], canonical_code(tree.subtree(v)))
            return memo[v]

        ids = {v: k for k, v in enumerate(tree.vertices)}
        masks = {}
        for v in reversed(tree.vertices):
            m = 1 << index[v] if v in index else 0
            for c in tree.children[v]:
                m |= masks[c]
            masks[v] = m
        self.paths = []
        for p in space.points:
            path, v = [], p
            while v != tree.root:
                path.append((ids[v], masks[v], code(v)))
                v = tree.parent[v]
            self.paths.append(tuple(reversed(path)))

    def key(self, j: int, used_mask: int) -> tuple:
        return tuple(nid if m & used_mask else c for nid, m, c in self.paths[j])


class _Search:
    def __init__(self, U: UltrametricSpace, U2: UltrametricSpace):
        self.U, self.U2 = U, U2
        self.A, self.B, self.scale = scaled_matrices(U, U2)
        self.n = len(U)
        self.LA, self.nla = _level_index(self.A)
        self.LB, self.nlb = _level_index(self.B)
        self.orbits = _Orbits(U2)
        n = self.n
        off = ~np.eye(n, dtype=bool)
        # same-level masks for whole-map evaluation
        self.EA = (self.LA[:, :, None] == self.LA[:, None, :]) & off[:, :, None] & off[:, None, :]
        self.EB = (self.LB[:, :, None] == self.LB[:, None, :]) & off[:, :, None] & off[:, None, :]

    # whole-map evaluation (heuristic seed)
    def evaluate(self, perm: np.ndarray) -> int:
        inv = np.argsort(perm)
        M = self.B[np.ix_(perm, perm)]
        D = np.abs(M[:, :, None] - M[:, None, :])
        fwd = int((D * self.EA).max()) if self.n > 2 else 0
        N = self.A[np.ix_(inv, inv)]
        D = np.abs(N[:, :, None] - N[:, None, :])
        bwd = int((D * self.EB).max()) if self.n > 2 else 0
        return max(fwd, bwd)

    def new_state(self):
        n = self.n
        return {
            "fwd": np.full(n, -1, dtype=np.int64),
            "inv": np.full(n, -1, dtype=np.int64),
            "fmin": np.full((n, self.nla), BIG, dtype=np.int64),
            "fmax": np.full((n, self.nla), -BIG, dtype=np.int64),
            "imin": np.full((n, self.nlb), BIG, dtype=np.int64),
            "imax": np.full((n, self.nlb), -BIG, dtype=np.int64),
            "cur": 0,
            "used": 0,
        }

    def costs(self, st, Uu: np.ndarray, Cc: np.ndarray) -> np.ndarray:
        """Exponent after adding each pair ``Uu[i] -> Cc[j]`` to the partial map."""
        A, B, LA, LB = self.A, self.B, self.LA, self.LB
        S = np.flatnonzero(st["fwd"] >= 0)
        out = np.full((len(Uu), len(Cc)), st["cur"], dtype=np.int64)
        if len(S) == 0:
            return out
        fS = st["fwd"][S]
        # existing centers in U gain one sphere member
        lev = LA[np.ix_(S, Uu)]
        gmax = st["fmax"][S[:, None], lev]
        gmin = st["fmin"][S[:, None], lev]
        v = B[np.ix_(fS, Cc)]
        r = np.maximum(gmax[:, :, None], v[:, None, :]) - np.minimum(gmin[:, :, None], v[:, None, :])
        np.maximum(out, r.max(axis=0), out=out)
        # existing centers in U2 gain one sphere member
        lev = LB[np.ix_(fS, Cc)]
        gmax = st["imax"][fS[:, None], lev]
        gmin = st["imin"][fS[:, None], lev]
        v = A[np.ix_(S, Uu)]
        r = np.maximum(gmax[:, None, :], v[:, :, None]) - np.minimum(gmin[:, None, :], v[:, :, None])
        np.maximum(out, r.max(axis=0), out=out)
        if len(S) >= 2:
            # the new point as a center, in both directions
            lu = LA[np.ix_(Uu, S)]
            same = lu[:, :, None] == lu[:, None, :]
            V = B[np.ix_(Cc, fS)]
            D = np.abs(V[:, :, None] - V[:, None, :])
            np.maximum(out, (same[:, None] * D[None]).max(axis=(2, 3)), out=out)
            lc = LB[np.ix_(Cc, fS)]
            same = lc[:, :, None] == lc[:, None, :]
            V = A[np.ix_(Uu, S)]
            D = np.abs(V[:, :, None] - V[:, None, :])
            np.maximum(out, (D[:, None] * same[None]).max(axis=(2, 3)), out=out)
        return out

    def assign(self, st, u: int, c: int, cost: int):
        A, B, LA, LB = self.A, self.B, self.LA, self.LB
        new = {k: (v.copy() if isinstance(v, np.ndarray) else v) for k, v in st.items()}
        S = np.flatnonzero(st["fwd"] >= 0)
        fS = st["fwd"][S]
        if len(S):
            lev = LA[S, u]
            val = B[fS, c]
            new["fmax"][S, lev] = np.maximum(new["fmax"][S, lev], val)
            new["fmin"][S, lev] = np.minimum(new["fmin"][S, lev], val)
            np.maximum.at(new["fmax"][u], LA[u, S], B[c, fS])
            np.minimum.at(new["fmin"][u], LA[u, S], B[c, fS])
            lev = LB[fS, c]
            val = A[S, u]
            new["imax"][fS, lev] = np.maximum(new["imax"][fS, lev], val)
            new["imin"][fS, lev] = np.minimum(new["imin"][fS, lev], val)
            np.maximum.at(new["imax"][c], LB[c, fS], A[u, S])
            np.minimum.at(new["imin"][c], LB[c, fS], A[u, S])
        new["fwd"][u] = c
        new["inv"][c] = u
        new["cur"] = cost
        new["used"] = st["used"] | (1 << int(c))
        return new

    def run(self, st, best: int, *, first_only=False, max_nodes=None, deadline=None):
        """DFS for a completion with exponent strictly below ``best``.

        Returns ``(best, perm or None, nodes, abandoned_min)``.
        """
        self.best, self.best_perm = best, None
        self.nodes, self.abandoned = 0, None
        self.first_only = first_only
        self.max_nodes, self.deadline = max_nodes, deadline
        self._dfs(st)
        return self.best, self.best_perm, self.nodes, self.abandoned

    def _out_of_budget(self) -> bool:
        if self.max_nodes is not None and self.nodes > self.max_nodes:
            return True
        return self.deadline is not None and time.monotonic() > self.deadline

    def _dfs(self, st) -> bool:
        self.nodes += 1
        if self._out_of_budget():
            a = st["cur"]
            self.abandoned = a if self.abandoned is None else min(self.abandoned, a)
            return False
        Uu = np.flatnonzero(st["fwd"] < 0)
        if len(Uu) == 0:
            if st["cur"] < self.best:
                self.best, self.best_perm = st["cur"], st["fwd"].copy()
                return self.first_only
            return False
        Cc = np.flatnonzero(st["inv"] < 0)
        cost = self.costs(st, Uu, Cc)
        ok = cost < self.best
        counts = ok.sum(axis=1)
        if counts.min() == 0 or not ok.any(axis=0).all():
            return False
        i = int(np.argmin(counts))
        u = int(Uu[i])
        row = cost[i]
        order = sorted(np.flatnonzero(ok[i]), key=lambda j: (row[j], j))
        seen = set()
        for j in order:
            if row[j] >= self.best:
                continue
            c = int(Cc[j])
            key = self.orbits.key(c, st["used"])
            if key in seen:
                continue
            seen.add(key)
            if self._dfs(self.assign(st, u, c, int(row[j]))):
                return True
        return False


# -- heuristic ---------------------------------------------------------------

def _greedy_order(space: UltrametricSpace) -> list[int]:
    tree = dendrogram_from_ultrametric(space)
    size = {}
    for v in reversed(tree.vertices):
        size[v] = 1 if not tree.children[v] else sum(size[c] for c in tree.children[v])
    index = {p: i for i, p in enumerate(space.points)}
    out, stack = [], [tree.root]
    while stack:
        v = stack.pop()
        if v in index and not tree.children[v]:
            out.append(index[v])
            continue
        kids = sorted(tree.children[v], key=lambda c: (-size[c], tree.depth[c], tree.vertices.index(c)))
        stack.extend(reversed(kids))
    return out


def _heuristic(search: _Search) -> tuple[int, np.ndarray]:
    oa = _greedy_order(search.U)
    ob = _greedy_order(search.U2)
    perm = np.empty(search.n, dtype=np.int64)
    perm[oa] = ob
    best = search.evaluate(perm)
    improved = True
    while improved and best > 0:
        improved = False
        for i in range(search.n):
            for j in range(i + 1, search.n):
                perm[i], perm[j] = perm[j], perm[i]
                val = search.evaluate(perm)
                if val < best:
                    best, improved = val, True
                else:
                    perm[i], perm[j] = perm[j], perm[i]
    return best, perm


def kappa_upper_heuristic(U: UltrametricSpace, U2: UltrametricSpace):
    """Pair exponent of a greedily matched bijection, improved by swaps.

    Leaves of both dendrograms are listed with larger child clusters first
    (ties by height), matched in order, then pairwise swaps are applied
    while they lower the exponent.  Always an upper bound on the optimum.
    """
    if len(U) != len(U2):
        raise ValueError("cardinality mismatch")
    s = _Search(U, U2)
    val, perm = _heuristic(s)
    return Fraction(val, s.scale), {U.points[i]: U2.points[int(perm[i])] for i in range(len(U))}


# -- driver ------------------------------------------------------------------

def _subtask(args):
    U, U2, u, c, best, max_nodes = args
    s = _Search(U, U2)
    st = s.new_state()
    st = s.assign(st, u, c, 0)
    val, perm, nodes, abandoned = s.run(st, best, max_nodes=max_nodes)
    return val, (None if perm is None else perm.tolist()), nodes, abandoned


def _solve(U, U2, jobs: int, max_nodes, time_limit):
    s = _Search(U, U2)
    n = s.n
    deadline = None if time_limit is None else time.monotonic() + time_limit
    h_val, h_perm = _heuristic(s)
    best, best_perm = h_val, h_perm
    nodes, abandoned = 0, None
    if best > 0 and n > 1:
        st = s.new_state()
        if jobs <= 1:
            val, perm, nodes, abandoned = s.run(
                st, best, max_nodes=max_nodes, deadline=deadline
            )
            if perm is not None:
                best, best_perm = val, perm
        else:
            # fixed decomposition on the first point, one task per image orbit
            seen, tasks = set(), []
            for c in range(n):
                key = s.orbits.key(c, 0)
                if key not in seen:
                    seen.add(key)
                    tasks.append((U, U2, 0, c, best, max_nodes))
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                results = list(pool.map(_subtask, tasks))
            nodes = 1
            for val, perm, k, ab in results:
                nodes += k
                if ab is not None:
                    abandoned = ab if abandoned is None else min(abandoned, ab)
                if perm is not None and val < best:
                    best, best_perm = val, np.array(perm)
    complete = abandoned is None
    lower = best if complete else min(best, abandoned)
    if complete and best > 0 and n > 1:
        # canonical certificate: first map in search order reaching the optimum
        _, perm, k, _ = s.run(s.new_state(), best + 1, first_only=True)
        nodes += k
        if perm is not None:
            best_perm = perm
    return s, best, lower, best_perm, nodes, complete


def exact_kappa(
    U: UltrametricSpace,
    U2: UltrametricSpace,
    *,
    max_nodes: Optional[int] = None,
    time_limit: Optional[float] = None,
    jobs: int = 1,
) -> KappaResult:
    """Minimal pair exponent over all bijections ``U -> U2``.

    ``max_nodes`` / ``time_limit`` bound the search; when either runs out the
    result is incomplete and only ``lower_bound <= kappa <= upper_bound`` is
    reported.  ``jobs > 1`` splits the search over worker processes; kappa
    and certificate are identical for every worker count (node counts are
    not).
    """
    if len(U) != len(U2):
        return KappaResult(None, None, None, None, complete=True)
    if len(U) == 0:
        raise ValueError("empty spaces")
    swap = _aut_log_size(U) > _aut_log_size(U2)
    dom, cod = (U2, U) if swap else (U, U2)
    s, best, lower, perm, nodes, complete = _solve(dom, cod, jobs, max_nodes, time_limit)
    cert = {dom.points[i]: cod.points[int(perm[i])] for i in range(len(dom))}
    if swap:
        cert = inverse(cert)
        cert = {p: cert[p] for p in U.points}
    up = Fraction(best, s.scale)
    lo = Fraction(lower, s.scale)
    return KappaResult(
        kappa=up if complete else None,
        certificate=cert,
        lower_bound=lo,
        upper_bound=up,
        complete=complete,
        node_count=nodes,
        stats={"swapped": swap, "scale": s.scale},
    )
