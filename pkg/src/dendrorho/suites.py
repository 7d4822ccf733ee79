"""Acceptance suites: property and oracle checks over seeded corpora.

Each suite returns a :class:`SuiteResult` whose ``checks`` list holds one
line per sub-check; a suite passes when all of its checks pass.  Corpora
are regenerated from the seed, so a failing instance can be rebuilt from
the seeds echoed in the details.
"""
from __future__ import annotations

import itertools
import time
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .distortion import exhaustive_kappa, max_distortion_exponent, pair_exponent
from .equivalence import exists_isometry, same_branching, same_branching_oracle
from .generators import (
    gen_example41, gen_random_tree, gen_random_ultrametric, gen_regular,
    gen_shape_twin, h_n_map, spawn_seeds,
)
from .rationals import format_rational
from .search import exact_kappa
from .trees import (
    RootedTree, canonical_code, end_space, lemma_lower_bound,
    satisfies_min_degree_3, truncate,
)
from .ultrametric import pseudo_discreteness_gap, relabel, restrict


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class SuiteResult:
    name: str
    checks: list = field(default_factory=list)
    data: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, detail: str = "") -> None:
        self.checks.append(Check(name, bool(passed), detail))

    def to_dict(self) -> dict:
        return {
            "suite": self.name,
            "passed": self.passed,
            "checks": [
                {"name": c.name, "passed": c.passed, "detail": c.detail} for c in self.checks
            ],
            "data": self.data,
        }


# -- corpora -----------------------------------------------------------------

def tree_corpus(seed: int, count: int = 120, max_leaves: int = 10) -> list[RootedTree]:
    """Min-degree-3 simplicial truncated trees of depth 2 or 3."""
    out = []
    for i, s in enumerate(spawn_seeds(seed, count * 4)):
        depth = 2 + i % 2
        t = gen_random_tree(s, depth, 2, 3 if depth == 3 else 4)
        if len(t.leaves) <= max_leaves:
            out.append(t)
        if len(out) == count:
            break
    return out


def equinumerous_triples(trees, count: int, seed: int):
    by_size = defaultdict(list)
    for i, t in enumerate(trees):
        by_size[len(t.leaves)].append(i)
    pools = [ids for ids in by_size.values() if len(ids) >= 2]
    rng = np.random.default_rng(seed)
    triples = []
    while len(triples) < count:
        ids = pools[int(rng.integers(len(pools)))]
        triples.append(tuple(int(x) for x in rng.choice(ids, size=3, replace=True)))
    return triples


def branching_pairs(seed: int, count: int):
    """Equinumerous ultrametric pairs with at most 7 points.

    Thirds of the corpus: independent random spaces, shape twins under a
    relabeling, and random spaces over different height sets.
    """
    pairs = []
    for i, s in enumerate(spawn_seeds(seed, count)):
        rng = np.random.default_rng(s)
        n = int(rng.integers(2, 8))
        U = gen_random_ultrametric(int(rng.integers(1 << 30)), n, (0, 1, 2))
        kind = i % 3
        if kind == 0:
            V = gen_random_ultrametric(int(rng.integers(1 << 30)), n, (0, 1, 2))
        elif kind == 1:
            hs = U.height_set()
            new = sorted({Fraction(int(x), 2) for x in rng.choice(40, size=len(hs), replace=False)})
            V = gen_shape_twin(U, dict(zip(hs, new)))
            perm = rng.permutation(n)
            V = relabel(V, {p: f"q{perm[j]}" for j, p in enumerate(V.points)})
        else:
            V = gen_random_ultrametric(int(rng.integers(1 << 30)), n, (0, Fraction(1, 2), Fraction(3, 2), 5))
        pairs.append((U, V))
    return pairs


def trifurcation_pair_8():
    """Two vertices with three children and one with two, against binary depth 3."""
    parent = {}
    for i, c in enumerate((3, 3, 2)):
        parent[f"a{i}"] = "v"
        for j in range(c):
            parent[f"a{i}.{j}"] = f"a{i}"
    return RootedTree("v", parent, truncation_depth=2), gen_regular(2, 3)


def trifurcation_pair_16():
    """Binary root, each child trifurcating into 2, 2 and 4 leaves; vs binary depth 4."""
    parent = {}
    for a in range(2):
        A = f"a{a}"
        parent[A] = "v"
        for b, leaves in enumerate((2, 2, 4)):
            Bv = f"{A}.{b}"
            parent[Bv] = A
            for c in range(leaves):
                parent[f"{Bv}.{c}"] = Bv
    return RootedTree("v", parent, truncation_depth=3), gen_regular(2, 4)


# -- suites ------------------------------------------------------------------

def suite_h_family(seed: int = 0, trials: int = 1) -> SuiteResult:
    res = SuiteResult("h-family")
    U, U2 = gen_example41(1)
    t = time.perf_counter()
    brute, _ = exhaustive_kappa(U, U2)
    t_brute = time.perf_counter() - t
    k1 = exact_kappa(U, U2)
    res.add("N=1 exact kappa is 1/2", k1.kappa == Fraction(1, 2), f"b&b {k1.kappa}")
    res.add(
        "N=1 exhaustive over 720 bijections agrees within 5 s",
        brute == Fraction(1, 2) and t_brute < 5,
        f"{brute} in {t_brute:.2f}s",
    )
    U, U2 = gen_example41(2)
    t = time.perf_counter()
    brute2, _ = exhaustive_kappa(U, U2)
    t_brute2 = time.perf_counter() - t
    k2 = exact_kappa(U, U2)
    res.add(
        "N=2 b&b equals exhaustive over 9! bijections within 10 min",
        k2.kappa == brute2 and t_brute2 < 600,
        f"b&b {k2.kappa}, exhaustive {brute2} in {t_brute2:.1f}s",
    )
    kappas = [exact_kappa(*gen_example41(N)).kappa for N in (1, 2, 3)]
    res.add(
        "kappa_N positive and non-increasing for N=1..3",
        all(k > 0 for k in kappas) and all(a >= b for a, b in zip(kappas, kappas[1:])),
        ", ".join(format_rational(k) for k in kappas),
    )
    res.data["kappa_N"] = [format_rational(k) for k in kappas]
    fast = [same_branching(*gen_example41(N)) for N in range(1, 9)]
    slow = same_branching_oracle(*gen_example41(1))
    res.add("branching differs for N=1..8", not any(fast) and not slow)
    bad = []
    N = 4
    U, U2 = gen_example41(N)
    for n in range(1, N + 2):
        f = h_n_map(N, n)
        e = pair_exponent(f, U, U2)
        rep = max_distortion_exponent(f, U, U2)
        ok = (
            e == Fraction(1, n)
            and rep.witness is not None
            and rep.witness[0] in ("F0", "H0")
            and rep.witness[1] == 1
        )
        if not ok:
            bad.append(n)
    res.add("h_n maps have pair exponent exactly 1/n at F0 or H0, level 1", not bad, f"failures {bad}")
    return res


def suite_kappa_zero(seed: int = 0, trials: int = 500) -> SuiteResult:
    res = SuiteResult("kappa-zero")
    exceptions, zeros = [], 0
    for i, (U, V) in enumerate(branching_pairs(seed, trials)):
        k = exact_kappa(U, V).kappa
        oracle = same_branching_oracle(U, V)
        zeros += k == 0
        if (k == 0) != oracle:
            exceptions.append(i)
    res.data.update(pairs=trials, kappa_zero=zeros)
    res.add(
        f"kappa = 0 iff same branching (oracle) over {trials} pairs",
        trials >= 500 and not exceptions,
        f"{zeros} zero, exceptions {exceptions[:5]}",
    )
    return res


def _metric_corpus(seed: int, trials: int):
    trees = tree_corpus(seed)
    triples = equinumerous_triples(trees, trials, seed)
    spaces = [end_space(t) for t in trees]
    kappa = {}

    def k(i, j):
        if (i, j) not in kappa:
            kappa[(i, j)] = exact_kappa(spaces[i], spaces[j]).kappa
        return kappa[(i, j)]

    for a, b, c in triples:
        for i, j in itertools.permutations((a, b, c), 2):
            k(i, j)
    return trees, triples, kappa


def suite_metric_axioms(seed: int = 0, trials: int = 200) -> SuiteResult:
    res = SuiteResult("metric-axioms")
    trees, triples, kappa = _metric_corpus(seed, trials)
    codes = [canonical_code(t) for t in trees]
    used = sorted({i for tr in triples for i in tr})
    gate = all(satisfies_min_degree_3(trees[i]) and len(trees[i].leaves) <= 10 for i in used)
    asym = [p for p in kappa if kappa[p] != kappa[(p[1], p[0])]]
    neg = [p for p in kappa if kappa[p] < 0]
    ident = [p for p in kappa if (kappa[p] == 0) != (codes[p[0]] == codes[p[1]])]
    tri = []
    for a, b, c in triples:
        for x, y, z in ((a, b, c), (b, c, a), (c, a, b)):
            # ln(1+2k_xz) <= ln(1+2k_xy) + ln(1+2k_yz), exponentiated
            if 1 + 2 * kappa[(x, z)] > (1 + 2 * kappa[(x, y)]) * (1 + 2 * kappa[(y, z)]):
                tri.append((x, y, z))
    res.data.update(triples=len(triples), pairs=len(kappa))
    res.add(
        f"corpus: {len(triples)} triples (>= 200 needed) of min-degree-3 simplicial truncations, <= 10 leaves",
        gate and len(triples) >= 200,
    )
    res.add("symmetry", not asym, f"{asym[:3]}")
    res.add("non-negativity", not neg)
    res.add("rho = 0 iff rooted isometric", not ident, f"{ident[:3]}")
    res.add("triangle inequality (exact)", not tri, f"{tri[:3]}")
    return res


def suite_quantization(seed: int = 0, trials: int = 200) -> SuiteResult:
    res = SuiteResult("quantization")
    _, _, kappa = _metric_corpus(seed, trials)
    bad = [p for p, k in kappa.items() if k.denominator != 1 or k < 0]
    res.data["values"] = sorted({int(k) for k in kappa.values() if k.denominator == 1})
    res.add("every kappa is a non-negative integer", not bad, f"{len(kappa)} pairs")
    return res


def primed_truncation(M: int):
    """The second example space restricted to triples ``1 <= i <= M``."""
    _, U2 = gen_example41(max(M - 1, 1))
    keep = [p for p in U2.points if int(p[2:]) <= M]
    return restrict(U2, keep)


def suite_pseudo_discrete(seed: int = 0, trials: int = 200) -> SuiteResult:
    res = SuiteResult("pseudo-discrete")
    trees = tree_corpus(seed)
    gaps = [pseudo_discreteness_gap(end_space(t)) for t in trees]
    res.add(
        "simplicial end spaces have gap exactly 1",
        all(g == 1 for g in gaps), f"{len(trees)} trees",
    )
    prime = [pseudo_discreteness_gap(primed_truncation(M)) for M in range(1, 65)]
    res.add(
        "second example space truncated at i <= M has gap 1/M, M = 1..64",
        all(g == Fraction(1, M) for M, g in enumerate(prime, start=1)),
        f"last {prime[-1]}",
    )
    own = [pseudo_discreteness_gap(gen_example41(N)[1]) for N in range(1, 64)]
    res.add(
        "generated pair N = 1..63 has gap 1/(N+1) -> 0",
        all(g == Fraction(1, N + 1) for N, g in enumerate(own, start=1)),
    )
    return res


def suite_lemma(seed: int = 0, trials: int = 50) -> SuiteResult:
    res = SuiteResult("lemma")
    rows = []
    T, B = trifurcation_pair_8()
    rows.append(("trifurcation-8", T, B))
    T, B = trifurcation_pair_16()
    rows.append(("trifurcation-16", T, B))
    by_size = defaultdict(list)
    for i, s in enumerate(spawn_seeds(seed, 40 * trials)):
        depth = 2 + i % 2
        t = gen_random_tree(s, depth, 2, 6 if depth == 2 else 4)
        if len(t.leaves) <= 14:
            by_size[len(t.leaves)].append(t)
    rng = np.random.default_rng(seed)
    sizes = sorted(k for k, v in by_size.items() if len(v) >= 2)
    while len(rows) < trials:
        ts = by_size[sizes[int(rng.integers(len(sizes)))]]
        i, j = rng.choice(len(ts), size=2, replace=False)
        rows.append((f"random-{len(rows)}", ts[int(i)], ts[int(j)]))
    violations, positive, equal = [], 0, []
    for name, a, b in rows:
        lb = lemma_lower_bound(a, b).value
        k = exact_kappa(end_space(a), end_space(b)).kappa
        positive += lb > 0
        if lb > k:
            violations.append(name)
        if lb == k and lb > 0:
            equal.append(name)
    res.data.update(pairs=len(rows), positive_bounds=positive, equality=equal[:10])
    res.add(f"bound <= exact kappa over {len(rows)} pairs", not violations and len(rows) >= 50, f"violations {violations}")
    res.add("equality on the constructed trifurcation example", "trifurcation-16" in equal)
    k8 = exact_kappa(*(end_space(t) for t in trifurcation_pair_8())).kappa
    res.add("8-leaf trifurcation vs binary has kappa >= 1", k8 >= 1, f"kappa {k8}")
    return res


def _thin_tree(rng, depth: int, probs=(0.35, 0.55, 0.10)) -> RootedTree:
    """Truncated tree whose vertices get 1, 2 or 3 children with ``probs``.

    Unary vertices keep the leaf count small at depths where a tree with
    branching everywhere would be out of reach of the exact search.  The
    root always branches, so that it does not become a dead end once the
    tree is rooted elsewhere.
    """
    parent, layer = {}, ["v"]
    for level in range(depth):
        nxt = []
        for p in layer:
            n = 1 + int(rng.choice(3, p=probs))
            for k in range(max(n, 2) if level == 0 else n):
                parent[f"{p}.{k}"] = p
                nxt.append(f"{p}.{k}")
        layer = nxt
    return RootedTree("v", parent, truncation_depth=depth)


def suite_root_change(seed: int = 0, trials: int = 50, max_leaves: int = 20) -> SuiteResult:
    """Monitored check of 2 kappa <= d(v, w) after moving the root.

    Trees have depth d(v, w) + 3 and at most ``max_leaves`` leaves.
    Failures are triaged by cutting the tree one level shallower: a
    violation that survives with the truncation boundary moved is not an
    artifact of the boundary and counts as systematic.
    """
    res = SuiteResult("root-change")
    rows = []
    for s in spawn_seeds(seed, 100 * trials):
        if len(rows) == trials:
            break
        rng = np.random.default_rng(s)
        d = 1 + len(rows) % 2
        t = _thin_tree(rng, d + 3)
        if not 4 <= len(t.leaves) <= max_leaves:
            continue
        cands = [v for v in t.vertices if t.hops[v] == d]
        w = cands[int(rng.integers(len(cands)))]
        rows.append((s, d, t, w))
    failures, systematic, boundary = [], [], []
    for s, d, t, w in rows:
        k = exact_kappa(end_space(t), end_space(t.rebase(w))).kappa
        if 2 * k <= d:
            continue
        failures.append((s, d, int(k)))
        cut = truncate(t, t.truncation_depth - 1)
        k_cut = exact_kappa(end_space(cut), end_space(cut.rebase(w))).kappa
        (systematic if 2 * k_cut > d else boundary).append((s, d, int(k), int(k_cut)))
    res.data.update(
        trees=len(rows),
        failures=len(failures),
        systematic=systematic[:10],
        boundary=boundary[:10],
        max_kappa_over_d=max((Fraction(k, d) for _, d, k in failures), default=0).__str__(),
    )
    res.add(
        f"2 kappa <= d(v,w) over {len(rows)} trees (monitored)",
        not systematic,
        f"{len(failures)} failures, {len(systematic)} persist one level shallower",
    )
    return res


def suite_branching(seed: int = 0, trials: int = 100) -> SuiteResult:
    res = SuiteResult("branching")
    disagree = []
    for i, (U, V) in enumerate(branching_pairs(seed + 1, trials)):
        if same_branching(U, V) != same_branching_oracle(U, V):
            disagree.append(i)
    res.add(f"canonical code agrees with oracle on {trials} pairs", trials >= 100 and not disagree, f"{disagree[:5]}")
    twins_ok, n_twins = True, 0
    for s in spawn_seeds(seed + 2, 20):
        U = gen_random_ultrametric(s, 6, (0, 1, 2))
        hs = U.height_set()
        V = gen_shape_twin(U, {h: h * 2 + 1 for h in hs})
        k = exact_kappa(U, V).kappa
        n_twins += 1
        if k != 0 or exists_isometry(U, V) is not None:
            twins_ok = False
    res.add("shape twins have kappa 0 but are not isometric", twins_ok, f"{n_twins} twins")
    return res


def determinism_corpus(seed: int = 0, count: int = 4):
    trees = [t for t in tree_corpus(seed, 60, max_leaves=12) if len(t.leaves) >= 8]
    by_size = defaultdict(list)
    for t in trees:
        by_size[len(t.leaves)].append(t)
    pairs = []
    for ts in by_size.values():
        for a, b in zip(ts, ts[1:]):
            if canonical_code(a) != canonical_code(b):
                pairs.append((end_space(a), end_space(b)))
    return pairs[:count]


def sixteen_leaf_pairs(seed: int = 0, count: int = 5):
    out = []
    for s in spawn_seeds(seed, 4000):
        t = gen_random_tree(s, 3, 2, 3)
        if len(t.leaves) == 16:
            out.append(t)
    rng = np.random.default_rng(seed)
    pairs = []
    while len(pairs) < count:
        i, j = rng.choice(len(out), size=2, replace=False)
        pairs.append((end_space(out[int(i)]), end_space(out[int(j)])))
    return pairs


def suite_determinism(seed: int = 0, trials: int = 20) -> SuiteResult:
    res = SuiteResult("determinism")
    mismatches = []
    for idx, (U, V) in enumerate(determinism_corpus(seed)):
        outs = []
        for jobs in (1, 2, 8):
            r = exact_kappa(U, V, jobs=jobs)
            outs.append((r.kappa, r.lower_bound, r.upper_bound, tuple(sorted(r.certificate.items()))))
        if len(set(outs)) != 1:
            mismatches.append(idx)
    res.add("results identical for 1, 2 and 8 workers", not mismatches, f"{mismatches}")
    times, honest = [], True
    for U, V in sixteen_leaf_pairs(seed, trials):
        t = time.perf_counter()
        r = exact_kappa(U, V, time_limit=60)
        times.append(time.perf_counter() - t)
        if not r.complete:
            honest = honest and r.lower_bound <= r.upper_bound and pair_exponent(r.certificate, U, V) == r.upper_bound
        elif pair_exponent(r.certificate, U, V) != r.kappa:
            honest = False
    res.data["seconds"] = [round(x, 3) for x in times]
    res.add(
        f"{trials} random 16-leaf pairs solved within 60 s each or bracketed honestly",
        honest and all(x <= 60 + 5 for x in times),
        f"max {max(times):.2f}s",
    )
    return res


SUITES = {
    "h-family": suite_h_family,
    "kappa-zero": suite_kappa_zero,
    "metric-axioms": suite_metric_axioms,
    "quantization": suite_quantization,
    "pseudo-discrete": suite_pseudo_discrete,
    "lemma": suite_lemma,
    "root-change": suite_root_change,
    "branching": suite_branching,
    "determinism": suite_determinism,
}

DEFAULT_TRIALS = {
    "h-family": 1, "kappa-zero": 500, "metric-axioms": 200, "quantization": 200,
    "pseudo-discrete": 200, "lemma": 50, "root-change": 50, "branching": 100,
    "determinism": 20,
}


def run_suite(name: str, seed: int = 0, trials=None) -> SuiteResult:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    return SUITES[name](seed, DEFAULT_TRIALS[name] if trials is None else trials)
