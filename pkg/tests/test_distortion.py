from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dendrorho.distortion import (
    exhaustive_kappa, inverse, max_distortion_exponent, pair_exponent,
    sphere_distortion_exponent,
)
from dendrorho.generators import gen_example41, gen_random_ultrametric, h_n_map
from dendrorho.ultrametric import level_spectrum

seeds = st.integers(0, 2**32 - 1)


def identity(U):
    return {p: p for p in U.points}


def scan(f, U, U2):
    """Independent max - min scan straight off the matrices."""
    worst = Fraction(0)
    for x in U.points:
        rows = {}
        for y in U.points:
            if y != x:
                rows.setdefault(U.height(x, y), []).append(U2.height(f[x], f[y]))
        for imgs in rows.values():
            worst = max(worst, max(imgs) - min(imgs))
    return worst


def random_pair(seed, n=6):
    U = gen_random_ultrametric(seed, n, (0, 1, 2, 3))
    V = gen_random_ultrametric(seed + 1, n, (0, "1/2", 2))
    rng = np.random.default_rng(seed)
    f = dict(zip(U.points, rng.permutation(V.points).tolist()))
    return f, U, V


def test_identity_has_zero_exponent():
    U, _ = gen_example41(2)
    f = identity(U)
    assert max_distortion_exponent(f, U, U).max_exponent == 0
    assert pair_exponent(f, U, U) == 0
    assert all(sphere_distortion_exponent(f, U, U, x, t) == 0 for x in U.points for t in level_spectrum(U, x))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_h_n_distorts_only_the_trifurcation(n):
    N = max(n, 3)
    U, V = gen_example41(N)
    f = h_n_map(N, n)
    assert sphere_distortion_exponent(f, U, V, "F0", 1) == Fraction(1, n)
    rep = max_distortion_exponent(f, U, V)
    assert rep.max_exponent == Fraction(1, n)
    assert rep.witness[0] in ("F0", "H0") and rep.witness[1] == 1
    distorted = {x for (x, t), e in rep.exponents.items() if e > 0}
    assert distorted <= {"F0", "H0"} and "F0" in distorted
    assert max_distortion_exponent(inverse(f), V, U).max_exponent == 0
    assert pair_exponent(f, U, V) == Fraction(1, n)


def test_report_dict():
    U, V = gen_example41(1)
    d = max_distortion_exponent(h_n_map(1, 2), U, V).to_dict()
    assert d["max_exponent"] == "1/2" and d["witness"]["level"] == "1"


def test_non_bijection_rejected():
    U, V = gen_example41(1)
    f = h_n_map(1, 1)
    f["G0"] = f["F0"]
    with pytest.raises(ValueError):
        pair_exponent(f, U, V)
    with pytest.raises(ValueError):
        pair_exponent({}, U, gen_example41(2)[1])


@given(seeds)
def test_exponent_matches_scan(seed):
    f, U, V = random_pair(seed)
    assert max_distortion_exponent(f, U, V).max_exponent == scan(f, U, V)
    assert pair_exponent(f, U, V) == max(scan(f, U, V), scan(inverse(f), V, U))


@given(seeds)
def test_zero_exponent_iff_sphere_image_in_one_sphere(seed):
    f, U, V = random_pair(seed, 5)
    for x in U.points:
        for t in level_spectrum(U, x):
            members = [y for y in U.points if y != x and U.height(x, y) == t]
            images = {V.height(f[x], f[y]) for y in members}
            assert (sphere_distortion_exponent(f, U, V, x, t) == 0) == (len(images) == 1)


def test_empty_sphere_exponent_zero():
    U, _ = gen_example41(1)
    assert sphere_distortion_exponent(identity(U), U, U, "F0", 7) == 0


def test_exhaustive_example_value():
    U, V = gen_example41(1)
    k, cert = exhaustive_kappa(U, V)
    assert k == Fraction(1, 2) and pair_exponent(cert, U, V) == k
