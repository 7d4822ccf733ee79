"""Sphere distortion of bijections between finite ultrametric spaces.

Everything is computed in log form.  For a bijection ``f: U -> U2`` and a
sphere ``S = {y : h(x, y) = t}`` the distortion ``D_f(x, e^-t)`` equals
``exp(max - min)`` of the image heights ``h2(f x, f y)``, ``y in S``; we keep
the exponent ``max - min`` as an exact rational.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional

import numpy as np

from .rationals import common_denominator, format_rational, parse_rational
from .ultrametric import UltrametricSpace, level_spectrum, sphere

Bijection = Mapping[str, str]


def check_bijection(f: Bijection, U: UltrametricSpace, U2: UltrametricSpace) -> None:
    if len(U) != len(U2):
        raise ValueError(f"cardinality mismatch: {len(U)} vs {len(U2)}")
    if set(f) != set(U.points):
        raise ValueError("map is not defined exactly on the domain points")
    if set(f.values()) != set(U2.points) or len(set(f.values())) != len(f):
        raise ValueError("map is not a bijection onto the codomain points")


def inverse(f: Bijection) -> dict[str, str]:
    return {v: k for k, v in f.items()}


def _exponent(f, U, U2, x, members) -> tuple[Fraction, Optional[tuple]]:
    if len(members) < 2:
        return Fraction(0), None
    fx = U2.index(f[x])
    row = U2.heights[fx]
    imgs = sorted(members, key=lambda y: (row[U2.index(f[y])], U.index(y)))
    lo, hi = imgs[0], imgs[-1]
    return row[U2.index(f[hi])] - row[U2.index(f[lo])], (lo, hi)


def sphere_distortion_exponent(f: Bijection, U, U2, x: str, t) -> Fraction:
    """``max - min`` of image heights over the sphere of level ``t`` at ``x``."""
    check_bijection(f, U, U2)
    return _exponent(f, U, U2, x, sphere(U, x, parse_rational(t)))[0]


@dataclass
class DistortionReport:
    """Per-sphere distortion exponents of one bijection.

    ``exponents`` maps ``(center, level)`` to ``max - min``; only non-empty
    spheres appear (an empty sphere has exponent 0 by convention).  The
    witness is the first worst sphere in label order together with the pair
    of its points whose images are nearest and farthest.
    """

    exponents: dict = field(default_factory=dict)
    max_exponent: Fraction = Fraction(0)
    witness: Optional[tuple] = None

    def to_dict(self) -> dict:
        return {
            "max_exponent": format_rational(self.max_exponent),
            "witness": None
            if self.witness is None
            else {
                "center": self.witness[0],
                "level": format_rational(self.witness[1]),
                "pair": list(self.witness[2]),
            },
            "spheres": [
                {"center": x, "level": format_rational(t), "exponent": format_rational(e)}
                for (x, t), e in self.exponents.items()
            ],
        }


def max_distortion_exponent(f: Bijection, U, U2) -> DistortionReport:
    check_bijection(f, U, U2)
    report = DistortionReport()
    for x in U.points:
        for t in level_spectrum(U, x):
            e, pair = _exponent(f, U, U2, x, sphere(U, x, t))
            report.exponents[(x, t)] = e
            if e > report.max_exponent:
                report.max_exponent = e
                report.witness = (x, t, pair)
    return report


def pair_exponent(f: Bijection, U, U2) -> Fraction:
    """Worst sphere distortion exponent of ``f`` and of its inverse."""
    return max(
        max_distortion_exponent(f, U, U2).max_exponent,
        max_distortion_exponent(inverse(f), U2, U).max_exponent,
    )


# -- integer encoding shared by the vectorized routines ----------------------

BIG = 1 << 40


def scaled_matrices(U: UltrametricSpace, U2: UltrametricSpace):
    """Both height matrices scaled by a common denominator to int64.

    The diagonal holds ``BIG`` (height +infinity).  Returns ``(A, B, scale)``.
    """
    values = [h for row in U.heights for h in row if h is not None]
    values += [h for row in U2.heights for h in row if h is not None]
    scale = common_denominator(values)
    if values and max(values) * scale >= BIG // 4:
        raise OverflowError("heights too large for the integer encoding")

    def encode(space):
        n = len(space)
        M = np.full((n, n), BIG, dtype=np.int64)
        for i, row in enumerate(space.heights):
            for j, h in enumerate(row):
                if h is not None:
                    M[i, j] = int(h * scale)
        return M

    return encode(U), encode(U2), scale


def _batch_exponent(dom: np.ndarray, cod: np.ndarray, perms: np.ndarray) -> np.ndarray:
    """Forward max exponent of every permutation in ``perms`` (rows)."""
    n = dom.shape[0]
    M = cod[perms[:, :, None], perms[:, None, :]]
    worst = np.zeros(len(perms), dtype=np.int64)
    off = ~np.eye(n, dtype=bool)
    for level in np.unique(dom[off]):
        mask = dom == level
        has = mask.sum(axis=1) >= 2
        if not has.any():
            continue
        hi = np.where(mask, M, -BIG).max(axis=2)
        lo = np.where(mask, M, BIG).min(axis=2)
        spread = np.where(has, hi - lo, 0).max(axis=1)
        np.maximum(worst, spread, out=worst)
    return worst


def exhaustive_kappa(U: UltrametricSpace, U2: UltrametricSpace, cap: int = 9):
    """Optimal pair exponent by enumerating every bijection.

    Returns ``(kappa, certificate)`` with the certificate being the first
    optimal bijection in lexicographic order of codomain indices.  Refuses
    spaces with more than ``cap`` points.
    """
    n = len(U)
    if n != len(U2):
        raise ValueError("cardinality mismatch")
    if n > cap:
        raise ValueError(f"{n} points exceeds the enumeration cap {cap}")
    A, B, scale = scaled_matrices(U, U2)
    best, best_perm = None, None
    perms_iter = itertools.permutations(range(n))
    while True:
        chunk = list(itertools.islice(perms_iter, 5040))
        if not chunk:
            break
        P = np.array(chunk, dtype=np.int64)
        Pinv = np.argsort(P, axis=1)
        score = np.maximum(_batch_exponent(A, B, P), _batch_exponent(B, A, Pinv))
        i = int(np.argmin(score))
        if best is None or score[i] < best:
            best, best_perm = int(score[i]), chunk[i]
    cert = {U.points[i]: U2.points[j] for i, j in enumerate(best_perm)}
    return Fraction(best, scale), cert
