"""Exact distortion exponents between finite ultrametric spaces and tree ends."""
from __future__ import annotations

from .distortion import (
    DistortionReport, max_distortion_exponent, pair_exponent, sphere_distortion_exponent,
)
from .equivalence import exists_isometry, preserves_branching, same_branching
from .formats import FormatError, load_space, load_tree
from .search import KappaResult, exact_kappa, rho
from .trees import (
    RootedTree, TreeError, canonical_code, dendrogram_from_ultrametric, end_space,
    lemma_lower_bound,
)
from .ultrametric import (
    SELF, UNBOUNDED, InvalidSpaceError, UltrametricSpace, Verdict, level_spectrum,
    pseudo_discreteness_gap, sphere, validate,
)

__version__ = "0.1.0"

__all__ = [
    "DistortionReport", "FormatError", "InvalidSpaceError", "KappaResult", "RootedTree",
    "SELF", "TreeError", "UNBOUNDED", "UltrametricSpace", "Verdict", "canonical_code",
    "dendrogram_from_ultrametric", "end_space", "exact_kappa", "exists_isometry",
    "lemma_lower_bound", "level_spectrum", "load_space", "load_tree",
    "max_distortion_exponent", "pair_exponent", "preserves_branching",
    "pseudo_discreteness_gap", "rho", "same_branching", "sphere",
    "sphere_distortion_exponent", "validate",
]
