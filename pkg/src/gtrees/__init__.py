"""Finite G-trees, their deformation moves, retract pipelines, Stallings core
graphs, and the twisted-action constructions that surround them."""

from .words import (
    Alphabet,
    Word,
    conjugate,
    cyclic_reduce,
    format_word,
    multiply,
    parse_word,
    power_word,
    substitute,
)
from .stallings import CoreGraph, fold, from_generators
from .gaction import FiniteGroup, GSet, is_conjugate_incomparable, is_retract, retraction_map
from .ggraph import GGraph, compress, geodesic, reorient, slide, subdivide, validate
from .retract import (
    Filtration,
    RetractState,
    build_filtration,
    check_filtration,
    compress_to_U,
    eliminate_problematic,
    make_state,
    paths_P,
    problematic,
    retract_tree,
)
from .almost import (
    AbelianGroup,
    GModule,
    check_derivation,
    coset_retraction,
    hochschild_v,
    twisted_gset,
    untwist,
)
from .counterexample import (
    ExampleData,
    default_data,
    documented_mutations,
    fixed_point_profile,
    verify_all,
    verify_really,
    verify_schreier,
    verify_stabilizer_inclusions,
)

__all__ = [
    "Alphabet",
    "Word",
    "conjugate",
    "cyclic_reduce",
    "format_word",
    "multiply",
    "parse_word",
    "power_word",
    "substitute",
    "CoreGraph",
    "fold",
    "from_generators",
    "FiniteGroup",
    "GSet",
    "is_conjugate_incomparable",
    "is_retract",
    "retraction_map",
    "GGraph",
    "compress",
    "geodesic",
    "reorient",
    "slide",
    "subdivide",
    "validate",
    "Filtration",
    "RetractState",
    "build_filtration",
    "check_filtration",
    "compress_to_U",
    "eliminate_problematic",
    "make_state",
    "paths_P",
    "problematic",
    "retract_tree",
    "AbelianGroup",
    "GModule",
    "check_derivation",
    "coset_retraction",
    "hochschild_v",
    "twisted_gset",
    "untwist",
    "ExampleData",
    "default_data",
    "documented_mutations",
    "fixed_point_profile",
    "verify_all",
    "verify_really",
    "verify_schreier",
    "verify_stabilizer_inclusions",
]
