"""Computable noncommutative ordered spaces on direct sums of matrix algebras."""

__version__ = "0.1.0"

from .algebra import BlockAlgebra, BlockElement, BlockMorphism, pullback_isocone, pushforward_isocone
from .classify import ClassificationResult, ClassifyConfig, classify, recover_inner, recover_poset, verify_classification
from .errors import (
    AmbiguityError,
    DegenerateLatticeError,
    DomainError,
    InconsistencyError,
    InputError,
    NCOrderError,
    ResourceError,
    UnsupportedMorphismError,
)
from .herm import DEFAULT_TOL, IsotoneFunction, Projection, ToleranceConfig
from .isocone import (
    AxiomConfig,
    BlochRegion,
    ClassifiedIsocone,
    InnerCone,
    Membership,
    SaturationConfig,
    check_axioms,
    layer_cake,
    lexicographic_sum_isocone,
    membership,
    saturate,
)
from .order_maps import Comparison, DensityMatrix, PureState, inner_order, pure_state_compare, state_compare
from .poset import Poset, lexicographic_sum, random_poset, up_sets
from .two_subspace import convex_combo_spectrum, cororder_bound, generated_lattice16, halmos_decompose

__all__ = [
    "BlockAlgebra", "BlockElement", "BlockMorphism", "pullback_isocone", "pushforward_isocone",
    "ClassificationResult", "ClassifyConfig", "classify", "recover_inner", "recover_poset",
    "verify_classification",
    "AmbiguityError", "DegenerateLatticeError", "DomainError", "InconsistencyError", "InputError",
    "NCOrderError", "ResourceError", "UnsupportedMorphismError",
    "DEFAULT_TOL", "IsotoneFunction", "Projection", "ToleranceConfig",
    "AxiomConfig", "BlochRegion", "ClassifiedIsocone", "InnerCone", "Membership", "SaturationConfig",
    "check_axioms", "layer_cake", "lexicographic_sum_isocone", "membership", "saturate",
    "Comparison", "DensityMatrix", "PureState", "inner_order", "pure_state_compare", "state_compare",
    "Poset", "lexicographic_sum", "random_poset", "up_sets",
    "convex_combo_spectrum", "cororder_bound", "generated_lattice16", "halmos_decompose",
]
