"""Isocones: classified cones, axiom checks and the saturation engine."""

from .axioms import AXIOMS, AxiomConfig, AxiomReport, AxiomResult, Counterexample, check_axioms
from .bloch import BlochRegion, bloch_vector, fibonacci_sphere, from_bloch, grid_resolution, projector
from .cones import (
    ClassifiedIsocone,
    InnerCone,
    LayerCake,
    Membership,
    MembershipOracle,
    layer_cake,
    lexicographic_sum_isocone,
    m2_membership,
    membership,
    verdict,
)
from .saturation import ConeOracle, SaturationConfig, SaturationReport, saturate

__all__ = [
    "AXIOMS", "AxiomConfig", "AxiomReport", "AxiomResult", "Counterexample", "check_axioms",
    "BlochRegion", "bloch_vector", "fibonacci_sphere", "from_bloch", "grid_resolution", "projector",
    "ClassifiedIsocone", "InnerCone", "LayerCake", "Membership", "MembershipOracle", "layer_cake",
    "lexicographic_sum_isocone", "m2_membership", "membership", "verdict",
    "ConeOracle", "SaturationConfig", "SaturationReport", "saturate",
]
