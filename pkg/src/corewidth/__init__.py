"""Local consistency, implication graphs and strict-width certificates for
CSPs over first-order expansions of homogeneous binary cores."""

from .core import (
    EQ,
    BinaryCore,
    CoreSignature,
    FiniteStructure,
    OrbitalId,
    bound_embeds,
    embeds_into_core,
    extend_witness,
    is_liberal,
    max_bound,
    validate_core,
)
from .orbits import Orbit, canonicalize, enumerate_orbits, pair_label, restrict_orbit

__version__ = "0.1.0"

__all__ = [
    "EQ", "BinaryCore", "CoreSignature", "FiniteStructure", "Orbit", "OrbitalId",
    "bound_embeds", "canonicalize", "embeds_into_core", "enumerate_orbits", "extend_witness",
    "is_liberal", "max_bound", "pair_label", "restrict_orbit", "validate_core",
]
