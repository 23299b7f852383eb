"""Exact combinatorics of stacky fans and toric Deligne-Mumford stacks."""

from .bcs import BcsStackyFan, GerbeData, bcs_to_framed, framed_to_bcs, reduce_bcs
from .lattice import (
    FinAbGroup,
    IntMatrix,
    SmithDecomposition,
    cokernel,
    lattice_index,
    primitive_vector,
    saturate_span,
    smith_normal_form,
)
from .polyhedral import (
    Cone,
    Fan,
    Ray,
    cone_coordinates,
    dual_cone_basis,
    hilbert_basis,
    make_cone,
    minimal_containing_cone,
    validate_fan,
)
from .presentation import (
    CoverData,
    QuotientPresentation,
    canonical_cover,
    divisor_multiplicity,
    local_quotient_presentation,
    stabilizer_group,
)
from .resolution import (
    FreeResolution,
    is_close_submonoid,
    minimal_free_resolution,
    ray_correspondence,
    stacky_free_resolution,
)
from .stacky import (
    StackyFan,
    StackyFanMorphism,
    canonical_freenet,
    compose,
    forget_morphism,
    forget_to_fan,
    freenet_contains,
    freenet_generator,
    identity,
    is_isomorphism,
    make_stacky_fan,
    reconstruct_from_stabilizers,
    validate_morphism,
)

__version__ = "0.1.0"

__all__ = [
    "BcsStackyFan",
    "Cone",
    "CoverData",
    "Fan",
    "FinAbGroup",
    "FreeResolution",
    "GerbeData",
    "IntMatrix",
    "QuotientPresentation",
    "Ray",
    "SmithDecomposition",
    "StackyFan",
    "StackyFanMorphism",
    "bcs_to_framed",
    "canonical_cover",
    "canonical_freenet",
    "cokernel",
    "compose",
    "cone_coordinates",
    "divisor_multiplicity",
    "dual_cone_basis",
    "forget_morphism",
    "forget_to_fan",
    "framed_to_bcs",
    "freenet_contains",
    "freenet_generator",
    "hilbert_basis",
    "identity",
    "is_close_submonoid",
    "is_isomorphism",
    "lattice_index",
    "local_quotient_presentation",
    "make_cone",
    "make_stacky_fan",
    "minimal_containing_cone",
    "minimal_free_resolution",
    "primitive_vector",
    "ray_correspondence",
    "reconstruct_from_stabilizers",
    "reduce_bcs",
    "saturate_span",
    "smith_normal_form",
    "stabilizer_group",
    "stacky_free_resolution",
    "validate_fan",
    "validate_morphism",
]
