"""Exact computation in finitely generated nilpotent groups given by consistent nilpotent presentations."""
from .collection import Collector, invert, multiply, normalize_torsion, power, word_to_coords
from .conjugacy import QuotientView, centralizer, conjugacy, quotient_view
from .consistency import ConsistencyReport, check_consistency
from .freenil import BasicCommutator, NilpotentQuotient, free_nilpotent, from_finite_presentation, hall_basis
from .morphism import (
    Homomorphism,
    NotInImage,
    ProductGroup,
    direct_product,
    kernel_and_image,
    preimage,
    word_witness,
)
from .presentation import (
    NilpotentPresentation,
    PresentationError,
    format_coords,
    format_presentation,
    format_word,
    parse_coords,
    parse_presentation,
    parse_word,
)
from .slp import Slp, coords_to_slp, parse_slp, power_program, slp_to_coords
from .subgroup import (
    FullForm,
    NotMember,
    compress_presentation,
    express_as_program,
    express_in_input_generators,
    gcd_combination,
    membership,
    reduce_to_full_form,
    subgroup_presentation,
)

__all__ = [name for name in dir() if not name.startswith("_")]
