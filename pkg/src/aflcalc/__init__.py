"""Exact-arithmetic orbital integrals on the GL(2) norm-one symmetric space,
quasi-canonical-lift deformation lengths, and the AFL / ATI identity sweeps."""

from .deformation import (DeformQuery, InadmissibleParityError, geometric_sum,
                          hom_height_attainable, lift_bound, lift_bound_recursive,
                          ramification_index, reduction_commutes, unit_index)
from .field import (MINUS, PLUS, FieldSetup, ValClass, eta_s, eta_s_inverse,
                    norm_valclass, unit_integral)
from .germs import (DerivativeGerm, GermExpansion, GermGradingError, GermPiece,
                    GermPreconditionError, constant_germ, extract_germ,
                    function_from_germ, solve_transfer_germ, validity_threshold,
                    zero_orbit_zero_germ)
from .matching import (AflRow, EndToEndReport, EntryHeights, GrowthReport,
                       MatchContext, MatchingError, afl_verify, ati_end_to_end,
                       ati_growth_check, context_orbit, derived_diag_height,
                       entry_heights, in_context_locus, intersection_length,
                       match_side, prescribed_transfer_germ)
from .orbital import (Box, DivergenceError, Interval, InvariantFunction, OrbitData,
                      Side, clear_diagonal, d_orb, diagonal_killer,
                      eta_twist_difference, integral_indicator, orb, orb_s,
                      pullback, transfer_factor, unit_diag_indicator,
                      unramified_orbit)
from .symbolic import LaurentPoly, LogValue

__all__ = [name for name in dir() if not name.startswith("_")]
