"""spancalc: span (Burnside) calculus for finite groups, with exhaustive
verification of the coherence laws of the surrounding categorical machinery."""

from .groups import FiniteGroup, SizeError, DEFAULT_ORDER_BOUND
from .gsets import (GSet, GMap, trivial_gset, regular_gset, coset_gset,
                    product_gset, coproduct_gset, lex_pullback, hom_gsets)
from .spans import (Span, SpanMorphism, SpanClass, span_compose, span_hom,
                    canonical_class, burnside_basis, basis_span, k0_composition,
                    table_of_marks, tom_dieck_pi0, formal_unit, identity_span,
                    OrbitMismatchError)

__version__ = "0.1.0"
