"""Reflection functors for continuous type-A quiver representations."""

from .barcode import Barcode, decompose, is_isomorphic, rebuild
from .errors import CQuiverError, NotInSubcategory, PaperInconsistency, RoundTripMismatch, SchemaError
from .exact_linalg import GF, QQ, FieldSpec, Matrix
from .quiver import ASC, DESC, OrientedQuiver, reflect_quiver
from .reflection import (
    ReflectionContext,
    in_overline_rep,
    in_underline_rep,
    reflect_minus,
    reflect_morphism_minus,
    reflect_morphism_plus,
    reflect_plus,
    verify_lemma_squares,
)
from .representation import Bar, Morphism, Rep, interval_module, sum_of_intervals

__all__ = [
    "ASC", "DESC", "GF", "QQ", "Bar", "Barcode", "CQuiverError", "FieldSpec", "Matrix", "Morphism",
    "NotInSubcategory", "OrientedQuiver", "PaperInconsistency", "ReflectionContext", "Rep",
    "RoundTripMismatch", "SchemaError", "decompose", "in_overline_rep", "in_underline_rep",
    "interval_module", "is_isomorphic", "rebuild", "reflect_minus", "reflect_morphism_minus",
    "reflect_morphism_plus", "reflect_plus", "reflect_quiver", "sum_of_intervals", "verify_lemma_squares",
]
