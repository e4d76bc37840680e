"""Exact invariants and local models for isotropy-maximal torus actions."""

from .invariants import (
    InvariantTuple,
    MaximalityClass,
    OrbitDatum,
    classify_orbit_datum,
    classify_tuple,
    tuples_equivalent,
    validate_tuple,
)
from .lattice import AntisymmetricForm, SaturatedSublattice, hermite_normal_form, smith_normal_form
from .models import ProductModel, build_isotropy_maximal_model, decompose_almost, extend_to_isotropy_maximal
from .moser import InvariantForm, PeriodicCoefficient, integrate_moser_flow
from .polytope import HalfSpace, Polytope, centroid, is_delzant

__version__ = "0.1.0"

__all__ = [
    "AntisymmetricForm",
    "HalfSpace",
    "InvariantForm",
    "InvariantTuple",
    "MaximalityClass",
    "OrbitDatum",
    "PeriodicCoefficient",
    "Polytope",
    "ProductModel",
    "SaturatedSublattice",
    "build_isotropy_maximal_model",
    "centroid",
    "classify_orbit_datum",
    "classify_tuple",
    "decompose_almost",
    "extend_to_isotropy_maximal",
    "hermite_normal_form",
    "integrate_moser_flow",
    "is_delzant",
    "smith_normal_form",
    "tuples_equivalent",
    "validate_tuple",
]
