"""Named reference inputs: orbit data, polytopes, invariant tuples, Moser forms."""

from __future__ import annotations

from fractions import Fraction
from typing import Callable

from . import serialization as ser
from .invariants import InvariantTuple, OrbitDatum
from .lattice import AntisymmetricForm, SaturatedSublattice
from .moser import InvariantForm, Mode, PeriodicCoefficient
from .polytope import Polytope, cube, simplex, translate_to_centered

# orbit data (dim M, dim T, dim T_x)
_ORBITS = {
    # toric manifold at a fixed point
    "example-2.1": (4, 2, 2),
    # T^4 acting freely on itself
    "example-2.2": (4, 4, 0),
    # codimension-one subtorus of T^4 acting on T^4
    "example-2.3": (4, 3, 0),
    # non-Hamiltonian circle action on a 4-manifold, free orbit
    "example-3.1": (4, 1, 0),
    # Hamiltonian T^2 on a 6-manifold, fixed point
    "example-3.2": (6, 2, 2),
    # rotation of S^2 x Sigma_g, principal orbit
    "example-3.3": (4, 1, 0),
    # blown-up S^2 x S^2 circle action, fixed point
    "example-3.4": (4, 1, 1),
}

_SIGMA_RANK2_R3 = AntisymmetricForm(((0, 1, 0), (-1, 0, 0), (0, 0, 0)))


def _tuples() -> dict[str, Callable[[], InvariantTuple]]:
    return {
        "toric-square": lambda: InvariantTuple(
            AntisymmetricForm.zero(2), SaturatedSublattice.full(2), translate_to_centered(cube(2)).canonical()
        ),
        "symplectic-torus": lambda: InvariantTuple(
            AntisymmetricForm.standard(1), SaturatedSublattice.zero(2), Polytope.point()
        ),
        "sphere-times-torus": lambda: InvariantTuple(
            _SIGMA_RANK2_R3, SaturatedSublattice(3, ((0, 0, 1),)), translate_to_centered(cube(1)).canonical()
        ),
        "example-2.3-tuple": lambda: InvariantTuple(
            _SIGMA_RANK2_R3, SaturatedSublattice.zero(3), Polytope.point(), ((1,),), (((0, 0, 0),),), ((0, 0, 0),)
        ),
        "circle-in-t2": lambda: InvariantTuple(
            AntisymmetricForm.zero(1), SaturatedSublattice.zero(1), Polytope.point(), ((1,),), (((0,),),), ((0,),)
        ),
    }


def _polytopes() -> dict[str, Callable[[], Polytope]]:
    return {
        "unit-square": lambda: translate_to_centered(cube(2)).canonical(),
        "standard-simplex": lambda: simplex(2).canonical(),
        "centered-simplex": lambda: translate_to_centered(simplex(2)).canonical(),
        "triangle-x2y": lambda: Polytope.from_inequalities(2, [((-1, 0), 0), ((0, -1), 0), ((1, 2), 2)]).canonical(),
        "segment": lambda: translate_to_centered(cube(1)).canonical(),
    }


def _coef(const=0, *modes) -> PeriodicCoefficient:
    return PeriodicCoefficient((Mode(0, Fraction(const)),) + tuple(Mode(*m) for m in modes))


def _moser_forms() -> dict[str, Callable[[], InvariantForm]]:
    return {
        "moser-invariant": lambda: InvariantForm(1, {}, (_coef(1),)),
        "moser-n1": lambda: InvariantForm(1, {}, (_coef(1, (1, 0, Fraction(3, 10))),)),
        "moser-n1-half": lambda: InvariantForm(1, {}, (_coef(1, (1, 0, Fraction(1, 2))),)),
        "moser-n2": lambda: InvariantForm(
            2,
            {(1, 2): 1},
            (_coef(1, (1, Fraction(1, 5), 0)), _coef(1), _coef(0, (1, 0, Fraction(1, 10)))),
        ),
        "moser-degenerate": lambda: InvariantForm(1, {}, (_coef(0, (1, 0, 1)),)),
    }


def fixture_names() -> list[str]:
    return sorted([*_ORBITS, *_tuples(), *_polytopes(), *_moser_forms()])


def fixture(name: str):
    """The fixture as a library object."""
    if name in _ORBITS:
        return OrbitDatum(*_ORBITS[name])
    for table in (_tuples(), _polytopes(), _moser_forms()):
        if name in table:
            return table[name]()
    raise KeyError(f"unknown fixture {name!r}; known: {', '.join(fixture_names())}")


def emit_fixture(name: str) -> dict:
    obj = fixture(name)
    if isinstance(obj, OrbitDatum):
        return ser.orbit_to_json(obj)
    if isinstance(obj, InvariantTuple):
        return ser.tuple_to_json(obj)
    if isinstance(obj, Polytope):
        return ser.polytope_to_json(obj)
    return ser.moser_form_to_json(obj)


def parse_fixture(name: str, data: dict):
    """Decode ``data`` with the parser matching fixture ``name``'s kind."""
    obj = fixture(name)
    if isinstance(obj, OrbitDatum):
        return ser.orbit_from_json(data)
    if isinstance(obj, InvariantTuple):
        return ser.tuple_from_json(data)
    if isinstance(obj, Polytope):
        return ser.polytope_from_json(data)
    return ser.moser_form_from_json(data)
