from fractions import Fraction

import pytest
from hypothesis import given

from isomax.fixtures import fixture
from isomax.invariants import (
    InvalidTuple,
    InvariantTuple,
    MaximalityClass,
    OrbitDatum,
    SliceBoundViolated,
    check_almost_triviality,
    classify_orbit_datum,
    classify_tuple,
    manifold_dimension,
    tau_on,
    tuples_equivalent,
    validate_tuple,
)
from isomax.lattice import AntisymmetricForm, SaturatedSublattice, rank
from isomax.polytope import Polytope, cube, translate_to_centered
from isomax.sampling import random_delzant, random_valid_tuple

from conftest import rng_from, seeds

IM = MaximalityClass.ISOTROPY_MAXIMAL
SA = MaximalityClass.STRICTLY_ALMOST
NA = MaximalityClass.NOT_ALMOST

SQUARE = translate_to_centered(cube(2))
SIGMA3 = AntisymmetricForm(((0, 1, 0), (-1, 0, 0), (0, 0, 0)))


# ---------------------------------------------------------------------------
# orbit data


@pytest.mark.parametrize(
    "datum, expected",
    [((4, 2, 2), IM), ((4, 3, 0), SA), ((6, 2, 2), NA), ((4, 4, 0), IM), ((4, 1, 1), NA), ((2, 1, 0), SA)],
)
def test_classify_orbit_datum(datum, expected):
    assert classify_orbit_datum(OrbitDatum(*datum)) is expected


def test_orbit_fixtures():
    assert classify_orbit_datum(fixture("example-2.1")) is IM
    assert classify_orbit_datum(fixture("example-2.3")) is SA
    assert classify_orbit_datum(fixture("example-3.3")) is NA
    assert classify_orbit_datum(fixture("example-3.2")) is NA


def test_slice_bound():
    with pytest.raises(SliceBoundViolated):
        OrbitDatum(4, 3, 2)
    with pytest.raises(ValueError):
        OrbitDatum(3, 1, 0)
    with pytest.raises(ValueError):
        OrbitDatum(4, 5, 0)
    with pytest.raises(ValueError):
        OrbitDatum(4, 1, 2)


# ---------------------------------------------------------------------------
# tuples


def toric(t_h=None):
    return InvariantTuple(AntisymmetricForm.zero(2), t_h or SaturatedSublattice.full(2), SQUARE)


def test_manifold_dimension_examples():
    assert manifold_dimension(toric()) == 4
    assert manifold_dimension(InvariantTuple(AntisymmetricForm.standard(1), SaturatedSublattice.zero(2), Polytope.point())) == 2
    assert manifold_dimension(fixture("sphere-times-torus")) == 4


def test_classify_tuple_examples():
    assert classify_tuple(toric()) is IM
    seg = translate_to_centered(cube(1))
    t = InvariantTuple(AntisymmetricForm.zero(2), SaturatedSublattice(2, ((1, 0),)), seg, ((1,),), (((0, 0),),), ((0, 0),))
    assert classify_tuple(t) is SA
    t = InvariantTuple(
        AntisymmetricForm.zero(3),
        SaturatedSublattice(3, ((1, 0, 0),)),
        seg,
        ((1, 0), (0, 1)),
        (((0, 0, 0), (0, 0, 0)), ((0, 0, 0), (0, 0, 0))),
        ((0, 0, 0), (0, 0, 0)),
    )
    assert classify_tuple(t) is NA


def test_validate_examples():
    assert validate_tuple(toric()).ok
    bad = InvariantTuple(AntisymmetricForm.standard(1), SaturatedSublattice(2, ((1, 0),)), translate_to_centered(cube(1)))
    assert "t_h not in kernel" in validate_tuple(bad).diagnostics
    uncentered = InvariantTuple(AntisymmetricForm.zero(2), SaturatedSublattice.full(2), cube(2))
    assert validate_tuple(uncentered).diagnostics == ("Delta not centered",)
    with pytest.raises(InvalidTuple) as err:
        classify_tuple(uncentered)
    assert err.value.diagnostics == ("Delta not centered",)


def test_validate_reports_every_problem():
    t = InvariantTuple(AntisymmetricForm.zero(2), SaturatedSublattice(2, ((1, 0),)), Polytope.from_inequalities(1, [((1,), 1), ((-1,), 0)]), (), (), ())
    diag = validate_tuple(t).diagnostics
    assert "Delta not centered" in diag
    assert any(d.startswith("P not full rank") for d in diag)


def test_validate_not_delzant_and_wrong_dimension():
    tri = Polytope.from_inequalities(2, [((-1, 0), 0), ((0, -1), 0), ((1, 2), 2)])
    t = InvariantTuple(AntisymmetricForm.zero(2), SaturatedSublattice.full(2), translate_to_centered(tri))
    assert validate_tuple(t).diagnostics == ("Delta not Delzant",)
    t = InvariantTuple(AntisymmetricForm.zero(2), SaturatedSublattice.full(2), translate_to_centered(cube(1)))
    assert any("dimension" in d for d in validate_tuple(t).diagnostics)


def _circle_tuple(c=Fraction(0), tau=(0,), p=1):
    return InvariantTuple(AntisymmetricForm.zero(1), SaturatedSublattice.zero(1), Polytope.point(), ((p,),), (((c,),),), (tau,))


def test_c_checks():
    assert validate_tuple(_circle_tuple()).ok
    assert "c not antisymmetric" in validate_tuple(_circle_tuple(c=1)).diagnostics
    assert "c not integral" in validate_tuple(_circle_tuple(c=Fraction(1, 2))).diagnostics
    # c must lie in ker sigma
    t = InvariantTuple(
        SIGMA3, SaturatedSublattice.zero(3), Polytope.point(), ((1,),), (((1, 0, 0),),), ((0, 0, 0),)
    )
    assert "c not in ker(sigma)" in validate_tuple(t).diagnostics


def test_cocycle_failure_detected():
    e = lambda i: tuple(Fraction(int(i == j)) for j in range(3))
    z = (Fraction(0),) * 3
    c = [[z] * 3 for _ in range(3)]
    c[0][1], c[1][0] = e(2), tuple(-x for x in e(2))
    t = InvariantTuple(
        AntisymmetricForm.zero(3), SaturatedSublattice.zero(3), Polytope.point(), (e(0), e(1), e(2)), tuple(map(tuple, c)), (z, z, z)
    )
    assert any(d.startswith("c cocycle identity fails") for d in validate_tuple(t).diagnostics)


def test_tau_reduced_mod_one_and_extended():
    t = _circle_tuple(tau=(Fraction(7, 3),))
    assert t.tau == ((Fraction(1, 3),),)
    assert tau_on(t, (2,)) == (Fraction(2, 3),)
    # two generators with c(xi_0, xi_1) = e_1: tau(xi_0 + xi_1) = tau_0 + tau_1 - 1/2 e_1
    t = InvariantTuple(
        AntisymmetricForm.zero(2),
        SaturatedSublattice.zero(2),
        Polytope.point(),
        ((1, 0), (0, 1)),
        (((0, 0), (1, 0)), ((-1, 0), (0, 0))),
        ((Fraction(1, 4), 0), (0, Fraction(1, 3))),
    )
    assert validate_tuple(t).ok
    assert tau_on(t, (1, 1)) == (Fraction(3, 4), Fraction(1, 3))


def test_p_must_be_basis_of_n():
    t = _circle_tuple(p=0)
    assert any(d.startswith("P not full rank") for d in validate_tuple(t).diagnostics)
    t = InvariantTuple(AntisymmetricForm.zero(2), SaturatedSublattice.full(2), SQUARE, ((1,),), (((0, 0),),), ((0, 0),))
    assert "P nontrivial but N = 0" in validate_tuple(t).diagnostics


def test_check_almost_triviality_examples():
    t = InvariantTuple(AntisymmetricForm.zero(2), SaturatedSublattice.full(2), SQUARE, ((1,),), (((0, 0),),), ((0, 0),))
    assert "P is nontrivial but N = 0" in check_almost_triviality(t).diagnostics
    assert check_almost_triviality(_circle_tuple()).ok
    assert "c is nonzero" in check_almost_triviality(_circle_tuple(c=1)).diagnostics
    with pytest.raises(ValueError):
        check_almost_triviality(InvariantTuple(AntisymmetricForm.zero(2), SaturatedSublattice.zero(2), Polytope.point()))


def test_equivalence_examples():
    sq = fixture("toric-square")
    permuted = InvariantTuple(sq.sigma, sq.t_h, Polytope(2, tuple(reversed(sq.delta.facets))))
    assert tuples_equivalent(sq, permuted)
    shifted = InvariantTuple(sq.sigma, sq.t_h, sq.delta.translated((1, 0)))
    with pytest.raises(InvalidTuple):
        tuples_equivalent(sq, shifted)
    a = fixture("sphere-times-torus")
    b = InvariantTuple(a.sigma.scaled(2), a.t_h, a.delta)
    assert not tuples_equivalent(a, b)
    with pytest.raises(ValueError):
        tuples_equivalent(sq, a)


def test_equivalence_compares_torus_data():
    assert tuples_equivalent(_circle_tuple(), _circle_tuple())
    assert not tuples_equivalent(_circle_tuple(), _circle_tuple(p=2))
    assert not tuples_equivalent(_circle_tuple(), _circle_tuple(tau=(Fraction(1, 2),)))
    assert tuples_equivalent(_circle_tuple(tau=(Fraction(1, 2),)), _circle_tuple(tau=(Fraction(-1, 2),)))


# ---------------------------------------------------------------------------
# properties


def rank_arithmetic_class(t):
    """Dimension arithmetic from ranks, independent of the sublattice code."""
    k = t.dim_T - rank(t.sigma.entries, t.dim_T)
    h = t.t_h.rank
    if h == k:
        return IM
    if h == k - 1:
        return SA
    return NA


@given(seeds)
def test_classification_matches_rank_arithmetic(seed):
    t = random_valid_tuple(rng_from(seed))
    assert validate_tuple(t).ok
    assert classify_tuple(t) is rank_arithmetic_class(t)
    dim_ker = t.dim_T - t.sigma.rank
    assert manifold_dimension(t) - t.dim_T == dim_ker >= t.t_h.rank
    assert manifold_dimension(t) % 2 == 0


@given(seeds)
def test_fixed_point_orbit_datum_consistent(seed):
    t = random_valid_tuple(rng_from(seed), cls=IM)
    d = OrbitDatum(manifold_dimension(t), t.dim_T, t.t_h.rank)
    assert classify_orbit_datum(d) is IM


@given(seeds)
def test_equivalence_is_an_equivalence(seed):
    rng = rng_from(seed)
    a = random_valid_tuple(rng, max_dim=4, max_toric_dim=3)
    facets = list(a.delta.facets)
    rng.shuffle(facets)
    b = InvariantTuple(a.sigma, a.t_h, Polytope(a.delta.dim, tuple(facets)), a.p_generators, a.c_values, a.tau)
    c = InvariantTuple(a.sigma, a.t_h, a.delta.canonical(), a.p_generators, a.c_values, a.tau)
    assert tuples_equivalent(a, a)
    assert tuples_equivalent(a, b) and tuples_equivalent(b, a)
    assert tuples_equivalent(b, c) and tuples_equivalent(a, c)
    if a.delta.dim:
        other = InvariantTuple(a.sigma, a.t_h, random_delzant(rng, a.delta.dim), a.p_generators, a.c_values, a.tau)
        assert tuples_equivalent(a, other) == tuples_equivalent(other, a)
