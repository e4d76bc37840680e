import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given

from isomax.fixtures import fixture
from isomax.moser import (
    DegenerateInput,
    InvariantForm,
    Mode,
    PeriodicCoefficient,
    average_coefficients,
    averaged_matrix,
    check_exact_primitive,
    check_pencil_nondegenerate,
    equivariance_error,
    flow_differential,
    integrate_moser_flow,
    pfaffian,
    primitive_b,
    pullback_error,
    surface_integral,
    trivialize_bundle_coordinates,
)
from isomax.sampling import random_symplectic_trig_form, random_trig_form

from conftest import rng_from, seeds

F = Fraction
TWO_PI = 2 * math.pi


def coef(const=0, *modes):
    return PeriodicCoefficient((Mode(0, F(const)),) + tuple(Mode(*m) for m in modes))


def n1(f):
    return InvariantForm(1, {}, (f,))


def quad_mean(f, samples=10_000):
    s = np.arange(samples) / samples
    return float(np.mean(f(s)))


# ---------------------------------------------------------------------------
# periodic coefficients


def test_coefficient_is_canonical():
    a = PeriodicCoefficient((Mode(1, 1, 0), Mode(0, 2), Mode(1, -1, F(1, 2)), Mode(3, 0, 0)))
    assert a.modes == (Mode(0, F(2)), Mode(1, F(0), F(1, 2)))
    assert a == PeriodicCoefficient((Mode(1, 0, F(1, 2)), Mode(0, 2)))


@given(seeds)
def test_derivative_matches_finite_differences(seed):
    f = random_trig_form(rng_from(seed), n=1).coeffs[0]
    s = np.linspace(0, 1, 37)
    h = 1e-5
    numeric = (f(s + h) - f(s - h)) / (2 * h)
    assert np.allclose(f.derivative()(s), numeric, atol=1e-6)


@given(seeds)
def test_mean_matches_quadrature(seed):
    f = random_trig_form(rng_from(seed), n=1).coeffs[0]
    assert abs(float(f.mean()) - quad_mean(f)) < 1e-12


# ---------------------------------------------------------------------------
# averaging and the primitive


def test_average_examples():
    assert average_coefficients(n1(coef(1))) == (1,)
    w = fixture("moser-n1-half")
    assert average_coefficients(w) == (1,)
    assert abs(quad_mean(w.coeffs[0]) - 1) < 1e-12
    assert average_coefficients(n1(coef(0, (1, 1, 0)))) == (0,)


def test_primitive_examples():
    assert primitive_b(n1(coef(3))) == (PeriodicCoefficient((), -1),)
    s = np.linspace(0, 1, 101)
    (b,) = primitive_b(fixture("moser-n1-half"))
    assert np.allclose(b(s), (0.5 / TWO_PI) * (1 - np.cos(TWO_PI * s)), atol=1e-15)
    (b,) = primitive_b(n1(coef(0, (2, 1, 0))))
    assert np.allclose(b(s), np.sin(2 * TWO_PI * s) / (2 * TWO_PI), atol=1e-15)


@given(seeds)
def test_primitive_derivative_oracle(seed):
    w = random_trig_form(rng_from(seed))
    s = np.linspace(0, 1, 53)
    h = 1e-5
    for f, a, b in zip(w.coeffs, average_coefficients(w), primitive_b(w)):
        assert abs(float(b(0.0))) < 1e-15
        assert abs(float(b(1.0))) < 1e-12
        numeric = (b(s + h) - b(s - h)) / (2 * h)
        assert np.allclose(numeric, f(s) - float(a), atol=1e-6)


def test_exact_primitive_examples():
    assert check_exact_primitive(fixture("moser-n1")) is None
    w = InvariantForm(
        2, {(1, 2): 1}, (coef(1, (1, F(1, 5), 0)), coef(0, (2, 0, F(1, 3))), coef(0, (1, 0, F(1, 10)), (3, F(1, 7), 0)))
    )
    assert check_exact_primitive(w) is None
    b = list(primitive_b(w))
    m = b[1].modes
    b[1] = PeriodicCoefficient((Mode(m[-1].freq, m[-1].cos + F(1, 1000), m[-1].sin),) + m[:-1], b[1].scale)
    assert check_exact_primitive(w, b) == 1


@given(seeds)
def test_exact_primitive_random(seed):
    assert check_exact_primitive(random_trig_form(rng_from(seed))) is None


@given(seeds)
def test_stokes_independence(seed):
    rng = rng_from(seed)
    w = random_trig_form(rng)
    a = average_coefficients(w)
    d = w.dim
    for _ in range(20):
        y = [rng.random() for _ in range(d)]
        for i in range(d):
            for j in range(i + 1, d):
                expected = float(a[i]) if j == d - 1 else float(w.constants.get((i, j), 0))
                assert abs(surface_integral(w, i, j, y) - expected) < 1e-10


# ---------------------------------------------------------------------------
# pencil


def test_pfaffian_squares_to_determinant():
    rng = np.random.default_rng(0)
    for m in (2, 4, 6):
        A = rng.normal(size=(m, m))
        A = A - A.T
        assert abs(pfaffian(A) ** 2 - np.linalg.det(A)) < 1e-9
    assert pfaffian(np.array([[0.0, 2.0], [-2.0, 0.0]])) == 2.0


def test_pencil_examples():
    assert check_pencil_nondegenerate(fixture("moser-n1-half")) == pytest.approx(0.5, abs=1e-12)
    w = fixture("moser-invariant")
    assert check_pencil_nondegenerate(w) == pytest.approx(abs(pfaffian(averaged_matrix(w))))
    with pytest.raises(DegenerateInput):
        check_pencil_nondegenerate(fixture("moser-degenerate"))


def test_pencil_n1_dense_oracle():
    f = fixture("moser-n1").coeffs[0]
    s = np.linspace(0, 1, 4001)
    t = np.linspace(0, 1, 201)[:, None]
    oracle = np.abs((1 - t) * f(s) + t).min()
    assert check_pencil_nondegenerate(fixture("moser-n1"), 201, 4000) == pytest.approx(oracle, abs=1e-9)


@given(seeds)
def test_pencil_positive_for_symplectic_forms(seed):
    w = random_symplectic_trig_form(rng_from(seed))
    assert check_pencil_nondegenerate(w) > 0


# ---------------------------------------------------------------------------
# flow


def test_flow_trivial_for_invariant_form():
    r = integrate_moser_flow(fixture("moser-invariant"), steps=50, samples=16)
    assert r.passed and r.flow_pullback_error < 1e-12


def test_flow_n1_fixture():
    w = fixture("moser-n1")
    r = integrate_moser_flow(w)
    assert r.passed
    assert r.flow_pullback_error < 1e-6
    assert r.equivariance_error < 1e-13


def test_flow_fourth_order():
    w = fixture("moser-n1")
    errs = []
    for steps in (10, 20, 40):
        x0, _, J = flow_differential(w, steps, 64)
        errs.append(pullback_error(w, x0, J))
    assert 12 <= errs[0] / errs[1] <= 20
    assert 12 <= errs[1] / errs[2] <= 20


def test_flow_n2_fixture():
    r = integrate_moser_flow(fixture("moser-n2"))
    assert r.min_pencil_pfaffian > 0
    assert r.flow_pullback_error < 1e-5
    assert r.passed


@given(seeds)
def test_field_is_translation_invariant(seed):
    w = random_symplectic_trig_form(rng_from(seed))
    x0 = np.random.default_rng(seed % 2**32).random((8, w.dim))
    assert equivariance_error(w, x0) < 1e-13


def test_report_flags_failure_at_tight_tolerance():
    r = integrate_moser_flow(fixture("moser-n1"), steps=5, samples=8, tol=1e-9)
    assert not r.passed and r.failures


def test_form_validation():
    with pytest.raises(ValueError):
        InvariantForm(1, {(0, 1): 1}, (coef(1),))
    with pytest.raises(ValueError):
        InvariantForm(2, {}, (coef(1),))


# ---------------------------------------------------------------------------
# bundle chart


def test_bundle_chart_examples():
    c = trivialize_bundle_coordinates(1, 2)
    assert c.acting_coordinates == (0,) and c.base_coordinate == 1
    c = trivialize_bundle_coordinates(3, 4)
    assert c.acting_coordinates == (0, 1, 2) and c.acting_sublattice.rank == 3
    with pytest.raises(ValueError):
        trivialize_bundle_coordinates(2, 4)
