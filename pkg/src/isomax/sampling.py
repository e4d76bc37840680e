"""Seeded random generators for forms, Delzant polytopes, tuples and Moser inputs.

Everything takes a ``random.Random`` so suites are reproducible.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .invariants import InvariantTuple, MaximalityClass
from .lattice import (
    AntisymmetricForm,
    Matrix,
    SaturatedSublattice,
    determinant,
    identity,
    kernel_lattice,
    matmul,
    rank,
    transpose,
)
from .moser import DegenerateInput, InvariantForm, Mode, PencilDegenerate, PeriodicCoefficient, check_pencil_nondegenerate
from .polytope import Polytope, cube, hirzebruch, simplex, translate_to_centered

_SCALES = (Fraction(1), Fraction(2), Fraction(1, 2), Fraction(3), Fraction(-1), Fraction(5, 3))


def random_unimodular(rng: random.Random, n: int, moves: int = 6) -> Matrix:
    """Product of a few elementary integer row operations and swaps."""
    A = [list(r) for r in identity(n)]
    if n < 2:
        return tuple(tuple(r) for r in A)
    for _ in range(moves):
        i, j = rng.sample(range(n), 2)
        if rng.random() < 0.2:
            A[i], A[j] = A[j], A[i]
        else:
            q = rng.choice((-1, 1))
            A[i] = [a + q * b for a, b in zip(A[i], A[j])]
    return tuple(tuple(r) for r in A)


def random_form(rng: random.Random, dim: int, half_rank: int | None = None) -> AntisymmetricForm:
    """``M^T J M`` with ``J`` a scaled block form of the requested rank and ``M`` invertible."""
    if half_rank is None:
        half_rank = rng.randint(0, dim // 2)
    if 2 * half_rank > dim:
        raise ValueError("rank exceeds dimension")
    J = [[Fraction(0)] * dim for _ in range(dim)]
    for b in range(half_rank):
        s = rng.choice(_SCALES)
        J[2 * b][2 * b + 1] = s
        J[2 * b + 1][2 * b] = -s
    while True:
        M = tuple(tuple(rng.randint(-2, 2) for _ in range(dim)) for _ in range(dim))
        if dim == 0 or determinant(M) != 0:
            break
    return AntisymmetricForm(matmul(matmul(transpose(M, dim), J), M) if dim else ())


def random_sublattice_of(rng: random.Random, L: SaturatedSublattice, k: int) -> SaturatedSublattice:
    """A random saturated rank-``k`` sublattice of the saturated lattice ``L``."""
    U = random_unimodular(rng, L.rank)
    rows = tuple(
        tuple(sum(c * b[i] for c, b in zip(U[r], L.basis)) for i in range(L.ambient)) for r in range(k)
    )
    return SaturatedSublattice(L.ambient, rows)


def _size(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(1, 6), rng.choice((1, 1, 2, 3)))


def random_delzant(rng: random.Random, dim: int, max_facets: int = 8) -> Polytope:
    """Centered Delzant polytope: products of simplices, cubes and Hirzebruch trapezoids, unimodularly moved."""
    if dim == 0:
        return Polytope.point()
    while True:
        pieces, left = [], dim
        while left:
            k = rng.randint(1, left)
            kind = rng.choice(("simplex", "cube", "hirzebruch") if k == 2 else ("simplex", "cube"))
            if kind == "simplex":
                pieces.append(simplex(k, _size(rng)))
            elif kind == "cube":
                pieces.append(cube(k, _size(rng)))
            else:
                b, t = _size(rng), rng.randint(0, 3)
                pieces.append(hirzebruch(t * b + _size(rng), b, t))
            left -= k
        P = pieces[0]
        for Q in pieces[1:]:
            P = P.product(Q)
        if len(P.facets) <= max_facets:
            break
    P = P.transformed(random_unimodular(rng, dim))
    shift = tuple(Fraction(rng.randint(-3, 3), rng.choice((1, 2))) for _ in range(dim))
    return translate_to_centered(P.translated(shift)).canonical()


def _random_tuple_with(rng: random.Random, sigma: AntisymmetricForm, h: int) -> InvariantTuple:
    d = sigma.dim
    kernel = kernel_lattice(sigma)
    t_h = random_sublattice_of(rng, kernel, h)
    delta = random_delzant(rng, h)
    probe = InvariantTuple(sigma, t_h, delta)
    m = probe.dim_N
    while True:
        P = tuple(tuple(Fraction(rng.randint(-3, 3), rng.choice((1, 2, 3))) for _ in range(m)) for _ in range(m))
        if rank(P, m) == m:
            break
    # c lives in ker sigma; beyond two generators keep it in t_h so the cocycle identity is automatic
    source = kernel.basis if m <= 2 else t_h.basis
    c = [[(Fraction(0),) * d for _ in range(m)] for _ in range(m)]
    for i in range(m):
        for j in range(i + 1, m):
            coeffs = [rng.randint(-2, 2) for _ in source]
            v = tuple(sum(q * b[a] for q, b in zip(coeffs, source)) for a in range(d))
            c[i][j] = tuple(Fraction(x) for x in v)
            c[j][i] = tuple(-Fraction(x) for x in v)
    tau = tuple(tuple(Fraction(rng.randint(0, 5), 6) for _ in range(d)) for _ in range(m))
    return InvariantTuple(sigma, t_h, delta, P, tuple(map(tuple, c)), tau)


def random_valid_tuple(
    rng: random.Random, max_dim: int = 6, cls: MaximalityClass | None = None, max_toric_dim: int = 4
) -> InvariantTuple:
    """A valid tuple; ``cls`` forces the maximality class when given."""
    while True:
        d = rng.randint(1, max_dim)
        sigma = random_form(rng, d)
        k = d - sigma.rank
        if cls is MaximalityClass.ISOTROPY_MAXIMAL:
            h = k
        elif cls is MaximalityClass.STRICTLY_ALMOST:
            h = k - 1
        elif cls is MaximalityClass.NOT_ALMOST:
            h = rng.randint(0, k - 2) if k >= 2 else -1
        else:
            h = rng.randint(0, k)
        if 0 <= h <= max_toric_dim:
            return _random_tuple_with(rng, sigma, h)


def random_isotropy_maximal_pair(rng: random.Random, max_toric_dim: int = 4, max_dim: int = 6):
    """``(sigma, Delta)`` with ``dim Delta = dim ker sigma``."""
    t = random_valid_tuple(rng, max_dim, MaximalityClass.ISOTROPY_MAXIMAL, max_toric_dim)
    return t.sigma, t.delta


def random_strictly_almost(rng: random.Random, max_dim: int = 6) -> InvariantTuple:
    return random_valid_tuple(rng, max_dim, MaximalityClass.STRICTLY_ALMOST)


def _random_coefficient(rng: random.Random, const: Fraction, modes: int, amp: Fraction) -> PeriodicCoefficient:
    ms = [Mode(0, const)]
    for _ in range(modes):
        ms.append(
            Mode(
                rng.randint(1, 3),
                Fraction(rng.randint(-10, 10), 10) * amp,
                Fraction(rng.randint(-10, 10), 10) * amp,
            )
        )
    return PeriodicCoefficient(tuple(ms))


def random_trig_form(rng: random.Random, n: int | None = None, max_modes: int = 4) -> InvariantForm:
    """Any ``T^{2n-1}``-invariant trigonometric form (possibly degenerate)."""
    n = rng.choice((1, 2)) if n is None else n
    m = 2 * n - 1
    constants = {(i, j): Fraction(rng.randint(-3, 3), rng.choice((1, 2))) for i in range(m) for j in range(i + 1, m)}
    coeffs = tuple(
        _random_coefficient(
            rng, Fraction(rng.randint(-4, 4), 2), rng.randint(0, max_modes), Fraction(rng.randint(1, 4), 10)
        )
        for _ in range(m)
    )
    return InvariantForm(n, constants, coeffs)


def random_symplectic_trig_form(
    rng: random.Random, n: int | None = None, max_modes: int = 4, margin: float = 0.05, grid_t: int = 21, grid_x: int = 64
) -> InvariantForm:
    """Rejection-sample a form whose pencil stays at least ``margin`` away from degenerate."""
    while True:
        w = random_trig_form(rng, n, max_modes)
        try:
            if check_pencil_nondegenerate(w, grid_t, grid_x) >= margin:
                return w
        except (DegenerateInput, PencilDegenerate):
            continue
