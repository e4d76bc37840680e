"""Classification data for (almost) isotropy-maximal symplectic torus actions.

An action of ``T`` with coisotropic principal orbits is described by six
invariants: the form ``sigma`` on the Lie algebra, the Hamiltonian subtorus
``T_h``, the centered momentum polytope ``Delta``, a lattice ``P`` in
``N = (ker sigma / t_h)^*``, an antisymmetric ``c`` on ``P`` and a
representative ``tau`` of the holonomy class. Only the exact, decidable parts
are modelled here.

Coordinates on ``N`` come from a fixed chart: the Hermite basis of ``ker
sigma ∩ Z^d`` is split as the basis of ``t_h`` plus a deterministic integral
complement ``w_1, ..., w_m``; ``xi in N`` is stored as ``(xi(w_1), ...,
xi(w_m))``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce
from itertools import product
from math import lcm
from typing import Sequence

from .lattice import (
    AntisymmetricForm,
    SaturatedSublattice,
    hermite_normal_form,
    integral_complement,
    inverse,
    kernel_lattice,
    rank,
)
from .polytope import Polytope, PolytopeError, centroid, is_delzant, polytopes_equal


class MaximalityClass(str, enum.Enum):
    ISOTROPY_MAXIMAL = "IsotropyMaximal"
    STRICTLY_ALMOST = "StrictlyAlmostIsotropyMaximal"
    NOT_ALMOST = "NotAlmostIsotropyMaximal"


class SliceBoundViolated(ValueError):
    """``dim T_x > dim M - dim T``: no effective action has such an orbit."""


class InvalidTuple(ValueError):
    def __init__(self, diagnostics: Sequence[str]):
        self.diagnostics = tuple(diagnostics)
        super().__init__("; ".join(self.diagnostics))


# ---------------------------------------------------------------------------
# orbit data


@dataclass(frozen=True)
class OrbitDatum:
    """Dimensions at one point ``x``: ``dim M``, ``dim T`` and ``dim T_x``."""

    dim_M: int
    dim_T: int
    dim_stabilizer: int

    def __post_init__(self):
        if self.dim_M <= 0 or self.dim_M % 2:
            raise ValueError(f"dim_M must be even and positive, got {self.dim_M}")
        if not 0 <= self.dim_T <= self.dim_M:
            raise ValueError(f"need 0 <= dim_T <= dim_M, got dim_T = {self.dim_T}")
        if not 0 <= self.dim_stabilizer <= self.dim_T:
            raise ValueError(f"need 0 <= dim_stabilizer <= dim_T, got {self.dim_stabilizer}")
        if self.dim_stabilizer > self.dim_M - self.dim_T:
            raise SliceBoundViolated(
                f"dim_stabilizer = {self.dim_stabilizer} exceeds dim_M - dim_T = {self.dim_M - self.dim_T}"
            )


def classify_orbit_datum(d: OrbitDatum) -> MaximalityClass:
    total = d.dim_T + d.dim_stabilizer
    if total == d.dim_M:
        return MaximalityClass.ISOTROPY_MAXIMAL
    if total == d.dim_M - 1:
        return MaximalityClass.STRICTLY_ALMOST
    return MaximalityClass.NOT_ALMOST


# ---------------------------------------------------------------------------
# the six invariants


def _reduce_mod1(v: Sequence) -> tuple[Fraction, ...]:
    return tuple(Fraction(x) % 1 for x in v)


@dataclass(frozen=True)
class InvariantTuple:
    """``(sigma, t_h, Delta, P, c, tau)``; trivial P, c, tau are empty.

    ``p_generators[k]`` is a generator of ``P`` in N-coordinates,
    ``c_values[i][j]`` is ``c(xi_i, xi_j)`` as an integer vector of ``Z^d`` and
    ``tau[k]`` is ``tau(xi_k)`` as a point of ``R^d / Z^d``.
    """

    sigma: AntisymmetricForm
    t_h: SaturatedSublattice
    delta: Polytope
    p_generators: tuple[tuple[Fraction, ...], ...] = ()
    c_values: tuple[tuple[tuple[Fraction, ...], ...], ...] = ()
    tau: tuple[tuple[Fraction, ...], ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "p_generators", tuple(tuple(Fraction(x) for x in g) for g in self.p_generators))
        object.__setattr__(
            self, "c_values", tuple(tuple(tuple(Fraction(x) for x in v) for v in row) for row in self.c_values)
        )
        object.__setattr__(self, "tau", tuple(_reduce_mod1(v) for v in self.tau))

    @classmethod
    def isotropy_maximal(cls, sigma: AntisymmetricForm, delta: Polytope) -> "InvariantTuple":
        return cls(sigma, kernel_lattice(sigma), delta)

    @property
    def dim_T(self) -> int:
        return self.sigma.dim

    @cached_property
    def kernel(self) -> SaturatedSublattice:
        return kernel_lattice(self.sigma)

    @cached_property
    def chart(self) -> "QuotientChart":
        return QuotientChart(self.kernel, self.t_h)

    @property
    def dim_N(self) -> int:
        return self.kernel.rank - self.t_h.rank


class QuotientChart:
    """Integral coordinates on ``ker sigma / t_h`` (and dually on ``N``)."""

    def __init__(self, kernel: SaturatedSublattice, t_h: SaturatedSublattice):
        if not kernel.contains_lattice(t_h):
            raise ValueError("t_h is not contained in ker(sigma)")
        self.kernel = kernel
        self.t_h = t_h
        inner = SaturatedSublattice(kernel.rank, tuple(kernel.coordinates(v) for v in t_h.basis))
        comp = integral_complement(inner)
        self.w = tuple(
            tuple(sum(c * k[i] for c, k in zip(coeffs, kernel.basis)) for i in range(kernel.ambient))
            for coeffs in comp.basis
        )
        self._stack = list(t_h.basis) + list(self.w)
        # rows of a maximal minor of the stacked basis, and the inverse of that minor
        cols = [tuple(v[i] for v in self._stack) for i in range(kernel.ambient)]
        self._rows = _independent_rows(cols, len(self._stack)) if self._stack else []
        self._cols = cols
        self._minor_inv = inverse([cols[i] for i in self._rows]) if self._stack else ()

    @property
    def dim(self) -> int:
        return len(self.w)

    def quotient_coordinates(self, v: Sequence) -> tuple[Fraction, ...]:
        """Coordinates of the class of ``v in ker sigma`` along ``w``."""
        if not self._stack:
            if any(v):
                raise ValueError("vector not in ker(sigma)")
            return ()
        rhs = [v[i] for i in self._rows]
        x = tuple(sum((a * b for a, b in zip(row, rhs)), Fraction(0)) for row in self._minor_inv)
        if any(sum(c * xi for c, xi in zip(self._cols[i], x)) != v[i] for i in range(len(v))):
            raise ValueError("vector not in ker(sigma)")
        return x[self.t_h.rank :]

    def pair(self, xi: Sequence, v: Sequence) -> Fraction:
        return sum((a * b for a, b in zip(xi, self.quotient_coordinates(v))), Fraction(0))


def _independent_rows(rows: Sequence[Sequence], ncols: int) -> list[int]:
    chosen: list[int] = []
    for i in range(len(rows)):
        if rank([rows[j] for j in chosen + [i]], ncols) > len(chosen):
            chosen.append(i)
        if len(chosen) == ncols:
            break
    return chosen


def manifold_dimension(t: InvariantTuple) -> int:
    """``dim M = dim T + dim ker(sigma)``."""
    return t.dim_T + (t.dim_T - t.sigma.rank)


# ---------------------------------------------------------------------------
# tau on all of P


def c_on(t: InvariantTuple, n: Sequence[int], m: Sequence[int]) -> tuple[Fraction, ...]:
    """``c(x, y)`` for ``x = sum n_i xi_i`` and ``y = sum m_j xi_j``."""
    out = [Fraction(0)] * t.dim_T
    for i, j in product(range(len(n)), repeat=2):
        if n[i] and m[j]:
            for k, x in enumerate(t.c_values[i][j]):
                out[k] += n[i] * m[j] * x
    return tuple(out)


def tau_on(t: InvariantTuple, n: Sequence[int]) -> tuple[Fraction, ...]:
    """``tau(sum n_i xi_i)`` from the generator values.

    Uses ``tau(x + y) = tau(x) + tau(y) - c(x, y)/2`` (additive notation in
    ``R^d/Z^d``) applied generator by generator.
    """
    out = [Fraction(0)] * t.dim_T
    k = len(n)
    for i in range(k):
        for a in range(t.dim_T):
            out[a] += n[i] * t.tau[i][a]
    for i in range(k):
        for j in range(i + 1, k):
            for a in range(t.dim_T):
                out[a] -= Fraction(n[i] * n[j]) * t.c_values[i][j][a] / 2
    return _reduce_mod1(out)


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class ValidationReport:
    diagnostics: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.diagnostics

    def __bool__(self) -> bool:
        return self.ok


def validate_tuple(t: InvariantTuple) -> ValidationReport:
    """Check every invariant and report all violations (no short circuit)."""
    d = t.dim_T
    diag: list[str] = []
    if t.t_h.ambient != d:
        diag.append(f"t_h lives in Z^{t.t_h.ambient}, expected Z^{d}")
        return ValidationReport(tuple(diag))
    chart = None
    if not t.kernel.contains_lattice(t.t_h):
        diag.append("t_h not in kernel")
    else:
        chart = t.chart

    if t.delta.dim != t.t_h.rank:
        diag.append(f"Delta dimension {t.delta.dim} does not match rank t_h = {t.t_h.rank}")
    else:
        try:
            if not is_delzant(t.delta).is_delzant:
                diag.append("Delta not Delzant")
            if any(centroid(t.delta)):
                diag.append("Delta not centered")
        except PolytopeError as exc:
            diag.append(f"Delta invalid: {type(exc).__name__}: {exc}")

    k = len(t.p_generators)
    if chart is None:
        if k or t.c_values or t.tau:
            diag.append("P, c, tau unchecked: N is undefined while t_h is not in ker(sigma)")
        return ValidationReport(tuple(diag))

    m = chart.dim
    if m == 0 and k:
        diag.append("P nontrivial but N = 0")
    elif any(len(g) != m for g in t.p_generators):
        diag.append(f"P generators must have length dim N = {m}")
    elif k != m or rank(t.p_generators, m) != m:
        diag.append(f"P not full rank: need a basis of {m} independent generators (N/P compact)")

    shape_ok = len(t.c_values) == k and all(
        len(row) == k and all(len(v) == d for v in row) for row in t.c_values
    )
    if not shape_ok:
        diag.append(f"c must be a {k}x{k} table of vectors in Z^{d}")
    else:
        if any(x.denominator != 1 for row in t.c_values for v in row for x in v):
            diag.append("c not integral")
        if any(t.c_values[i][j] != tuple(-x for x in t.c_values[j][i]) for i in range(k) for j in range(k)):
            diag.append("c not antisymmetric")
        if any(not t.kernel.contains(tuple(v)) for row in t.c_values for v in row if any(v)):
            diag.append("c not in ker(sigma)")
        elif len(t.p_generators) == k and all(len(g) == m for g in t.p_generators):
            xi = t.p_generators
            cq = [[chart.quotient_coordinates(v) for v in row] for row in t.c_values]

            def pair(a, v):
                return sum((x * y for x, y in zip(a, v)), Fraction(0))

            for i, j, l in product(range(k), repeat=3):
                s = pair(xi[i], cq[j][l]) + pair(xi[j], cq[l][i]) + pair(xi[l], cq[i][j])
                if s != 0:
                    diag.append(f"c cocycle identity fails on generators ({i}, {j}, {l})")
                    break

    if len(t.tau) != k or any(len(v) != d for v in t.tau):
        diag.append(f"tau must assign a point of R^{d}/Z^{d} to each of the {k} generators")
    elif shape_ok:
        if not _tau_relation_holds(t):
            diag.append("tau relation fails")
    return ValidationReport(tuple(diag))


def _tau_relation_holds(t: InvariantTuple) -> bool:
    """``tau(x) + tau(y) == tau(x + y) + c(x, y)/2`` mod 1 on generator pairs and sums.

    Swapping ``x`` and ``y`` changes ``c(x, y)/2`` by the integer vector ``c(x, y)``,
    so unordered pairs suffice.
    """
    k = len(t.p_generators)
    basis = [tuple(int(i == j) for j in range(k)) for i in range(k)]
    cache: dict[tuple, tuple[Fraction, ...]] = {}

    def tau(n):
        if n not in cache:
            cache[n] = tau_on(t, n)
        return cache[n]

    pairs = [(basis[i], basis[j]) for i in range(k) for j in range(i, k)]
    pairs += [(tuple(x + y for x, y in zip(basis[i], basis[j])), c) for i in range(k) for j in range(i, k) for c in basis]
    for x, y in pairs:
        lhs = _reduce_mod1(a + b for a, b in zip(tau(x), tau(y)))
        s = tuple(a + b for a, b in zip(x, y))
        rhs = _reduce_mod1(a + b / 2 for a, b in zip(tau(s), c_on(t, x, y)))
        if lhs != rhs:
            return False
    return True


def require_valid(t: InvariantTuple) -> None:
    report = validate_tuple(t)
    if not report.ok:
        raise InvalidTuple(report.diagnostics)


# ---------------------------------------------------------------------------
# classification and equivalence


def classify_tuple(t: InvariantTuple) -> MaximalityClass:
    """``t_h = ker sigma`` → isotropy-maximal; corank one → strictly almost."""
    require_valid(t)
    return _rank_class(t)


def _rank_class(t: InvariantTuple) -> MaximalityClass:
    if t.t_h == t.kernel:
        return MaximalityClass.ISOTROPY_MAXIMAL
    if t.t_h.rank == t.kernel.rank - 1:
        return MaximalityClass.STRICTLY_ALMOST
    return MaximalityClass.NOT_ALMOST


def check_almost_triviality(t: InvariantTuple) -> ValidationReport:
    """Report nontrivial ``c`` (and ``P``, ``tau`` when ``N = 0``).

    Works from ranks alone, so it also reports on tuples that fail validation
    for exactly these reasons.
    """
    if not t.kernel.contains_lattice(t.t_h):
        raise ValueError("t_h is not contained in ker(sigma)")
    cls = _rank_class(t)
    if cls is MaximalityClass.NOT_ALMOST:
        raise ValueError("tuple is not almost isotropy-maximal")
    diag = []
    if any(any(v) for row in t.c_values for v in row):
        diag.append("c is nonzero")
    if cls is MaximalityClass.ISOTROPY_MAXIMAL:
        if t.p_generators:
            diag.append("P is nontrivial but N = 0")
        if t.c_values:
            diag.append("c is nontrivial but N = 0")
        if t.tau:
            diag.append("tau is nontrivial but P = 0")
    return ValidationReport(tuple(diag))


def canonical_torus_data(t: InvariantTuple):
    """``(P, c, tau)`` re-expressed in the Hermite basis of the lattice ``P``."""
    k = len(t.p_generators)
    if not k:
        return (), (), ()
    den = reduce(lcm, (x.denominator for g in t.p_generators for x in g), 1)
    G = [[int(x * den) for x in g] for g in t.p_generators]
    H, U = hermite_normal_form(G)
    gens = tuple(tuple(Fraction(x, den) for x in row) for row in H)
    c = tuple(tuple(c_on(t, U[a], U[b]) for b in range(k)) for a in range(k))
    tau = tuple(tau_on(t, U[a]) for a in range(k))
    return gens, c, tau


def tuples_equivalent(a: InvariantTuple, b: InvariantTuple) -> bool:
    """Equality of invariants; for isotropy-maximal tuples only ``sigma`` and ``Delta`` matter.

    ``tau`` is compared as a representative, so tuples that agree only modulo
    the action of ``exp(A)`` on holonomies compare unequal.
    """
    if a.dim_T != b.dim_T:
        raise ValueError(f"tori of different dimension: {a.dim_T} vs {b.dim_T}")
    require_valid(a)
    require_valid(b)
    ca, cb = classify_tuple(a), classify_tuple(b)
    if ca is MaximalityClass.ISOTROPY_MAXIMAL and cb is MaximalityClass.ISOTROPY_MAXIMAL:
        return a.sigma == b.sigma and polytopes_equal(a.delta, b.delta)
    if a.sigma != b.sigma or a.t_h != b.t_h or a.delta.dim != b.delta.dim:
        return False
    if not polytopes_equal(a.delta, b.delta):
        return False
    return canonical_torus_data(a) == canonical_torus_data(b)
