"""Rational polytopes in half-space form and the Delzant condition.

A polytope is ``{x : <u_i, x> <= lambda_i}`` with primitive integer normals
``u_i`` and rational offsets ``lambda_i``. Everything is exact; vertices are
found by exhausting n-subsets of facets, which is fine for n <= 4 and a few
dozen facets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce
from itertools import combinations
from math import factorial, gcd
from typing import Sequence

from .lattice import determinant, dot, rank, rational_nullspace, solve


class PolytopeError(ValueError):
    pass


class Unbounded(PolytopeError):
    pass


class Empty(PolytopeError):
    pass


class Degenerate(PolytopeError):
    """The polytope is not full-dimensional."""


@dataclass(frozen=True, order=True)
class HalfSpace:
    """``{x : <normal, x> <= offset}`` with a primitive integer normal."""

    normal: tuple[int, ...]
    offset: Fraction

    def __post_init__(self):
        normal = tuple(int(x) for x in self.normal)
        if isinstance(self.offset, float):
            raise TypeError("offsets must be exact rationals")
        if reduce(gcd, (abs(x) for x in normal), 0) != 1:
            raise ValueError(f"normal {normal} is not a primitive integer vector")
        object.__setattr__(self, "normal", normal)
        object.__setattr__(self, "offset", Fraction(self.offset))

    @classmethod
    def scaled(cls, normal: Sequence[int], offset) -> "HalfSpace":
        """Divide an integer normal (and offset) by the gcd of its entries."""
        g = reduce(gcd, (abs(int(x)) for x in normal), 0)
        if g == 0:
            raise ValueError("zero normal")
        return cls(tuple(int(x) // g for x in normal), Fraction(offset) / g)

    def slack(self, x: Sequence) -> Fraction:
        return self.offset - dot(self.normal, x)


@dataclass(frozen=True)
class Vertex:
    coordinates: tuple[Fraction, ...]
    active_facets: frozenset[int]


def _check_dims(facets: Sequence[HalfSpace], n: int) -> None:
    for h in facets:
        if len(h.normal) != n:
            raise ValueError(f"facet normal {h.normal} does not have length {n}")


def recession_direction(facets: Sequence[HalfSpace], n: int) -> tuple[Fraction, ...] | None:
    """A nonzero ``d`` with ``<u_i, d> <= 0`` for all i, or None.

    If the normals do not span R^n the cone contains a line. Otherwise the cone
    is pointed and is nonzero iff it has an extreme ray, i.e. a line cut out by
    n-1 independent normals one of whose directions satisfies every inequality.
    """
    normals = [h.normal for h in facets]
    if rank(normals, n) < n:
        return rational_nullspace(normals, n)[0]
    for subset in combinations(range(len(normals)), n - 1):
        rows = [normals[i] for i in subset]
        null = rational_nullspace(rows, n)
        if len(null) != 1:
            continue
        r = null[0]
        for d in (r, tuple(-x for x in r)):
            if all(dot(u, d) <= 0 for u in normals):
                return d
    return None


def enumerate_vertices(facets: Sequence[HalfSpace], n: int) -> list[Vertex]:
    """All vertices of the polytope, sorted by coordinates.

    Raises ``Unbounded`` if a recession direction exists and ``Empty`` if no
    point is feasible.
    """
    facets = list(facets)
    _check_dims(facets, n)
    if n == 0:
        return [Vertex((), frozenset())]
    if recession_direction(facets, n) is not None:
        raise Unbounded("the half-spaces admit a recession direction")
    found: dict[tuple[Fraction, ...], set[int]] = {}
    for subset in combinations(range(len(facets)), n):
        A = [facets[i].normal for i in subset]
        x = solve(A, [facets[i].offset for i in subset])
        if x is None or x in found:
            continue
        slacks = [h.slack(x) for h in facets]
        if min(slacks) < 0:
            continue
        found[x] = {i for i, s in enumerate(slacks) if s == 0}
    if not found:
        raise Empty("no feasible point")
    return [Vertex(x, frozenset(act)) for x, act in sorted(found.items())]


def _affine_rank(points: Sequence[Sequence]) -> int:
    if len(points) <= 1:
        return 0
    p0 = points[0]
    diffs = [[a - b for a, b in zip(p, p0)] for p in points[1:]]
    return rank(diffs, len(p0))


@dataclass(frozen=True)
class DelzantReport:
    simple: bool
    smooth: bool
    failing_vertices: tuple[tuple[Vertex, str], ...] = ()

    @property
    def is_delzant(self) -> bool:
        return self.simple and self.smooth

    def __bool__(self) -> bool:
        return self.is_delzant


@dataclass(frozen=True)
class Polytope:
    """A polytope given by facets, with lazily computed vertices.

    The constructor does not require the Delzant condition; ``is_delzant``
    reports on it, and the invariant data model insists on it.
    """

    dim: int
    facets: tuple[HalfSpace, ...] = field(default=())

    def __post_init__(self):
        facets = tuple(self.facets)
        _check_dims(facets, self.dim)
        object.__setattr__(self, "facets", facets)

    @classmethod
    def from_inequalities(cls, dim: int, rows: Sequence[tuple[Sequence[int], object]]) -> "Polytope":
        return cls(dim, tuple(HalfSpace.scaled(u, lam) for u, lam in rows))

    @classmethod
    def point(cls) -> "Polytope":
        return cls(0, ())

    @cached_property
    def vertices(self) -> tuple[Vertex, ...]:
        return tuple(enumerate_vertices(self.facets, self.dim))

    def check_full_dimensional(self) -> None:
        if _affine_rank([v.coordinates for v in self.vertices]) != self.dim:
            raise Degenerate("polytope is not full-dimensional")

    def is_bounded(self) -> bool:
        return self.dim == 0 or recession_direction(self.facets, self.dim) is None

    def canonical(self) -> "Polytope":
        """Irredundant facets, sorted by (normal, offset)."""
        self.check_full_dimensional()
        keep = set()
        for i, h in enumerate(self.facets):
            on_face = [v.coordinates for v in self.vertices if i in v.active_facets]
            if len(on_face) >= self.dim and _affine_rank(on_face) == self.dim - 1:
                keep.add(h)
        facets = tuple(sorted(keep))
        if facets == self.facets:
            return self
        out = Polytope(self.dim, facets)
        # same vertex set; only the facet labels move
        index = {h: j for j, h in enumerate(facets)}
        out.__dict__["vertices"] = tuple(
            Vertex(v.coordinates, frozenset(index[self.facets[i]] for i in v.active_facets if self.facets[i] in index))
            for v in self.vertices
        )
        return out

    def translated(self, shift: Sequence) -> "Polytope":
        """The image under ``x -> x + shift``."""
        return Polytope(
            self.dim,
            tuple(HalfSpace(h.normal, h.offset + dot(h.normal, shift)) for h in self.facets),
        )

    def transformed(self, A: Sequence[Sequence[int]]) -> "Polytope":
        """The image under the unimodular map ``x -> A x``."""
        from .lattice import unimodular_inverse, matmul

        Ainv = unimodular_inverse(A)
        return Polytope(
            self.dim,
            tuple(HalfSpace(matmul([h.normal], Ainv)[0], h.offset) for h in self.facets),
        )

    def product(self, other: "Polytope") -> "Polytope":
        n, m = self.dim, other.dim
        facets = [HalfSpace(h.normal + (0,) * m, h.offset) for h in self.facets]
        facets += [HalfSpace((0,) * n + h.normal, h.offset) for h in other.facets]
        return Polytope(n + m, tuple(facets))

    def contains(self, x: Sequence) -> bool:
        return all(h.slack(x) >= 0 for h in self.facets)


# ---------------------------------------------------------------------------
# standard shapes


def simplex(n: int, size=1) -> Polytope:
    """``{x >= 0, sum x <= size}``."""
    rows = [(tuple(-int(i == j) for j in range(n)), 0) for i in range(n)]
    rows.append(((1,) * n, size))
    return Polytope.from_inequalities(n, rows)


def cube(n: int, size=1) -> Polytope:
    rows = []
    for i in range(n):
        e = tuple(int(i == j) for j in range(n))
        rows.append((tuple(-x for x in e), 0))
        rows.append((e, size))
    return Polytope.from_inequalities(n, rows)


def hirzebruch(a, b, k: int) -> Polytope:
    """Trapezoid ``x, y >= 0, y <= b, x + k y <= a`` (requires a > k b)."""
    return Polytope.from_inequalities(2, [((-1, 0), 0), ((0, -1), 0), ((0, 1), b), ((1, k), a)])


# ---------------------------------------------------------------------------
# operations


def is_delzant(P: Polytope) -> DelzantReport:
    """Simplicity and smoothness at every vertex, with every failing vertex."""
    if not P.is_bounded():
        raise Unbounded("the half-spaces admit a recession direction")
    P = P.canonical()
    simple = smooth = True
    failing = []
    for v in P.vertices:
        active = sorted(v.active_facets)
        if len(active) != P.dim:
            simple = smooth = False
            failing.append((v, f"{len(active)} active facets, expected {P.dim}"))
            continue
        det = determinant([P.facets[i].normal for i in active])
        if abs(det) != 1:
            smooth = False
            failing.append((v, f"normals have determinant {det}"))
    return DelzantReport(simple, smooth, tuple(failing))


def _simplices(vertices: Sequence[Vertex], face: frozenset[int], dim: int, apex_key) -> list[list]:
    """Triangulate the face spanned by ``face`` (vertex indices) by coning."""
    pts = sorted(face, key=apex_key)
    if dim == 0:
        return [[vertices[pts[0]].coordinates]]
    apex = pts[0]
    facet_ids = set().union(*(vertices[i].active_facets for i in face))
    seen: set[frozenset[int]] = set()
    out = []
    for f in sorted(facet_ids):
        sub = frozenset(i for i in face if f in vertices[i].active_facets)
        if apex in sub or sub in seen or len(sub) < dim:
            continue
        if _affine_rank([vertices[i].coordinates for i in sub]) != dim - 1:
            continue
        seen.add(sub)
        for simplex_ in _simplices(vertices, sub, dim - 1, apex_key):
            out.append([vertices[apex].coordinates] + simplex_)
    return out


def triangulate(P: Polytope, apex: int = 0) -> list[list[tuple[Fraction, ...]]]:
    """Fan triangulation of a full-dimensional polytope, coning from ``apex``.

    ``apex`` indexes ``P.vertices``; lower faces are coned from their first
    vertex in the order that starts at ``apex``.
    """
    P.check_full_dimensional()
    vs = P.vertices
    nv = len(vs)
    key = lambda i: (i - apex) % nv  # noqa: E731
    return _simplices(vs, frozenset(range(nv)), P.dim, key)


def simplex_volume(points: Sequence[Sequence[Fraction]]) -> Fraction:
    p0 = points[0]
    n = len(p0)
    M = [[a - b for a, b in zip(p, p0)] for p in points[1:]]
    return abs(Fraction(determinant(M))) / factorial(n)


def volume(P: Polytope) -> Fraction:
    if P.dim == 0:
        P.vertices
        return Fraction(1)
    return sum((simplex_volume(s) for s in triangulate(P)), Fraction(0))


def centroid(P: Polytope, apex: int = 0) -> tuple[Fraction, ...]:
    """Exact center of mass; the result does not depend on ``apex``."""
    if P.dim == 0:
        P.vertices
        return ()
    total = Fraction(0)
    moment = [Fraction(0)] * P.dim
    for s in triangulate(P, apex):
        vol = simplex_volume(s)
        total += vol
        for k in range(P.dim):
            moment[k] += vol * sum(p[k] for p in s) / len(s)
    return tuple(m / total for m in moment)


def translate_to_centered(P: Polytope) -> Polytope:
    c = centroid(P)
    return P.translated(tuple(-x for x in c))


def polytopes_equal(P: Polytope, Q: Polytope) -> bool:
    if P.dim != Q.dim:
        raise ValueError("polytopes live in spaces of different dimension")
    return P.canonical().facets == Q.canonical().facets
