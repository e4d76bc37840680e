"""Exact linear algebra over the integral lattice of a torus.

Matrices are plain tuples of tuples of Python ints (or ``Fraction`` for
rational forms). Vectors are rows: a sublattice basis is a ``k x d`` matrix
whose rows are the basis vectors.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce
from math import gcd, lcm
from typing import Sequence

Matrix = tuple[tuple[int, ...], ...]
Vector = tuple[int, ...]


class NotSaturatedError(ValueError):
    """Raised when integer vectors do not span a saturated sublattice."""


# ---------------------------------------------------------------------------
# small helpers


def identity(n: int) -> Matrix:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def as_matrix(rows: Sequence[Sequence[int]]) -> Matrix:
    return tuple(tuple(int(x) for x in row) for row in rows)


def transpose(A: Sequence[Sequence], cols: int | None = None) -> tuple:
    if not A:
        return tuple(() for _ in range(cols or 0))
    return tuple(zip(*A))


def matmul(A: Sequence[Sequence], B: Sequence[Sequence]) -> tuple:
    Bt = transpose(B)
    if not Bt and B:
        return tuple(() for _ in A)
    return tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in Bt) for row in A)


def matvec(A: Sequence[Sequence], x: Sequence) -> tuple:
    return tuple(sum(a * b for a, b in zip(row, x)) for row in A)


def dot(x: Sequence, y: Sequence):
    return sum(a * b for a, b in zip(x, y))


def _rref(rows: Sequence[Sequence], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    M = [[Fraction(x) for x in row] for row in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = 1 / M[r][c]
        M[r] = [x * inv for x in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    return M, pivots


def rank(A: Sequence[Sequence], ncols: int | None = None) -> int:
    if not A:
        return 0
    return len(_rref(A, ncols if ncols is not None else len(A[0]))[1])


def determinant(A: Sequence[Sequence]):
    """Exact determinant by fraction-free (Bareiss) elimination for ints."""
    n = len(A)
    if n == 0:
        return 1
    if all(isinstance(x, int) for row in A for x in row):
        M = [list(row) for row in A]
        sign, prev = 1, 1
        for k in range(n - 1):
            if M[k][k] == 0:
                p = next((i for i in range(k + 1, n) if M[i][k] != 0), None)
                if p is None:
                    return 0
                M[k], M[p] = M[p], M[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
            prev = M[k][k]
        return sign * M[n - 1][n - 1]
    M = [[Fraction(x) for x in row] for row in A]
    det = Fraction(1)
    for k in range(n):
        p = next((i for i in range(k, n) if M[i][k] != 0), None)
        if p is None:
            return Fraction(0)
        if p != k:
            M[k], M[p] = M[p], M[k]
            det = -det
        det *= M[k][k]
        for i in range(k + 1, n):
            f = M[i][k] / M[k][k]
            M[i] = [a - f * b for a, b in zip(M[i], M[k])]
    return det


def inverse(A: Sequence[Sequence]) -> tuple[tuple[Fraction, ...], ...]:
    n = len(A)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(A)]
    M, pivots = _rref(aug, n)
    if pivots != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return tuple(tuple(row[n:]) for row in M)


def unimodular_inverse(A: Sequence[Sequence[int]]) -> Matrix:
    inv = inverse(A)
    if any(x.denominator != 1 for row in inv for x in row):
        raise ValueError("matrix is not unimodular")
    return tuple(tuple(int(x) for x in row) for row in inv)


def rational_nullspace(A: Sequence[Sequence], ncols: int) -> list[tuple[Fraction, ...]]:
    """Basis of {x : A x = 0} over the rationals."""
    M, pivots = _rref(A, ncols) if A else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for row, p in zip(M, pivots):
            x[p] = -row[f]
        basis.append(tuple(x))
    return basis


def solve(A: Sequence[Sequence], b: Sequence) -> tuple[Fraction, ...] | None:
    """Unique solution of the square system A x = b, or None if singular."""
    n = len(A)
    aug = [list(row) + [b[i]] for i, row in enumerate(A)]
    M, pivots = _rref(aug, n)
    if pivots != list(range(n)):
        return None
    return tuple(row[n] for row in M)


# ---------------------------------------------------------------------------
# normal forms


@dataclass(frozen=True)
class SmithDecomposition:
    """``U @ A @ V == D`` with ``U``, ``V`` unimodular and ``D`` diagonal."""

    U: Matrix
    D: Matrix
    V: Matrix

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        return tuple(self.D[i][i] for i in range(min(len(self.D), len(self.V))))

    @property
    def rank(self) -> int:
        return sum(1 for d in self.invariant_factors if d != 0)


def smith_normal_form(A: Sequence[Sequence[int]], cols: int | None = None) -> SmithDecomposition:
    m = len(A)
    n = len(A[0]) if m else (cols or 0)
    D = [list(map(int, row)) for row in A]
    U = [list(row) for row in identity(m)]
    V = [list(row) for row in identity(n)]

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for M in (D, V):
            for row in M:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row_dst += q * row_src
        for M in (D, U):
            M[dst] = [a + q * b for a, b in zip(M[dst], M[src])]

    def add_col(dst, src, q):  # col_dst += q * col_src
        for M in (D, V):
            for row in M:
                row[dst] += q * row[src]

    for t in range(min(m, n)):
        while True:
            entries = [(abs(D[i][j]), i, j) for i in range(t, m) for j in range(t, n) if D[i][j]]
            if not entries:
                break
            _, i, j = min(entries)
            swap_rows(t, i)
            swap_cols(t, j)
            p = D[t][t]
            clean = True
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(i, t, -(D[i][t] // p))
                    clean = clean and D[i][t] == 0
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(j, t, -(D[t][j] // p))
                    clean = clean and D[t][j] == 0
            if not clean:
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if D[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if t < m and D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
    return SmithDecomposition(as_matrix(U), as_matrix(D), as_matrix(V))


def hermite_normal_form(A: Sequence[Sequence[int]], cols: int | None = None) -> tuple[Matrix, Matrix]:
    """Row-style Hermite normal form ``H = U @ A`` with ``U`` unimodular.

    ``H`` is upper echelon, pivots are positive, entries above a pivot lie in
    ``[0, pivot)`` and zero rows sit at the bottom. ``H`` depends only on the
    lattice spanned by the rows of ``A``.
    """
    m = len(A)
    n = len(A[0]) if m else (cols or 0)
    H = [list(map(int, row)) for row in A]
    U = [list(row) for row in identity(m)]
    r = 0
    for c in range(n):
        if r == m:
            break
        while True:
            nz = [(abs(H[i][c]), i) for i in range(r, m) if H[i][c]]
            if not nz:
                break
            _, i = min(nz)
            H[r], H[i] = H[i], H[r]
            U[r], U[i] = U[i], U[r]
            done = True
            for i in range(r + 1, m):
                if H[i][c]:
                    q = H[i][c] // H[r][c]
                    H[i] = [a - q * b for a, b in zip(H[i], H[r])]
                    U[i] = [a - q * b for a, b in zip(U[i], U[r])]
                    done = done and H[i][c] == 0
            if done:
                break
        if H[r][c] == 0:
            continue
        if H[r][c] < 0:
            H[r] = [-x for x in H[r]]
            U[r] = [-x for x in U[r]]
        p = H[r][c]
        for i in range(r):
            q = H[i][c] // p
            if q:
                H[i] = [a - q * b for a, b in zip(H[i], H[r])]
                U[i] = [a - q * b for a, b in zip(U[i], U[r])]
        r += 1
    return as_matrix(H), as_matrix(U)


# ---------------------------------------------------------------------------
# sublattices


def is_primitive_system(vectors: Sequence[Sequence[int]], ambient: int) -> bool:
    """True iff the vectors are independent and span a saturated sublattice."""
    if not vectors:
        return True
    snf = smith_normal_form(vectors, ambient)
    return snf.rank == len(vectors) and all(d == 1 for d in snf.invariant_factors)


def saturation_basis(vectors: Sequence[Sequence[int]], ambient: int) -> Matrix:
    """Basis of ``span(vectors) ∩ Z^ambient``."""
    if not vectors:
        return ()
    snf = smith_normal_form(vectors, ambient)
    Vinv = unimodular_inverse(snf.V)
    return Vinv[: snf.rank]


def _canonical_basis(vectors: Sequence[Sequence[int]], ambient: int) -> Matrix:
    if not vectors:
        return ()
    H, _ = hermite_normal_form(vectors, ambient)
    return tuple(row for row in H if any(row))


@dataclass(frozen=True)
class SaturatedSublattice:
    """A saturated sublattice of ``Z^ambient`` with a Hermite-canonical basis.

    The constructor checks independence and saturation and replaces the basis
    by its Hermite form, so two instances are equal iff the lattices are.
    """

    ambient: int
    basis: Matrix = ()

    def __post_init__(self):
        basis = as_matrix(self.basis)
        if any(len(v) != self.ambient for v in basis):
            raise ValueError(f"basis vectors must have length {self.ambient}")
        if not is_primitive_system(basis, self.ambient):
            raise NotSaturatedError("basis vectors are dependent or span a non-saturated lattice")
        object.__setattr__(self, "basis", _canonical_basis(basis, self.ambient))

    @classmethod
    def spanned_by(cls, vectors: Sequence[Sequence[int]], ambient: int) -> "SaturatedSublattice":
        """Saturation of the lattice generated by ``vectors``."""
        return cls(ambient, saturation_basis(as_matrix(vectors), ambient))

    @classmethod
    def full(cls, ambient: int) -> "SaturatedSublattice":
        return cls(ambient, identity(ambient))

    @classmethod
    def zero(cls, ambient: int) -> "SaturatedSublattice":
        return cls(ambient, ())

    @property
    def rank(self) -> int:
        return len(self.basis)

    def contains(self, v: Sequence[int]) -> bool:
        return rank(list(self.basis) + [tuple(v)], self.ambient) == self.rank

    def contains_lattice(self, other: "SaturatedSublattice") -> bool:
        # both saturated, so span containment is lattice containment
        return other.ambient == self.ambient and all(self.contains(v) for v in other.basis)

    def coordinates(self, v: Sequence[int]) -> tuple[int, ...]:
        """Integer coordinates of ``v`` in the canonical basis."""
        if not self.basis:
            if any(v):
                raise ValueError("vector not in lattice")
            return ()
        aug = [list(col) + [x] for col, x in zip(transpose(self.basis), v)]
        M, pivots = _rref(aug, self.rank + 1)
        if self.rank in pivots:
            raise ValueError("vector not in lattice")
        coords = tuple(M[i][self.rank] for i in range(self.rank))
        if any(c.denominator != 1 for c in coords):
            raise ValueError("vector not in lattice")
        return tuple(int(c) for c in coords)

    def embed(self, extra: int) -> "SaturatedSublattice":
        """Image under ``Z^d -> Z^(d+extra)`` padding with zeros."""
        return SaturatedSublattice(self.ambient + extra, tuple(v + (0,) * extra for v in self.basis))


def integral_kernel(A: Sequence[Sequence[int]], cols: int) -> SaturatedSublattice:
    """Saturated lattice ``{x in Z^cols : A x = 0}``."""
    if not A:
        return SaturatedSublattice.full(cols)
    snf = smith_normal_form(A, cols)
    Vt = transpose(snf.V)
    return SaturatedSublattice(cols, Vt[snf.rank :])


def integral_complement(L: SaturatedSublattice | Sequence[Sequence[int]], ambient: int | None = None) -> SaturatedSublattice:
    """A complement ``C`` with ``L ⊕ C = Z^d``.

    Standard basis vectors are tried in index order and kept while the stacked
    system stays primitive; any remaining directions come from the Smith
    transform of the stacked basis.
    """
    if not isinstance(L, SaturatedSublattice):
        d = ambient if ambient is not None else len(L[0])
        if not is_primitive_system(as_matrix(L), d):
            raise NotSaturatedError("input does not span a saturated sublattice")
        L = SaturatedSublattice(d, L)
    d = L.ambient
    chosen: list[Vector] = []
    stacked = list(L.basis)
    for j in range(d):
        if len(stacked) == d:
            break
        e = tuple(int(i == j) for i in range(d))
        if is_primitive_system(stacked + [e], d):
            stacked.append(e)
            chosen.append(e)
    if len(stacked) < d:
        snf = smith_normal_form(stacked, d)
        extra = unimodular_inverse(snf.V)[len(stacked) :]
        chosen.extend(extra)
    return SaturatedSublattice(d, tuple(chosen))


# ---------------------------------------------------------------------------
# antisymmetric forms


def _frac(x) -> Fraction:
    if isinstance(x, float):
        raise TypeError("floating point entries are not allowed in exact forms")
    return Fraction(x)


@dataclass(frozen=True)
class AntisymmetricForm:
    """An antisymmetric bilinear form on ``R^dim`` with rational entries.

    The coordinates are those of the integral lattice, so ``entries[i][j]``
    is the value on the i-th and j-th lattice basis vectors.
    """

    entries: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(_frac(x) for x in row) for row in self.entries)
        d = len(rows)
        if any(len(row) != d for row in rows):
            raise ValueError("form must be square")
        for i in range(d):
            for j in range(i, d):
                if rows[i][j] != -rows[j][i]:
                    raise ValueError(f"form is not antisymmetric at ({i}, {j})")
        object.__setattr__(self, "entries", rows)

    @classmethod
    def zero(cls, dim: int) -> "AntisymmetricForm":
        return cls(tuple((0,) * dim for _ in range(dim)))

    @classmethod
    def standard(cls, n: int) -> "AntisymmetricForm":
        """``sum_k dx_{2k} ^ dx_{2k+1}`` on ``R^(2n)``."""
        rows = [[0] * (2 * n) for _ in range(2 * n)]
        for k in range(n):
            rows[2 * k][2 * k + 1] = 1
            rows[2 * k + 1][2 * k] = -1
        return cls(tuple(map(tuple, rows)))

    @property
    def dim(self) -> int:
        return len(self.entries)

    @cached_property
    def rank(self) -> int:
        return rank(self.entries, self.dim)

    def is_nondegenerate(self) -> bool:
        return self.rank == self.dim

    def __call__(self, x: Sequence, y: Sequence) -> Fraction:
        return dot(x, matvec(self.entries, y))

    def apply(self, x: Sequence) -> tuple[Fraction, ...]:
        return matvec(self.entries, x)

    def scaled(self, k) -> "AntisymmetricForm":
        return AntisymmetricForm(tuple(tuple(k * x for x in row) for row in self.entries))

    def integer_multiple(self) -> Matrix:
        """Smallest positive integer multiple of the form, as an int matrix."""
        den = reduce(lcm, (x.denominator for row in self.entries for x in row), 1)
        return tuple(tuple(int(x * den) for x in row) for row in self.entries)


def form_rank(sigma: AntisymmetricForm) -> int:
    return sigma.rank


def is_nondegenerate(sigma: AntisymmetricForm) -> bool:
    return sigma.is_nondegenerate()


def kernel_lattice(sigma: AntisymmetricForm) -> SaturatedSublattice:
    """``ker(sigma) ∩ Z^d`` as a saturated sublattice."""
    return integral_kernel(sigma.integer_multiple(), sigma.dim)


def restrict_form(sigma: AntisymmetricForm, basis: SaturatedSublattice | Sequence[Sequence[int]]) -> AntisymmetricForm:
    """Gram matrix ``B sigma B^T`` of the form on the rows of ``B``."""
    B = basis.basis if isinstance(basis, SaturatedSublattice) else as_matrix(basis)
    if any(len(v) != sigma.dim for v in B):
        raise ValueError(f"basis vectors must have length {sigma.dim}, the form's dimension")
    if rank(B, sigma.dim) != len(B):
        raise ValueError("basis vectors are linearly dependent")
    SB = matmul(sigma.entries, transpose(B, sigma.dim)) if B else ()
    return AntisymmetricForm(matmul(B, SB) if B else ())


def primitive(v: Sequence[int]) -> Vector:
    g = reduce(gcd, (abs(int(x)) for x in v), 0)
    if g == 0:
        raise ValueError("zero vector has no primitive direction")
    return tuple(int(x) // g for x in v)
