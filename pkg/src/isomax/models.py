"""Product models: a toric factor times a symplectic torus factor.

A model is a descriptor, not a manifold: the Delzant data of the toric factor,
the splitting ``Z^d = t_h ⊕ C`` of the acting lattice, the invariant form on the
torus factor ``Z^r`` and the sublattice ``K ⊆ Z^r`` through which ``C`` acts.
The i-th basis vector of ``C`` acts as ``e_i`` of ``Z^r``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .invariants import (
    InvariantTuple,
    MaximalityClass,
    check_almost_triviality,
    classify_tuple,
)
from .lattice import (
    AntisymmetricForm,
    Matrix,
    determinant,
    SaturatedSublattice,
    identity,
    integral_complement,
    integral_kernel,
    inverse,
    kernel_lattice,
    matmul,
    rank,
    restrict_form,
    smith_normal_form,
    transpose,
    unimodular_inverse,
)
from .polytope import HalfSpace, Polytope, centroid, is_delzant


class ModelError(ValueError):
    pass


class DegenerateRestriction(AssertionError):
    """The restricted form came out degenerate; valid inputs never do this."""


@dataclass(frozen=True)
class DelzantConstructionData:
    """Facet data of a Delzant polytope plus the map ``Z^F -> Z^n``, ``e_i -> u_i``."""

    dim: int
    normals: tuple[tuple[int, ...], ...]
    offsets: tuple[Fraction, ...]

    @classmethod
    def from_polytope(cls, delta: Polytope) -> "DelzantConstructionData":
        canon = delta.canonical()
        return cls(canon.dim, tuple(h.normal for h in canon.facets), tuple(h.offset for h in canon.facets))

    @property
    def facet_matrix(self) -> Matrix:
        """``n x F``; column i is the i-th facet normal."""
        return transpose(self.normals, self.dim)

    @property
    def kernel(self) -> SaturatedSublattice:
        return integral_kernel(self.facet_matrix, len(self.normals))

    @property
    def polytope(self) -> Polytope:
        return Polytope(self.dim, tuple(HalfSpace(u, lam) for u, lam in zip(self.normals, self.offsets)))

    def check(self) -> None:
        F = len(self.normals)
        if self.dim and rank(self.facet_matrix, F) != self.dim:
            raise ModelError("facet normals do not span the lattice")
        if self.dim and any(d != 1 for d in smith_normal_form(self.facet_matrix, F).invariant_factors):
            raise ModelError("facet normals do not generate the lattice")


@dataclass(frozen=True)
class ProductModel:
    dim_T: int
    toric_factor: DelzantConstructionData
    hamiltonian: SaturatedSublattice
    complement: Matrix
    omega: AntisymmetricForm
    acting: SaturatedSublattice

    def __post_init__(self):
        object.__setattr__(self, "complement", tuple(tuple(int(x) for x in v) for v in self.complement))

    @property
    def complement_lattice(self) -> SaturatedSublattice:
        return SaturatedSublattice(self.dim_T, self.complement)

    @property
    def torus_rank(self) -> int:
        return self.omega.dim

    @property
    def toric_dim(self) -> int:
        return self.toric_factor.dim

    @property
    def manifold_dimension(self) -> int:
        return 2 * self.toric_dim + self.torus_rank

    @property
    def acting_codimension(self) -> int:
        return self.torus_rank - self.acting.rank

    def check(self) -> None:
        problems = []
        if not self.omega.is_nondegenerate():
            problems.append("omega is degenerate")
        if self.torus_rank % 2:
            problems.append("torus factor has odd rank")
        if self.acting_codimension not in (0, 1):
            problems.append("K must have codimension 0 or 1")
        if self.acting.rank != len(self.complement):
            problems.append("rank K differs from rank of the complement")
        if self.hamiltonian.rank != self.toric_dim:
            problems.append("toric factor dimension differs from rank t_h")
        B = self.hamiltonian.basis + self.complement
        if len(B) != self.dim_T or abs(determinant(B)) != 1:
            problems.append("t_h and C do not split Z^d")
        if problems:
            raise ModelError("; ".join(problems))


def build_isotropy_maximal_model(sigma: AntisymmetricForm, delta: Polytope) -> ProductModel:
    """``M_h x T_f`` with ``T_f`` an integral complement of ``ker sigma``."""
    kernel = kernel_lattice(sigma)
    if delta.dim != kernel.rank:
        raise ModelError(f"Delta has dimension {delta.dim}, but dim ker(sigma) = {kernel.rank}")
    if not is_delzant(delta).is_delzant:
        raise ModelError("Delta is not a Delzant polytope")
    if any(centroid(delta)):
        raise ModelError("Delta is not centered at the origin")
    splitting = integral_complement(kernel)
    omega_f = restrict_form(sigma, splitting)
    if not omega_f.is_nondegenerate() or omega_f.rank != sigma.rank:
        raise DegenerateRestriction("restriction of sigma to the complement is degenerate")
    toric = DelzantConstructionData.from_polytope(delta)
    toric.check()
    model = ProductModel(
        dim_T=sigma.dim,
        toric_factor=toric,
        hamiltonian=kernel,
        complement=splitting.basis,
        omega=omega_f,
        acting=SaturatedSublattice.full(splitting.rank),
    )
    model.check()
    return model


def extract_invariants(m: ProductModel) -> tuple[AntisymmetricForm, Polytope]:
    """Recover ``(sigma, Delta)`` from an isotropy-maximal model."""
    if m.acting_codimension:
        raise ModelError("K is a proper subtorus; only isotropy-maximal models can be inverted")
    B = m.hamiltonian.basis + m.complement
    h = m.hamiltonian.rank
    r = m.torus_rank
    # sigma in the basis B is block diagonal (0 on t_h, omega on C)
    block = [[Fraction(0)] * m.dim_T for _ in range(m.dim_T)]
    for i in range(r):
        for j in range(r):
            block[h + i][h + j] = m.omega.entries[i][j]
    Binv = unimodular_inverse(B)
    sigma = matmul(matmul(Binv, block), transpose(Binv))
    return AntisymmetricForm(sigma), m.toric_factor.polytope


def _split_kernel(t: InvariantTuple):
    """Residual kernel direction ``w`` and a complement ``F`` of ``ker sigma``."""
    chart = t.chart
    return chart.w, integral_complement(t.kernel)


def decompose_almost(t: InvariantTuple) -> ProductModel:
    """Split off the toric factor, leaving the (T^r, K) part."""
    cls = classify_tuple(t)
    if cls is MaximalityClass.NOT_ALMOST:
        raise ModelError("tuple is not almost isotropy-maximal")
    report = check_almost_triviality(t)
    if not report.ok:
        raise ModelError("; ".join(report.diagnostics))
    if cls is MaximalityClass.ISOTROPY_MAXIMAL:
        return build_isotropy_maximal_model(t.sigma, t.delta)

    (w,), F = _split_kernel(t)
    C_rows = (w,) + F.basis
    base = restrict_form(t.sigma, C_rows).entries
    r = len(C_rows) + 1
    p = t.p_generators[0][0] if t.p_generators else Fraction(1)
    omega = [[Fraction(0)] * r for _ in range(r)]
    for i in range(r - 1):
        for j in range(r - 1):
            omega[i][j] = base[i][j]
    omega[0][r - 1] = p
    omega[r - 1][0] = -p
    omega_form = AntisymmetricForm(tuple(map(tuple, omega)))
    if not omega_form.is_nondegenerate():
        raise DegenerateRestriction("completed torus form is degenerate")
    toric = DelzantConstructionData.from_polytope(t.delta)
    toric.check()
    model = ProductModel(
        dim_T=t.dim_T,
        toric_factor=toric,
        hamiltonian=t.t_h,
        complement=C_rows,
        omega=omega_form,
        acting=SaturatedSublattice(r, identity(r)[: r - 1]),
    )
    model.check()
    return model


def extend_to_isotropy_maximal(t: InvariantTuple) -> InvariantTuple:
    """Add one circle pairing with the residual kernel direction.

    ``sigma~(w, e_new) = 1`` for the chart direction ``w`` and ``sigma~`` vanishes
    on ``t_h``, on the integral complement of ``ker sigma`` and on ``e_new`` paired with
    those. The new kernel is exactly ``t_h``.
    """
    if classify_tuple(t) is not MaximalityClass.STRICTLY_ALMOST:
        raise ModelError("only strictly almost isotropy-maximal tuples extend")
    d = t.dim_T
    (w,), F = _split_kernel(t)
    B = t.t_h.basis + (w,) + F.basis
    Binv = inverse(B)
    w_index = t.t_h.rank
    # e_j = sum_k Binv[j][k] B_k, so sigma~(e_j, e_new) is the w-coordinate of e_j
    column = [Binv[j][w_index] for j in range(d)]
    rows = [list(row) + [column[i]] for i, row in enumerate(t.sigma.entries)]
    rows.append([-x for x in column] + [Fraction(0)])
    sigma_ext = AntisymmetricForm(tuple(map(tuple, rows)))
    return InvariantTuple(sigma_ext, t.t_h.embed(1), t.delta)
