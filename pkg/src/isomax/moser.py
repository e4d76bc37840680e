"""Moser linearization of torus-invariant symplectic forms on ``T^{2n}``.

The form is ``omega = sum_{i<j} Omega_ij(x_{2n}) dx_i ^ dx_j`` where the
entries among the first ``2n-1`` coordinates are constants and
``Omega_{i,2n} = f_i`` are finite trigonometric polynomials of period 1.
Averaging and the primitive ``beta = sum_i b_i(x_{2n}) dx_i`` are computed
exactly on Fourier modes; only the flow is numerical.

Conventions: ``Omega`` is antisymmetric, ``omega(u, v) = u^T Omega v`` and
``(iota_Z omega)_j = sum_i Z^i Omega_ij``. The Moser field solves
``iota_{Z_t} omega_t = -beta``, i.e. ``Omega_t Z = beta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .lattice import SaturatedSublattice, identity

TWO_PI = 2.0 * math.pi

DEFAULT_STEPS = 1000
DEFAULT_SAMPLES = 64
DEFAULT_GRID_T = 101
DEFAULT_GRID_X = 256
DEFAULT_TOL = 1e-6


class DegenerateInput(ValueError):
    """The input form is degenerate somewhere on the sample grid."""


class PencilDegenerate(ValueError):
    """The straight-line interpolation to the averaged form degenerates."""


class FlowFailure(ArithmeticError):
    pass


# ---------------------------------------------------------------------------
# trigonometric polynomials


@dataclass(frozen=True, order=True)
class Mode:
    freq: int
    cos: Fraction
    sin: Fraction = Fraction(0)


def _exact(x) -> Fraction:
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


@dataclass(frozen=True)
class PeriodicCoefficient:
    """``(2 pi)^scale * sum_k [cos_k cos(2 pi k s) + sin_k sin(2 pi k s)]``.

    Amplitudes are exact rationals; the power of ``2 pi`` is tracked
    separately so antiderivatives and derivatives stay exact.
    """

    modes: tuple[Mode, ...] = ()
    scale: int = 0

    def __post_init__(self):
        merged: dict[int, list[Fraction]] = {}
        for m in self.modes:
            if not isinstance(m, Mode):
                m = Mode(*m)
            if m.freq < 0:
                raise ValueError("frequencies must be nonnegative")
            acc = merged.setdefault(int(m.freq), [Fraction(0), Fraction(0)])
            acc[0] += _exact(m.cos)
            if m.freq:
                acc[1] += _exact(m.sin)
        modes = tuple(Mode(k, c, s) for k, (c, s) in sorted(merged.items()) if c or s)
        object.__setattr__(self, "modes", modes)

    @classmethod
    def constant(cls, value) -> "PeriodicCoefficient":
        return cls((Mode(0, _exact(value)),))

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        out = np.zeros_like(s)
        for m in self.modes:
            arg = TWO_PI * m.freq * s
            out = out + float(m.cos) * np.cos(arg)
            if m.sin:
                out = out + float(m.sin) * np.sin(arg)
        return out * TWO_PI**self.scale

    @property
    def max_freq(self) -> int:
        return max((m.freq for m in self.modes), default=0)

    def mean(self) -> Fraction:
        """Zero mode (exact when ``scale == 0``)."""
        if self.scale:
            raise ValueError("mean of a scaled coefficient is not rational")
        return next((m.cos for m in self.modes if m.freq == 0), Fraction(0))

    def mean_free(self) -> "PeriodicCoefficient":
        return PeriodicCoefficient(tuple(m for m in self.modes if m.freq), self.scale)

    def __sub__(self, other: "PeriodicCoefficient") -> "PeriodicCoefficient":
        if self.scale != other.scale:
            raise ValueError("cannot subtract coefficients with different 2*pi scales")
        neg = tuple(Mode(m.freq, -m.cos, -m.sin) for m in other.modes)
        return PeriodicCoefficient(self.modes + neg, self.scale)

    def derivative(self) -> "PeriodicCoefficient":
        modes = tuple(Mode(m.freq, m.freq * m.sin, -m.freq * m.cos) for m in self.modes if m.freq)
        return PeriodicCoefficient(modes, self.scale + 1)

    def antiderivative(self) -> "PeriodicCoefficient":
        """The primitive vanishing at 0; requires a mean-free input."""
        if any(m.freq == 0 for m in self.modes):
            raise ValueError("coefficient has a nonzero mean; it has no periodic primitive")
        const = sum((m.sin / m.freq for m in self.modes), Fraction(0))
        modes = [Mode(0, const)]
        modes += [Mode(m.freq, -m.sin / m.freq, m.cos / m.freq) for m in self.modes]
        return PeriodicCoefficient(tuple(modes), self.scale - 1)


# ---------------------------------------------------------------------------
# forms


@dataclass(frozen=True)
class InvariantForm:
    """A ``T^{2n-1}``-invariant 2-form on ``T^{2n}``.

    ``constants[(i, j)]`` (0-based, ``i < j < 2n-1``) are the constant
    entries; ``coeffs[i]`` is the coefficient of ``dx_i ^ dx_{2n}``.
    """

    n: int
    constants: Mapping[tuple[int, int], Fraction]
    coeffs: tuple[PeriodicCoefficient, ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        m = 2 * self.n - 1
        consts = {}
        for (i, j), v in dict(self.constants).items():
            if not 0 <= i < j < m:
                raise ValueError(f"constant index ({i}, {j}) out of range for n = {self.n}")
            v = _exact(v)
            if v:
                consts[(i, j)] = v
        coeffs = tuple(self.coeffs)
        if len(coeffs) != m:
            raise ValueError(f"expected {m} coefficients f_(i,2n), got {len(coeffs)}")
        if any(c.scale for c in coeffs):
            raise ValueError("input coefficients must be unscaled")
        object.__setattr__(self, "constants", dict(sorted(consts.items())))
        object.__setattr__(self, "coeffs", coeffs)

    def __hash__(self):
        return hash((self.n, tuple(self.constants.items()), self.coeffs))

    @property
    def dim(self) -> int:
        return 2 * self.n

    def constant_block(self) -> np.ndarray:
        m = self.dim - 1
        A = np.zeros((m, m))
        for (i, j), v in self.constants.items():
            A[i, j] = float(v)
            A[j, i] = -float(v)
        return A

    def matrix(self, s) -> np.ndarray:
        """``Omega(s)`` with shape ``s.shape + (2n, 2n)``."""
        s = np.asarray(s, dtype=float)
        d = self.dim
        out = np.zeros(s.shape + (d, d))
        out[..., : d - 1, : d - 1] = self.constant_block()
        for i, f in enumerate(self.coeffs):
            v = f(s)
            out[..., i, d - 1] = v
            out[..., d - 1, i] = -v
        return out

    def matrix_at(self, x) -> np.ndarray:
        """``Omega`` at full points ``x`` of shape ``(..., 2n)``."""
        return self.matrix(np.asarray(x, dtype=float)[..., -1])

    def derivative_matrix(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        d = self.dim
        out = np.zeros(s.shape + (d, d))
        for i, f in enumerate(self.coeffs):
            v = f.derivative()(s)
            out[..., i, d - 1] = v
            out[..., d - 1, i] = -v
        return out


def average_coefficients(omega: InvariantForm) -> tuple[Fraction, ...]:
    """``a_{i,2n}``: the zero modes of ``f_{i,2n}`` (exact)."""
    return tuple(f.mean() for f in omega.coeffs)


def averaged_form(omega: InvariantForm) -> InvariantForm:
    return InvariantForm(
        omega.n, omega.constants, tuple(PeriodicCoefficient.constant(a) for a in average_coefficients(omega))
    )


def averaged_matrix(omega: InvariantForm) -> np.ndarray:
    return averaged_form(omega).matrix(0.0)


def primitive_b(omega: InvariantForm) -> tuple[PeriodicCoefficient, ...]:
    """``b_i(s) = int_0^s (f_i - a_i)``, exact on modes."""
    return tuple(f.mean_free().antiderivative() for f in omega.coeffs)


def check_exact_primitive(omega: InvariantForm, b: Sequence[PeriodicCoefficient] | None = None) -> int | None:
    """Index ``i`` where ``b_i' != f_i - a_i`` on modes, or None if all agree.

    This is ``d beta = omega_T - omega`` written in coordinates.
    """
    b = primitive_b(omega) if b is None else tuple(b)
    for i, (bi, f) in enumerate(zip(b, omega.coeffs)):
        lhs = bi.derivative()
        rhs = f - PeriodicCoefficient.constant(f.mean())
        if lhs.modes != rhs.modes or (lhs.modes and lhs.scale != rhs.scale):
            return i
        if sum((m.cos for m in bi.modes), Fraction(0)) != 0:
            return i
    return None


def pfaffian(A: np.ndarray) -> np.ndarray:
    """Pfaffian of (a batch of) antisymmetric matrices by row expansion."""
    A = np.asarray(A, dtype=float)
    m = A.shape[-1]
    if m % 2:
        return np.zeros(A.shape[:-2])
    if m == 0:
        return np.ones(A.shape[:-2])
    if m == 2:
        return A[..., 0, 1]
    total = np.zeros(A.shape[:-2])
    for j in range(1, m):
        keep = [k for k in range(1, m) if k != j]
        minor = A[..., keep, :][..., :, keep]
        sign = 1.0 if j % 2 else -1.0
        total = total + sign * A[..., 0, j] * pfaffian(minor)
    return total


def surface_integral(omega: InvariantForm, i: int, j: int, y: Sequence[float], points: int = 64) -> float:
    """``int_{Sigma_ij(y)} omega`` by the periodic trapezoid rule (0-based ``i < j``)."""
    u = np.arange(points) / points
    U, V = np.meshgrid(u, u, indexing="ij")
    x = np.broadcast_to(np.asarray(y, dtype=float), U.shape + (omega.dim,)).copy()
    x[..., i] = U
    x[..., j] = V
    return float(omega.matrix_at(x)[..., i, j].mean())


def check_pencil_nondegenerate(
    omega: InvariantForm,
    grid_t: int = DEFAULT_GRID_T,
    grid_x: int = DEFAULT_GRID_X,
    atol: float = 1e-12,
) -> float:
    """Minimum of ``|pf((1-t) Omega(s) + t Omega_T)|`` over a ``(t, s)`` grid."""
    s = np.arange(grid_x) / grid_x
    Om = omega.matrix(s)
    pf0 = np.abs(pfaffian(Om))
    if pf0.min() <= atol:
        k = int(pf0.argmin())
        raise DegenerateInput(f"form is degenerate near x_2n = {s[k]:.6g} (|pf| = {pf0[k]:.3g})")
    OmT = averaged_matrix(omega)
    t = np.linspace(0.0, 1.0, grid_t)[:, None, None, None]
    pencil = np.abs(pfaffian((1.0 - t) * Om[None] + t * OmT))
    low = float(pencil.min())
    if low <= atol:
        raise PencilDegenerate(f"interpolated form degenerates (min |pf| = {low:.3g})")
    return low


# ---------------------------------------------------------------------------
# the flow


def _beta(b: Sequence[PeriodicCoefficient], s: np.ndarray, dim: int) -> np.ndarray:
    out = np.zeros(s.shape + (dim,))
    for i, bi in enumerate(b):
        out[..., i] = bi(s)
    return out


class MoserField:
    """``Z_t`` and its ``x_{2n}``-derivative, evaluated on batches of points."""

    def __init__(self, omega: InvariantForm):
        self.omega = omega
        self.b = primitive_b(omega)
        self.b_prime = tuple(f.mean_free() for f in omega.coeffs)
        self.OmT = averaged_matrix(omega)

    def _system(self, t: float, s: np.ndarray) -> np.ndarray:
        return (1.0 - t) * self.omega.matrix(s) + t * self.OmT

    def __call__(self, t: float, x: np.ndarray) -> np.ndarray:
        s = np.asarray(x)[..., -1]
        beta = _beta(self.b, s, self.omega.dim)
        return np.linalg.solve(self._system(t, s), beta[..., None])[..., 0]

    def with_derivative(self, t: float, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        s = np.asarray(x)[..., -1]
        d = self.omega.dim
        A = self._system(t, s)
        beta = _beta(self.b, s, d)
        Z = np.linalg.solve(A, beta[..., None])[..., 0]
        rhs = _beta(self.b_prime, s, d) - (1.0 - t) * np.einsum("...ij,...j->...i", self.omega.derivative_matrix(s), Z)
        dZ = np.linalg.solve(A, rhs[..., None])[..., 0]
        return Z, dZ


def _rk4_flow(field_: MoserField, x0: np.ndarray, steps: int) -> tuple[np.ndarray, np.ndarray]:
    """Integrate ``x' = Z_t(x)`` with the variational equation ``J' = DZ J``."""
    d = x0.shape[-1]
    x = x0.astype(float).copy()
    J = np.broadcast_to(np.eye(d), x.shape[:-1] + (d, d)).copy()
    h = 1.0 / steps

    def rhs(t, x, J):
        Z, dZ = field_.with_derivative(t, x)
        # DZ has a single nonzero column (the x_2n direction)
        return Z, dZ[..., :, None] * J[..., None, -1, :]

    for k in range(steps):
        t = k * h
        k1x, k1J = rhs(t, x, J)
        k2x, k2J = rhs(t + h / 2, x + h / 2 * k1x, J + h / 2 * k1J)
        k3x, k3J = rhs(t + h / 2, x + h / 2 * k2x, J + h / 2 * k2J)
        k4x, k4J = rhs(t + h, x + h * k3x, J + h * k3J)
        x = x + h / 6 * (k1x + 2 * k2x + 2 * k3x + k4x)
        J = J + h / 6 * (k1J + 2 * k2J + 2 * k3J + k4J)
        if not (np.isfinite(x).all() and np.isfinite(J).all()):
            raise FlowFailure(f"non-finite state at step {k}")
    return x, J


def pullback_error(omega: InvariantForm, x0: np.ndarray, J: np.ndarray) -> float:
    """``max_x || DPsi^T Omega_T DPsi - Omega(x) ||_F``."""
    OmT = averaged_matrix(omega)
    pulled = np.einsum("...ki,kl,...lj->...ij", J, OmT, J)
    return float(np.linalg.norm(pulled - omega.matrix_at(x0), axis=(-2, -1)).max())


def equivariance_error(omega: InvariantForm, x0: np.ndarray, times: Sequence[float] = (0.0, 0.25, 0.5, 0.75, 1.0), seed: int = 0) -> float:
    """Largest change of ``Z_t`` under translations of the acting coordinates."""
    field_ = MoserField(omega)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for t in times:
        shift = np.zeros_like(x0)
        shift[..., :-1] = rng.random(x0[..., :-1].shape)
        worst = max(worst, float(np.abs(field_(t, x0) - field_(t, x0 + shift)).max()))
    return worst


def sample_points(omega: InvariantForm, samples: int) -> np.ndarray:
    x0 = np.zeros((samples, omega.dim))
    x0[:, -1] = np.arange(samples) / samples
    return x0


def flow_differential(omega: InvariantForm, steps: int = DEFAULT_STEPS, samples: int = DEFAULT_SAMPLES):
    x0 = sample_points(omega, samples)
    x1, J = _rk4_flow(MoserField(omega), x0, steps)
    return x0, x1, J


@dataclass
class MoserReport:
    n: int
    averaged: tuple[Fraction, ...]
    b: tuple[PeriodicCoefficient, ...]
    exact_primitive: bool
    min_pencil_pfaffian: float
    flow_pullback_error: float
    equivariance_error: float
    steps: int
    samples: int
    grid_t: int
    grid_x: int
    tolerance: float = DEFAULT_TOL
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


def integrate_moser_flow(
    omega: InvariantForm,
    steps: int = DEFAULT_STEPS,
    samples: int = DEFAULT_SAMPLES,
    grid_t: int = DEFAULT_GRID_T,
    grid_x: int = DEFAULT_GRID_X,
    tol: float = DEFAULT_TOL,
) -> MoserReport:
    """Average, build beta, check the pencil, flow and measure ``Psi_1^* omega_T - omega``."""
    min_pf = check_pencil_nondegenerate(omega, grid_t, grid_x)
    bad = check_exact_primitive(omega)
    x0, _, J = flow_differential(omega, steps, samples)
    report = MoserReport(
        n=omega.n,
        averaged=average_coefficients(omega),
        b=primitive_b(omega),
        exact_primitive=bad is None,
        min_pencil_pfaffian=min_pf,
        flow_pullback_error=pullback_error(omega, x0, J),
        equivariance_error=equivariance_error(omega, x0),
        steps=steps,
        samples=samples,
        grid_t=grid_t,
        grid_x=grid_x,
        tolerance=tol,
    )
    if bad is not None:
        report.failures.append(f"b_{bad + 1} is not a primitive of f_{bad + 1} - a_{bad + 1}")
    if not report.flow_pullback_error < tol:
        report.failures.append(f"pullback error {report.flow_pullback_error:.3e} >= {tol:.1e}")
    if not report.equivariance_error < 1e-13:
        report.failures.append(f"equivariance error {report.equivariance_error:.3e}")
    return report


@dataclass(frozen=True)
class BundleChart:
    """Trivialized ``T^{2n-1}`` bundle over the circle: the torus moves ``x_1..x_{2n-1}``."""

    dim_T: int
    dim_M: int
    acting_coordinates: tuple[int, ...]
    base_coordinate: int
    acting_sublattice: SaturatedSublattice


def trivialize_bundle_coordinates(dim_T: int, dim_M: int) -> BundleChart:
    if dim_M % 2 or dim_M <= 0:
        raise ValueError(f"dim_M = {dim_M} must be even and positive")
    if dim_T != dim_M - 1:
        raise ValueError(f"a T^{dim_T} action on a {dim_M}-manifold is not of codimension one")
    return BundleChart(
        dim_T=dim_T,
        dim_M=dim_M,
        acting_coordinates=tuple(range(dim_T)),
        base_coordinate=dim_M - 1,
        acting_sublattice=SaturatedSublattice(dim_M, identity(dim_M)[:dim_T]),
    )
