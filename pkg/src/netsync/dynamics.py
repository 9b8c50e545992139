"""The isolated oscillator: the Lorenz vector field, its quadratic
Lyapunov function and absorbing ellipsoid, and the Jacobian supremum that
feeds every critical-coupling estimate.

Vector fields evaluate on trailing-axis state arrays, so ``f`` maps shape
(..., dim) to (..., dim) and ``jacobian`` maps (..., dim) to
(..., dim, dim).  That keeps network right-hand sides fully vectorized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import InvalidParamsError, NotPositiveDefiniteError
from .matcore import SpectralDecomp, as_matrix, inf_norm, jacobi_eig

BETA_GRID_POINTS = 41


@dataclass(frozen=True)
class LorenzParams:
    sigma: float = 10.0
    r: float = 28.0
    b: float = 8.0 / 3.0

    def __post_init__(self):
        if self.sigma <= 0.0 or self.r <= 0.0:
            raise InvalidParamsError("sigma and r must be positive")
        if self.b <= 1.0:
            raise InvalidParamsError("b must exceed 1 for a bounded absorbing set")


CLASSIC = LorenzParams()


@dataclass(frozen=True)
class VectorField:
    dim: int
    f: Callable[[np.ndarray], np.ndarray]
    jacobian: Callable[[np.ndarray], np.ndarray]


def lorenz_field(params: LorenzParams = CLASSIC) -> VectorField:
    sigma, r, b = params.sigma, params.r, params.b

    def f(state):
        state = np.asarray(state, dtype=float)
        x = state[..., 0]
        y = state[..., 1]
        z = state[..., 2]
        return np.stack([sigma * (y - x), x * (r - z) - y, -b * z + x * y], axis=-1)

    def jacobian(state):
        state = np.asarray(state, dtype=float)
        x = state[..., 0]
        y = state[..., 1]
        z = state[..., 2]
        jac = np.zeros(state.shape[:-1] + (3, 3))
        jac[..., 0, 0] = -sigma
        jac[..., 0, 1] = sigma
        jac[..., 1, 0] = r - z
        jac[..., 1, 1] = -1.0
        jac[..., 1, 2] = -x
        jac[..., 2, 0] = y
        jac[..., 2, 1] = x
        jac[..., 2, 2] = -b
        return jac

    return VectorField(dim=3, f=f, jacobian=jacobian)


def zero_field(dim: int) -> VectorField:
    """Trivial dynamics; handy for exercising pure coupling behavior."""

    def f(state):
        return np.zeros_like(np.asarray(state, dtype=float))

    def jacobian(state):
        state = np.asarray(state, dtype=float)
        return np.zeros(state.shape[:-1] + (dim, dim))

    return VectorField(dim=dim, f=f, jacobian=jacobian)


@dataclass(frozen=True)
class AbsorbingSet:
    """Ellipsoid {x : V(x) <= level} for V = 0.5 <x - center, Q (x - center)>
    with diagonal positive Q."""

    center: np.ndarray
    q_diag: np.ndarray
    level: float

    def __post_init__(self):
        if np.any(self.q_diag <= 0.0) or self.level <= 0.0:
            raise InvalidParamsError("absorbing set needs positive Q diagonal and level")
        self.center.setflags(write=False)
        self.q_diag.setflags(write=False)

    def value(self, state) -> np.ndarray:
        d = np.asarray(state, dtype=float) - self.center
        return 0.5 * np.sum(self.q_diag * d * d, axis=-1)

    def gradient(self, state) -> np.ndarray:
        return self.q_diag * (np.asarray(state, dtype=float) - self.center)

    def contains(self, state) -> np.ndarray:
        return self.value(state) <= self.level

    def half_widths(self) -> np.ndarray:
        """Per-axis half widths of the bounding box of the ellipsoid."""
        return np.sqrt(2.0 * self.level / self.q_diag)


def lorenz_absorbing_set(params: LorenzParams = CLASSIC) -> AbsorbingSet:
    """Absorbing ellipsoid for the Lorenz flow, centered at (0, 0, 2r) with
    Q = diag(r, sigma, sigma).

    The level is the smallest one that works: the time derivative of V is
    -sigma * (r x^2 + y^2 + b (z - r)^2 - b r^2), which is negative outside
    the inner ellipsoid E1 = {r x^2 + y^2 + b (z - r)^2 <= b r^2}, and the
    maximum of 2V on E1 is sigma * b^2 r^2 / (b - 1) (attained where the
    two ellipsoids touch), so this level makes E1 a subset of the set and
    V a strict Lyapunov function everywhere outside it.
    """
    sigma, r, b = params.sigma, params.r, params.b
    level = sigma * b * b * r * r / (2.0 * (b - 1.0))
    return AbsorbingSet(
        center=np.array([0.0, 0.0, 2.0 * r]),
        q_diag=np.array([r, sigma, sigma]),
        level=level,
    )


class StateBounds(NamedTuple):
    x_max: float
    y_max: float
    z_dev: float


def state_bounds(params: LorenzParams = CLASSIC) -> StateBounds:
    """Coordinate box |x| <= b sqrt(r)/sqrt(b-1), |y| <= r b/sqrt(sigma(b-1)),
    |z - 2r| <= r b/sqrt(sigma(b-1)) over which the coupling thresholds
    take their suprema."""
    sigma, r, b = params.sigma, params.r, params.b
    root = math.sqrt(b - 1.0)
    return StateBounds(
        x_max=b * math.sqrt(r) / root,
        y_max=r * b / (math.sqrt(sigma) * root),
        z_dev=r * b / (math.sqrt(sigma) * root),
    )


@dataclass(frozen=True)
class CouplingMatrix:
    """Symmetric positive-definite coupling matrix with its spectral
    decomposition (mu_1 = smallest eigenvalue, P = eigenvector columns)."""

    h: np.ndarray
    decomp: SpectralDecomp

    @property
    def dim(self) -> int:
        return self.h.shape[0]

    @property
    def mu1(self) -> float:
        return float(self.decomp.eigenvalues[0])

    def is_identity(self) -> bool:
        return bool(np.array_equal(self.h, np.eye(self.dim)))


def coupling_matrix(h) -> CouplingMatrix:
    h = as_matrix(h)
    decomp = jacobi_eig(h)
    if decomp.eigenvalues[0] <= 0.0:
        raise NotPositiveDefiniteError(
            f"coupling matrix must be positive-definite, smallest eigenvalue {decomp.eigenvalues[0]}"
        )
    return CouplingMatrix(h=h, decomp=decomp)


def identity_coupling(dim: int) -> CouplingMatrix:
    return coupling_matrix(np.eye(dim))


def beta_closed_form(params: LorenzParams = CLASSIC) -> float:
    """Supremum of the infinity norm of the Lorenz Jacobian over the
    state-bounds box: the exact maximum of the three row-sum branches
    max(2 sigma, |y|max + r + 1 + |x|max-ish, ...)."""
    sigma, r, b = params.sigma, params.r, params.b
    bx = state_bounds(params)
    return max(
        2.0 * sigma,
        bx.y_max + r + 1.0 + bx.x_max,
        bx.x_max + bx.y_max + b,
    )


def beta_inf_sampled(params: LorenzParams, h: CouplingMatrix, grid_points: int = BETA_GRID_POINTS) -> float:
    """Sampled supremum of ||P^T Df(x) P||_inf over a uniform grid of the
    state-bounds box."""
    if h.dim != 3:
        raise InvalidParamsError("sampled beta is defined for 3-D Lorenz dynamics")
    bx = state_bounds(params)
    xs = np.linspace(-bx.x_max, bx.x_max, grid_points)
    ys = np.linspace(-bx.y_max, bx.y_max, grid_points)
    zs = np.linspace(2.0 * params.r - bx.z_dev, 2.0 * params.r + bx.z_dev, grid_points)
    gx, gy, gz = np.meshgrid(xs, ys, zs, indexing="ij")
    pts = np.stack([gx.ravel(), gy.ravel(), gz.ravel()], axis=-1)
    jac = lorenz_field(params).jacobian(pts)
    p = h.decomp.eigenvectors
    transformed = np.einsum("ij,njk,kl->nil", p.T, jac, p)
    return float(np.abs(transformed).sum(axis=2).max())


def beta_inf(params: LorenzParams = CLASSIC, h: CouplingMatrix | None = None,
             grid_points: int = BETA_GRID_POINTS) -> float:
    """Jacobian supremum beta for the Lorenz oscillator under coupling
    matrix h: the closed form when h is the identity, otherwise the
    grid-sampled supremum of ||P^T Df P||_inf."""
    if h is None or h.is_identity():
        return beta_closed_form(params)
    return beta_inf_sampled(params, h, grid_points)


def lyapunov_decrease_check(params: LorenzParams, samples: int, seed: int) -> float:
    """Sample the box twice the absorbing ellipsoid's bounding box, drop
    points inside the ellipsoid, and return the fraction of remaining
    points where <grad V, f> fails to be negative (expected 0)."""
    if samples < 1:
        raise InvalidParamsError("samples must be >= 1")
    aset = lorenz_absorbing_set(params)
    field = lorenz_field(params)
    rng = np.random.default_rng(seed)
    half = 2.0 * aset.half_widths()
    pts = aset.center + rng.uniform(-1.0, 1.0, size=(samples, 3)) * half
    outside = ~aset.contains(pts)
    if not outside.any():
        return 0.0
    pts = pts[outside]
    vdot = np.sum(aset.gradient(pts) * field.f(pts), axis=-1)
    return float(np.count_nonzero(vdot >= 0.0)) / pts.shape[0]


def jacobian_inf_norm(params: LorenzParams, state) -> float:
    """Infinity norm of the Lorenz Jacobian at one state."""
    return inf_norm(lorenz_field(params).jacobian(np.asarray(state, dtype=float)))
