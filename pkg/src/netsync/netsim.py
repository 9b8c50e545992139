"""Coupled network assembly and integration: the stacked right-hand side
dx_i/dt = f(x_i) - alpha * sum_j L_ij H x_j plus optional linear edge
perturbations, fixed-step RK4, and the normal/transversal mode split.

The coupling is accumulated edgewise from state differences
H (x_j - x_i), never by materializing L kron H.  On the synchronization
manifold every difference is exactly zero, so the coupling contribution
cancels bitwise, not merely to rounding level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .dynamics import CouplingMatrix, VectorField
from .errors import (
    DimensionMismatchError,
    DivergedError,
    InvalidParamsError,
)
from .graphs import Graph, is_connected, sorted_edges

DIVERGENCE_LIMIT = 1e8

DEFAULT_DT = 1e-3


@dataclass(frozen=True)
class Perturbation:
    """Linear perturbation acting on the coupling along edge (i, j): the
    vertex-i equation gains base @ (x_j - x_i), times cos(omega t) when
    omega is set."""

    i: int
    j: int
    base: np.ndarray
    omega: float | None = None

    def __post_init__(self):
        base = np.asarray(self.base, dtype=float)
        if base.ndim != 2 or base.shape[0] != base.shape[1]:
            raise InvalidParamsError("perturbation matrix must be square")
        if self.omega is not None and self.omega < 0.0:
            raise InvalidParamsError("omega must be nonnegative")
        object.__setattr__(self, "base", base)
        base.setflags(write=False)

    def value(self, t: float) -> np.ndarray:
        if self.omega is None:
            return self.base
        return self.base * math.cos(self.omega * t)

    def sup_inf_norm(self) -> float:
        """sup over t of the induced infinity norm (cosine modulation
        peaks at the base norm)."""
        return float(np.abs(self.base).sum(axis=1).max())


@dataclass(frozen=True)
class NetworkSystem:
    graph: Graph
    field: VectorField
    h: CouplingMatrix
    alpha: float
    perturbations: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.alpha < 0.0:
            raise InvalidParamsError("alpha must be nonnegative")
        if self.h.dim != self.field.dim:
            raise DimensionMismatchError(
                f"coupling dim {self.h.dim} != field dim {self.field.dim}"
            )
        if not is_connected(self.graph):
            raise InvalidParamsError("network graph must be connected")
        object.__setattr__(self, "perturbations", tuple(self.perturbations))
        for p in self.perturbations:
            if p.base.shape != (self.field.dim, self.field.dim):
                raise DimensionMismatchError(
                    f"perturbation on ({p.i},{p.j}) has shape {p.base.shape}, "
                    f"expected {(self.field.dim, self.field.dim)}"
                )
            u, v = min(p.i, p.j), max(p.i, p.j)
            if (u, v) not in self.graph.edges:
                raise InvalidParamsError(
                    f"perturbation on ({p.i},{p.j}) is not an edge of the graph"
                )

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def dim(self) -> int:
        return self.field.dim

    @cached_property
    def _edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(us, vs, incidence): edge endpoint indices in sorted edge order
        and the signed vertex-by-edge incidence matrix."""
        edges = sorted_edges(self.graph)
        us = np.array([u for u, _ in edges], dtype=int)
        vs = np.array([v for _, v in edges], dtype=int)
        inc = np.zeros((self.graph.n, len(edges)))
        for e, (u, v) in enumerate(edges):
            inc[u, e] = 1.0
            inc[v, e] = -1.0
        return us, vs, inc


def _rhs_function(sys: NetworkSystem):
    n, m = sys.n, sys.dim
    f = sys.field.f
    h_t = sys.h.h.T
    us, vs, inc = sys._edge_arrays
    alpha_inc = sys.alpha * inc
    have_edges = us.size > 0
    perts = [(p.i, p.j, p.base, p.omega) for p in sys.perturbations]

    def rhs(t: float, x: np.ndarray) -> np.ndarray:
        xm = x.reshape(n, m)
        dx = f(xm)
        if have_edges:
            diffs = xm[vs] - xm[us]
            dx = dx + alpha_inc @ (diffs @ h_t)
        for i, j, base, omega in perts:
            term = base @ (xm[j] - xm[i])
            if omega is not None:
                term = term * math.cos(omega * t)
            dx[i] = dx[i] + term
        return dx.reshape(-1)

    return rhs


def rhs(sys: NetworkSystem, t: float, x) -> np.ndarray:
    """Stacked derivative at time t for stacked state x of length n*dim."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != sys.n * sys.dim:
        raise DimensionMismatchError(f"state length {x.size} != n*m = {sys.n * sys.dim}")
    return _rhs_function(sys)(t, x)


@dataclass(frozen=True)
class Trajectory:
    """States on the uniform saved grid t_k = t0 + k*dt (dt here is the
    saved spacing, i.e. integration step times save stride)."""

    t0: float
    dt: float
    states: np.ndarray
    n_vertices: int
    dim: int

    def __post_init__(self):
        self.states.setflags(write=False)

    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.states.shape[0])

    def blocks(self) -> np.ndarray:
        """View of shape (steps, n_vertices, dim)."""
        return self.states.reshape(self.states.shape[0], self.n_vertices, self.dim)

    def vertex(self, i: int) -> np.ndarray:
        return self.blocks()[:, i, :]


def rk4_integrate(sys: NetworkSystem, x0, dt: float, steps: int, *,
                  t0: float = 0.0, save_stride: int = 1) -> Trajectory:
    """Classical fixed-step RK4.  Aborts with DivergedError once any state
    component passes 1e8 in magnitude (or goes non-finite)."""
    if dt <= 0.0:
        raise InvalidParamsError("dt must be positive")
    if steps < 1:
        raise InvalidParamsError("steps must be >= 1")
    if save_stride < 1:
        raise InvalidParamsError("save_stride must be >= 1")
    x = np.asarray(x0, dtype=float).reshape(-1).copy()
    if x.size != sys.n * sys.dim:
        raise DimensionMismatchError(f"state length {x.size} != n*m = {sys.n * sys.dim}")

    deriv = _rhs_function(sys)
    half = 0.5 * dt
    sixth = dt / 6.0
    out = np.empty((steps // save_stride + 1, x.size))
    out[0] = x
    saved = 1
    for k in range(1, steps + 1):
        t = t0 + (k - 1) * dt
        k1 = deriv(t, x)
        k2 = deriv(t + half, x + half * k1)
        k3 = deriv(t + half, x + half * k2)
        k4 = deriv(t + dt, x + dt * k3)
        x = x + sixth * (k1 + 2.0 * (k2 + k3) + k4)
        peak = float(np.abs(x).max())
        if not peak <= DIVERGENCE_LIMIT:
            raise DivergedError(f"state magnitude {peak!r} at t={t0 + k * dt:g}")
        if k % save_stride == 0:
            out[saved] = x
            saved += 1
    return Trajectory(t0=t0, dt=dt * save_stride, states=out[:saved],
                      n_vertices=sys.n, dim=sys.dim)


def project_modes(g: Graph, x) -> tuple[np.ndarray, np.ndarray]:
    """Split a stacked state into its normal part (vertex average
    replicated to every vertex) and the transversal remainder.

    The average is anchored at the first vertex block, so identical
    blocks give a transversal of exactly zero for any vertex count, not
    merely zero to rounding."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size % g.n != 0:
        raise DimensionMismatchError(f"state length {x.size} not divisible by n={g.n}")
    m = x.size // g.n
    xm = x.reshape(g.n, m)
    mean = xm[0] + (xm - xm[0]).sum(axis=0) / g.n
    normal = np.tile(mean, g.n)
    return normal, x - normal


def variational_two(field: VectorField, h: CouplingMatrix, alpha: float, x2, z) -> np.ndarray:
    """Derivative (Df(x2) - 2 alpha H) z of the two-oscillator difference
    linearization."""
    x2 = np.asarray(x2, dtype=float)
    z = np.asarray(z, dtype=float)
    if x2.shape != (field.dim,) or z.shape != (field.dim,):
        raise DimensionMismatchError("x2 and z must be states of the field dimension")
    return field.jacobian(x2) @ z - 2.0 * alpha * (h.h @ z)


def mode_rhs(field: VectorField, h: CouplingMatrix, alpha: float, lambda_j: float,
             s, y) -> np.ndarray:
    """Derivative (P^T Df(s) P - alpha lambda_j D) y of one transversal
    mode coefficient, where H = P D P^T."""
    if lambda_j < 0.0:
        raise InvalidParamsError("lambda_j must be nonnegative")
    s = np.asarray(s, dtype=float)
    y = np.asarray(y, dtype=float)
    if s.shape != (field.dim,) or y.shape != (field.dim,):
        raise DimensionMismatchError("s and y must be states of the field dimension")
    p = h.decomp.eigenvectors
    mu = h.decomp.eigenvalues
    a = p.T @ field.jacobian(s) @ p
    return a @ y - alpha * lambda_j * (mu * y)


def write_trajectory_csv(traj: Trajectory, path) -> None:
    """CSV with header t,v0_x0,...,v{n-1}_x{m-1}, one row per saved step."""
    cols = [f"v{i}_x{k}" for i in range(traj.n_vertices) for k in range(traj.dim)]
    lines = ["t," + ",".join(cols)]
    times = traj.times()
    for t, row in zip(times, traj.states):
        lines.append(f"{t:.10g}," + ",".join(f"{v:.17g}" for v in row))
    Path(path).write_text("\n".join(lines) + "\n")
