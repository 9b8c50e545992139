"""Critical-coupling and persistence machinery: the general threshold
beta / (lambda2 * mu1), the three two-oscillator certificates (diagonal
dominance, symmetric-part eigenvalues, principal minors), perturbation
magnitude bounds, and an empirical contraction-rate fit.

The symmetric-part and principal-minor certificates both characterize
negative definiteness of sym(Df - 2 alpha I), so their thresholds agree
up to grid and bisection resolution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .dynamics import (
    CouplingMatrix,
    LorenzParams,
    beta_inf,
    state_bounds,
)
from .errors import (
    DisconnectedError,
    DivergedError,
    InvalidParamsError,
    NoConvergenceError,
    NoRealRootError,
    SubcriticalAlphaError,
)
from .graphs import Graph, is_connected, laplacian, spectrum
from .matcore import inf_norm, jacobi_eig
from .netsim import NetworkSystem

SWEEP_GRID = 101
BISECTION_TOL = 0.01


@dataclass(frozen=True)
class CouplingReport:
    """Synchronization threshold report: alpha_critical = beta/(lambda2*mu1)
    and the contraction margin eta(alpha) = alpha*lambda2*mu1 - beta."""

    beta: float
    lambda2: float
    mu1: float
    alpha_critical: float

    def eta(self, alpha: float) -> float:
        return alpha * self.lambda2 * self.mu1 - self.beta

    def eta_per_mode(self, alpha: float) -> float:
        """Margin with lambda2*mu1 divided out: alpha - alpha_critical."""
        return alpha - self.alpha_critical

    def to_json_dict(self) -> dict:
        return {
            "beta": self.beta,
            "lambda2": self.lambda2,
            "mu1": self.mu1,
            "alpha_c": self.alpha_critical,
        }


@dataclass(frozen=True)
class PersistenceReport:
    eta: float
    l_inf_norm: float
    bound: float
    measured_perturbation: float
    persistent: bool

    def to_json_dict(self) -> dict:
        return {
            "eta": self.eta,
            "laplacian_inf_norm": self.l_inf_norm,
            "bound": self.bound,
            "measured": self.measured_perturbation,
            "persistent": self.persistent,
        }


def alpha_c_general(g: Graph, params: LorenzParams, h: CouplingMatrix,
                    grid_points: int | None = None) -> CouplingReport:
    """Threshold for a Lorenz network on graph g with coupling matrix h."""
    if not is_connected(g):
        raise DisconnectedError("critical coupling needs a connected graph (lambda2 > 0)")
    lam2 = float(spectrum(g).eigenvalues[1])
    beta = beta_inf(params, h) if grid_points is None else beta_inf(params, h, grid_points)
    mu1 = h.mu1
    return CouplingReport(beta=beta, lambda2=lam2, mu1=mu1,
                          alpha_critical=beta / (lam2 * mu1))


def alpha_c_two_dd(params: LorenzParams) -> float:
    """Two-oscillator, identity-coupling threshold beta/2 from the
    diagonal-dominance certificate."""
    return beta_inf(params) / 2.0


def _sym_part_lambda_max(params: LorenzParams, y: float, z: float) -> float:
    """Largest eigenvalue of the symmetric part of the Lorenz Jacobian;
    the x entries cancel under symmetrization so only (y, z) enter."""
    sigma, r, b = params.sigma, params.r, params.b
    w = (r + sigma - z) / 2.0
    a = np.array([
        [-sigma, w, y / 2.0],
        [w, -1.0, 0.0],
        [y / 2.0, 0.0, -b],
    ])
    return float(jacobi_eig(a).eigenvalues[-1])


def _yz_grid(params: LorenzParams, grid: int) -> tuple[np.ndarray, np.ndarray]:
    bx = state_bounds(params)
    ys = np.linspace(-bx.y_max, bx.y_max, grid)
    zs = np.linspace(2.0 * params.r - bx.z_dev, 2.0 * params.r + bx.z_dev, grid)
    return ys, zs


def sym_part_certificate(params: LorenzParams, alpha: float, grid: int = SWEEP_GRID) -> bool:
    """True when sym(Df - 2 alpha I) has all eigenvalues negative at every
    point of the (y, z) grid."""
    ys, zs = _yz_grid(params, grid)
    for y in ys:
        for z in zs:
            # eigenvalues of sym(Df) - 2 alpha I are those of sym(Df) shifted
            if _sym_part_lambda_max(params, y, z) - 2.0 * alpha >= 0.0:
                return False
    return True


def alpha_c_two_sym(params: LorenzParams, grid: int = SWEEP_GRID,
                    tol: float = BISECTION_TOL) -> float:
    """Smallest alpha (to ``tol``, by bisection) certifying that
    sym(Df - 2 alpha I) is negative definite over the (y, z) grid."""
    if grid < 50:
        raise InvalidParamsError("certificate grid needs at least 50 points per axis")
    ys, zs = _yz_grid(params, grid)
    lam_max = max(_sym_part_lambda_max(params, y, z) for y in ys for z in zs)

    def certified(alpha: float) -> bool:
        return lam_max - 2.0 * alpha < 0.0

    lo, hi = 0.0, 1.0
    expansions = 0
    while not certified(hi):
        lo, hi = hi, 2.0 * hi
        expansions += 1
        if expansions > 60:
            raise NoConvergenceError("no certified alpha found while expanding the bracket")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if certified(mid):
            hi = mid
        else:
            lo = mid
    return hi


class MinorsReport(NamedTuple):
    p2_root: float
    p3_root: float
    alpha_c: float


def _p3_coefficients(params: LorenzParams, y: float, z: float) -> list[float]:
    """Cubic det of sym(Df - 2 alpha I) in alpha, highest degree first."""
    sigma, b = params.sigma, params.b
    w2 = (params.r + sigma - z) ** 2
    return [
        -8.0,
        -4.0 * b - 4.0 * (sigma + 1.0),
        -2.0 * sigma - 2.0 * b * (sigma + 1.0) + w2 / 2.0 + y * y / 2.0,
        -sigma * b + (b / 4.0) * w2 + y * y / 4.0,
    ]


def _max_positive_real_root(coeffs) -> float | None:
    roots = np.roots(coeffs)
    scale = max(1.0, max(abs(c) for c in coeffs))
    real = roots.real[np.abs(roots.imag) <= 1e-9 * scale]
    positive = real[real > 0.0]
    if positive.size == 0:
        return None
    return float(positive.max())


def p2_root_closed_form(params: LorenzParams) -> float:
    """Largest root of the order-2 leading minor of sym(Df - 2 alpha I),
    evaluated at the z extreme 2r + z_dev where it peaks."""
    sigma, r = params.sigma, params.r
    z = 2.0 * params.r + state_bounds(params).z_dev
    w2 = (r + sigma - z) ** 2
    disc = (sigma + 1.0) ** 2 - 4.0 * sigma + w2
    if disc < 0.0:
        raise NoRealRootError("order-2 minor has no real root")
    return (-2.0 * (sigma + 1.0) + 2.0 * math.sqrt(disc)) / 8.0


def alpha_c_two_minors(params: LorenzParams, grid: int = SWEEP_GRID) -> MinorsReport:
    """Threshold from the principal-minor signs of sym(Df - 2 alpha I):
    p1 < 0 is vacuous for alpha >= 0, p2 > 0 gives a closed-form root, and
    p3 < 0 gives the largest positive real root of a cubic, maximized at
    the (y, z) corner and verified by a grid sweep."""
    p2 = p2_root_closed_form(params)
    bx = state_bounds(params)
    corner_y = -bx.y_max
    corner_z = 2.0 * params.r + bx.z_dev
    p3_corner = _max_positive_real_root(_p3_coefficients(params, corner_y, corner_z))
    if p3_corner is None:
        raise NoRealRootError("order-3 minor cubic has no positive real root")
    ys, zs = _yz_grid(params, grid)
    p3 = p3_corner
    for y in ys:
        for z in zs:
            root = _max_positive_real_root(_p3_coefficients(params, y, z))
            if root is not None and root > p3:
                p3 = root
    return MinorsReport(p2_root=p2, p3_root=p3, alpha_c=max(p2, p3, 0.0))


def persistence_bound(report: CouplingReport, alpha: float, g: Graph,
                      perturbations, *, per_mode: bool = True) -> PersistenceReport:
    """Check sup_t sum of edge-perturbation infinity norms against
    eta / (2 ||L||_inf).

    With ``per_mode`` (default) eta is alpha - alpha_critical, the margin
    of a single transversal mode; otherwise the full
    alpha*lambda2*mu1 - beta is used.
    """
    eta = report.eta_per_mode(alpha) if per_mode else report.eta(alpha)
    if eta <= 0.0:
        raise SubcriticalAlphaError(
            f"alpha={alpha} is not above the critical coupling {report.alpha_critical}"
        )
    l_norm = inf_norm(laplacian(g))
    measured = float(sum(p.sup_inf_norm() for p in perturbations))
    bound = eta / (2.0 * l_norm)
    return PersistenceReport(
        eta=eta,
        l_inf_norm=l_norm,
        bound=bound,
        measured_perturbation=measured,
        persistent=measured < bound,
    )


def coppel_margin(eta: float, k: float, delta0: float) -> float:
    """Contraction margin gamma = eta - delta0 * k surviving a bounded
    perturbation of size delta0."""
    if eta <= 0.0:
        raise InvalidParamsError("eta must be positive")
    if k < 1.0 or delta0 < 0.0:
        raise InvalidParamsError("need k >= 1 and delta0 >= 0")
    return eta - delta0 * k


def integral_perturbation_margin(eta: float, k: float, m_bound: float,
                                 delta: float, h: float) -> float:
    """Decay-rate budget eta + 3*M*k*delta + ln(1+delta)*k/h for
    integrally small perturbations (eta < 0 is the unperturbed rate;
    a negative result means stability survives)."""
    if eta >= 0.0:
        raise InvalidParamsError("eta is a decay rate and must be negative")
    if k < 1.0 or m_bound <= 0.0 or delta < 0.0 or h <= 0.0:
        raise InvalidParamsError("need k >= 1, M > 0, delta >= 0, h > 0")
    return eta + 3.0 * m_bound * k * delta + math.log1p(delta) * k / h


def contraction_rate_estimate(sys: NetworkSystem, s0, tmax: float, dt: float,
                              *, sample_stride: int = 100) -> float:
    """Empirical contraction rate of the slowest transversal mode.

    Integrates the mode coefficients for lambda2 along a reference
    single-oscillator trajectory from the full set of unit initial
    vectors (so the evolved matrix is the evolution operator itself) and
    returns the least-squares slope of log of its infinity norm.  The
    matrix is renormalized whenever its norm leaves [1e-6, 1e6], so both
    contracting and expanding regimes stay finite.  A negative slope is
    only guaranteed above the critical coupling; below it the slope is
    reported as measured.
    """
    if dt <= 0.0 or tmax <= dt:
        raise InvalidParamsError("need 0 < dt < tmax")
    lam2 = float(spectrum(sys.graph).eigenvalues[1])
    p = sys.h.decomp.eigenvectors
    mu = sys.h.decomp.eigenvalues
    f = sys.field.f
    jac = sys.field.jacobian
    alpha = sys.alpha
    m = sys.field.dim

    def mode_matrix_rhs(s: np.ndarray, y: np.ndarray) -> np.ndarray:
        a = p.T @ jac(s) @ p
        return a @ y - alpha * lam2 * (mu[:, None] * y)

    s = np.asarray(s0, dtype=float).reshape(-1)
    if s.size != m:
        raise InvalidParamsError("s0 must be a single-oscillator state")
    y = np.eye(m)
    log_offset = 0.0
    steps = int(round(tmax / dt))
    times = [0.0]
    lognorms = [0.0]
    half = 0.5 * dt
    sixth = dt / 6.0
    for k in range(1, steps + 1):
        ks1, ky1 = f(s), mode_matrix_rhs(s, y)
        ks2, ky2 = f(s + half * ks1), mode_matrix_rhs(s + half * ks1, y + half * ky1)
        ks3, ky3 = f(s + half * ks2), mode_matrix_rhs(s + half * ks2, y + half * ky2)
        ks4, ky4 = f(s + dt * ks3), mode_matrix_rhs(s + dt * ks3, y + dt * ky3)
        s = s + sixth * (ks1 + 2.0 * (ks2 + ks3) + ks4)
        y = y + sixth * (ky1 + 2.0 * (ky2 + ky3) + ky4)
        if not np.isfinite(y).all() or not np.isfinite(s).all():
            raise DivergedError(f"mode integration lost finiteness at t={k * dt:g}")
        if k % sample_stride == 0:
            nrm = float(np.abs(y).sum(axis=1).max())
            if nrm == 0.0:
                raise DivergedError("mode matrix collapsed to zero")
            times.append(k * dt)
            lognorms.append(log_offset + math.log(nrm))
            if nrm > 1e6 or nrm < 1e-6:
                y = y / nrm
                log_offset += math.log(nrm)
    slope = float(np.polyfit(times, lognorms, 1)[0])
    return slope
