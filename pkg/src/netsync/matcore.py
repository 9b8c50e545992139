"""Dense real linear algebra: induced infinity norm, Kronecker products,
a cyclic Jacobi symmetric eigensolver, symmetric parts and leading
principal minors.

Matrices are plain 2-D float64 numpy arrays.  ``as_matrix`` validates and
returns a read-only copy, so values returned from this module can be
shared freely across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    InvalidParamsError,
    NoConvergenceError,
    NotSquareError,
    NotSymmetricError,
    SizeCapError,
)

# Kronecker results beyond this entry count are refused: the simulator is
# built to stay blockwise, so a product this large indicates a misuse.
KRON_MAX_ENTRIES = 250_000

# Leading-minor determinants go through LU with partial pivoting, which is
# only trustworthy here at small sizes.
MINORS_MAX_DIM = 12

_JACOBI_OFF_TOL = 1e-14
_JACOBI_MAX_SWEEPS = 100


def as_matrix(data) -> np.ndarray:
    """Validate and freeze a 2-D real matrix (finite entries, float64)."""
    a = np.array(data, dtype=float)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise InvalidParamsError(f"expected a non-empty 2-D matrix, got shape {a.shape}")
    if not np.isfinite(a).all():
        raise InvalidParamsError("matrix entries must be finite")
    a.setflags(write=False)
    return a


def _require_square(a: np.ndarray, op: str) -> None:
    if a.shape[0] != a.shape[1]:
        raise NotSquareError(f"{op} requires a square matrix, got {a.shape[0]}x{a.shape[1]}")


def inf_norm(a) -> float:
    """Induced infinity norm: maximum absolute row sum."""
    a = as_matrix(a)
    return float(np.abs(a).sum(axis=1).max())


def kron(a, b, *, max_entries: int = KRON_MAX_ENTRIES) -> np.ndarray:
    """Kronecker product [a_ij * b], refused above ``max_entries`` result entries."""
    a = as_matrix(a)
    b = as_matrix(b)
    total = a.shape[0] * b.shape[0] * a.shape[1] * b.shape[1]
    if total > max_entries:
        raise SizeCapError(
            f"kron result would hold {total} entries, above the cap of {max_entries}"
        )
    out = np.kron(a, b)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class SpectralDecomp:
    """Eigenvalues in ascending order and the matching orthonormal
    eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        self.eigenvalues.setflags(write=False)
        self.eigenvectors.setflags(write=False)


def jacobi_eig(a, *, off_tol: float = _JACOBI_OFF_TOL, max_sweeps: int = _JACOBI_MAX_SWEEPS) -> SpectralDecomp:
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Sweeps run until the off-diagonal Frobenius mass drops below
    ``off_tol`` times the Frobenius norm of the input (or ``max_sweeps``
    is hit, raising NoConvergenceError).  Eigenvalues are returned in
    ascending order; each eigenvector's first component above 1e-12 in
    magnitude is made positive so ties resolve deterministically.
    """
    a = as_matrix(a)
    _require_square(a, "jacobi_eig")
    n = a.shape[0]
    scale = inf_norm(a)
    if inf_norm(a - a.T) > 1e-12 * scale:
        raise NotSymmetricError("jacobi_eig requires a symmetric matrix")

    w = a.copy()
    w.setflags(write=True)
    q = np.eye(n)
    fro = math.sqrt(float((a * a).sum()))
    target = off_tol * fro

    def off_mass() -> float:
        # summed directly; total-minus-diagonal cancels catastrophically
        # once the off-diagonal part is near sqrt(ulp) of the norm
        sq = w * w
        np.fill_diagonal(sq, 0.0)
        return math.sqrt(float(sq.sum()))

    for _ in range(max_sweeps):
        if off_mass() <= target:
            break
        for p in range(n - 1):
            for r in range(p + 1, n):
                apq = w[p, r]
                if apq == 0.0:
                    continue
                tau = (w[r, r] - w[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                cp = w[:, p].copy()
                cq = w[:, r].copy()
                w[:, p] = c * cp - s * cq
                w[:, r] = s * cp + c * cq
                rp = w[p, :].copy()
                rq = w[r, :].copy()
                w[p, :] = c * rp - s * rq
                w[r, :] = s * rp + c * rq
                w[p, r] = 0.0
                w[r, p] = 0.0
                qp = q[:, p].copy()
                qq = q[:, r].copy()
                q[:, p] = c * qp - s * qq
                q[:, r] = s * qp + c * qq
    else:
        if off_mass() > target:
            raise NoConvergenceError(
                f"jacobi_eig did not converge within {max_sweeps} sweeps"
            )

    vals = np.diag(w).copy()
    order = np.argsort(vals, kind="stable")
    vals = vals[order]
    vecs = q[:, order].copy()
    for col in range(n):
        v = vecs[:, col]
        nz = np.flatnonzero(np.abs(v) > 1e-12)
        if nz.size and v[nz[0]] < 0.0:
            vecs[:, col] = -v
    return SpectralDecomp(eigenvalues=vals, eigenvectors=vecs)


def symmetric_part(a) -> np.ndarray:
    """(a + a^T) / 2."""
    a = as_matrix(a)
    _require_square(a, "symmetric_part")
    out = (a + a.T) / 2.0
    out.setflags(write=False)
    return out


def principal_minor_dets(a) -> list[float]:
    """Determinants of the leading principal blocks (D_1, ..., D_n)."""
    a = as_matrix(a)
    _require_square(a, "principal_minor_dets")
    n = a.shape[0]
    if n > MINORS_MAX_DIM:
        raise InvalidParamsError(f"principal_minor_dets supports n <= {MINORS_MAX_DIM}, got {n}")
    return [float(np.linalg.det(a[: k + 1, : k + 1])) for k in range(n)]


def minors_positive_definite(dets) -> bool:
    """Sign test: all leading minors strictly positive."""
    return all(d > 0.0 for d in dets)


def minors_negative_definite(dets) -> bool:
    """Sign test: leading minors alternate starting negative, (-1)^k D_k > 0."""
    return all((d < 0.0 if k % 2 == 0 else d > 0.0) for k, d in enumerate(dets))
