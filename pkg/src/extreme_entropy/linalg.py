"""Dense symmetric linear algebra used by the entropy machines.

All routines work on plain ``float64`` numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

EIG_TOL = 1e-10


class SingularCovarianceError(np.linalg.LinAlgError):
    """Combined class covariance is singular or indefinite."""

    def __init__(self, msg="singular covariance; combined class covariance not invertible"):
        super().__init__(msg)


@dataclass(frozen=True)
class ShrunkCovariance:
    matrix: np.ndarray
    epsilon: float
    trace: float
    degenerate: bool = False
    location: np.ndarray | None = None

    @property
    def order(self) -> int:
        return self.matrix.shape[0]


def _centered_cov(H, ddof):
    H = np.asarray(H, dtype=np.float64)
    n = H.shape[0]
    if n < 1:
        raise ValueError("need at least one row")
    mean = H.mean(axis=0)
    C = H - mean
    S = C.T @ C
    # symmetrize exactly
    S += S.T
    S *= 0.5 / max(n - ddof, 1)
    return S, mean, C


def empirical_covariance(H, ddof: int = 0):
    """Covariance and mean vector of the rows of `H` (divisor ``N - ddof``)."""
    S, mean, _ = _centered_cov(H, ddof)
    return S, mean


def ledoit_wolf(H, ddof: int = 0) -> ShrunkCovariance:
    """Ledoit-Wolf (2004) shrinkage towards ``tr(S)/h * I``.

    The intensity is ``b^2 / d^2`` with ``d^2 = ||S - mu I||^2`` and
    ``b^2 = min(d^2, N^-2 sum_k ||x_k x_k' - S||^2)``, norms being the
    Frobenius norm divided by `h`. An all-constant input yields the zero
    matrix flagged as degenerate.
    """
    S, mean, C = _centered_cov(H, ddof)
    n, h = C.shape
    tr = float(np.trace(S))
    if tr <= 0.0:
        return ShrunkCovariance(np.zeros((h, h)), 1.0, 0.0, degenerate=True, location=mean)
    mu = tr / h
    flat = S.ravel()
    ss = float(flat @ flat)
    d2 = (ss - 2.0 * mu * tr + mu * mu * h) / h
    # sum_k ||x_k x_k' - S||_F^2 = sum_k ||x_k||^4 - N ||S||_F^2 for centered rows
    sq = np.einsum("ij,ij->i", C, C)
    ss_ml = ss if ddof == 0 else ss * (max(n - ddof, 1) / n) ** 2
    bbar2 = (float(sq @ sq) - n * ss_ml) / (n * n * h)
    b2 = min(max(bbar2, 0.0), d2)
    eps = 0.0 if d2 <= 0.0 else b2 / d2
    eps = float(np.clip(eps, 0.0, 1.0))
    S *= 1.0 - eps
    S[np.diag_indices(h)] += eps * mu
    return ShrunkCovariance(S, eps, tr, location=mean)


def _cholesky(A):
    A = np.asarray(A, dtype=np.float64)
    try:
        c, lower = scipy.linalg.cho_factor(A, lower=True, check_finite=True)
    except (np.linalg.LinAlgError, ValueError):
        raise SingularCovarianceError() from None
    diag = np.diag(c) ** 2
    # cheap conditioning guard on the factor pivots
    if diag.min() <= A.shape[0] * 1e-12 * max(diag.max(), np.abs(np.diag(A)).max()):
        raise SingularCovarianceError()
    return c, lower


def sym_solve(A, b):
    """Solve ``A x = b`` for symmetric positive definite `A`."""
    return scipy.linalg.cho_solve(_cholesky(A), np.asarray(b, dtype=np.float64))


def sym_inverse(A):
    n = np.asarray(A).shape[0]
    X = sym_solve(A, np.eye(n))
    return 0.5 * (X + X.T)


def sym_inv_sqrt(A, tol: float = EIG_TOL):
    """Pseudo inverse square root via eigendecomposition.

    Eigenvalues below ``tol * lambda_max`` are dropped.
    """
    A = np.asarray(A, dtype=np.float64)
    w, U = np.linalg.eigh(0.5 * (A + A.T))
    top = w.max() if w.size else 0.0
    if top <= 0.0:
        return np.zeros_like(A)
    keep = w > tol * top
    U = U[:, keep]
    R = (U / np.sqrt(w[keep])) @ U.T
    return 0.5 * (R + R.T)


def pseudoinverse(A, tol: float = EIG_TOL):
    """Moore-Penrose pseudoinverse with singular values below ``tol * s_max`` cut."""
    A = np.asarray(A, dtype=np.float64)
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros(A.T.shape)
    keep = s > tol * s[0]
    return (Vt[keep].T / s[keep]) @ U[:, keep].T


def mahalanobis_sq(m, A) -> float:
    """``m' A^-1 m`` for positive definite `A`."""
    m = np.asarray(m, dtype=np.float64)
    if not np.any(m):
        return 0.0
    return float(m @ sym_solve(A, m))
