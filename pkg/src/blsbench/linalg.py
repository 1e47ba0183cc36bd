"""Dense matrix primitives and the two weighted ridge solvers.

Both solvers minimize

    (C/2) * ||S (G W - T)||_F^2 + (1/2) * ||W||_F^2

for a diagonal sample-weight matrix S. The primal form factorizes an
F x F system, the dual form an N x N system; they are algebraically
identical via the push-through identity, and the caller picks whichever
dimension is smaller.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, FactorizationFailure, NonFiniteInput

__all__ = [
    "as_matrix",
    "as_weights",
    "solve_weighted_ridge_primal",
    "solve_weighted_ridge_dual",
    "pairwise_sq_dist",
    "ridge_objective",
]


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite, 2-D float64 array."""
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got ndim={a.ndim}")
    if not np.isfinite(a).all():
        raise NonFiniteInput(f"{name} contains non-finite entries")
    return a


def as_weights(s, n: int, name: str = "weights") -> np.ndarray:
    """Coerce to a length-n vector of sample weights in [0, 1]."""
    s = np.asarray(s, dtype=np.float64).ravel()
    if s.shape[0] != n:
        raise DimensionMismatch(f"{name} has length {s.shape[0]}, expected {n}")
    if not np.isfinite(s).all():
        raise NonFiniteInput(f"{name} contains non-finite entries")
    if (s < 0.0).any() or (s > 1.0).any():
        raise NonFiniteInput(f"{name} entries must lie in [0, 1]")
    return s


def _check_ridge_args(G, S, T, c_reg):
    G = as_matrix(G, "G")
    T = as_matrix(T, "T")
    if T.shape[0] != G.shape[0]:
        raise DimensionMismatch(
            f"G has {G.shape[0]} rows but T has {T.shape[0]}"
        )
    S = as_weights(S, G.shape[0], "S")
    if not (np.isfinite(c_reg) and c_reg > 0):
        raise NonFiniteInput(f"c_reg must be a positive float, got {c_reg!r}")
    return G, S, T, float(c_reg)


def solve_weighted_ridge_primal(G, S, T, c_reg: float) -> np.ndarray:
    """Solve (G' S^2 G + I/C) W = G' S^2 T via a Cholesky factorization.

    Preferred when the feature count of G does not exceed the sample count.
    """
    G, S, T, c_reg = _check_ridge_args(G, S, T, c_reg)
    s2 = S * S
    A = G.T @ (s2[:, None] * G)
    A[np.diag_indices_from(A)] += 1.0 / c_reg
    rhs = G.T @ (s2[:, None] * T)
    try:
        factor = scipy.linalg.cho_factor(A, lower=True, check_finite=False)
    except scipy.linalg.LinAlgError as exc:
        raise FactorizationFailure(
            f"Cholesky factorization of G'S^2G + I/C failed: {exc}"
        ) from exc
    return scipy.linalg.cho_solve(factor, rhs, check_finite=False)


def solve_weighted_ridge_dual(G, S, T, c_reg: float) -> np.ndarray:
    """Solve W = G' (I/C + S^2 G G')^{-1} S^2 T via an LU factorization.

    Equivalent to the primal form; preferred when the feature count of G
    exceeds the sample count. The N x N system matrix is nonsymmetric
    whenever S is not the identity, hence the general solve.
    """
    G, S, T, c_reg = _check_ridge_args(G, S, T, c_reg)
    s2 = S * S
    M = s2[:, None] * (G @ G.T)
    M[np.diag_indices_from(M)] += 1.0 / c_reg
    try:
        lu, piv = scipy.linalg.lu_factor(M, check_finite=False)
    except scipy.linalg.LinAlgError as exc:
        raise FactorizationFailure(
            f"LU factorization of I/C + S^2GG' failed: {exc}"
        ) from exc
    u_diag = np.abs(np.diag(lu))
    if not u_diag.all() or not np.isfinite(lu).all():
        raise FactorizationFailure("I/C + S^2GG' is singular")
    y = scipy.linalg.lu_solve((lu, piv), s2[:, None] * T, check_finite=False)
    return G.T @ y


def pairwise_sq_dist(A, B) -> np.ndarray:
    """Squared Euclidean distances between the rows of A and the rows of B.

    Uses the ||a||^2 + ||b||^2 - 2 a.b expansion; near-zero entries are
    recomputed directly so identical rows come out exactly zero.
    """
    A = as_matrix(A, "A")
    B = as_matrix(B, "B")
    if A.shape[1] != B.shape[1]:
        raise DimensionMismatch(
            f"A has {A.shape[1]} columns but B has {B.shape[1]}"
        )
    a2 = np.einsum("ij,ij->i", A, A)
    b2 = np.einsum("ij,ij->i", B, B)
    d2 = a2[:, None] + b2[None, :] - 2.0 * (A @ B.T)
    np.maximum(d2, 0.0, out=d2)
    # The expansion loses precision near zero; fix up suspect pairs exactly.
    tol = 16.0 * np.finfo(np.float64).eps * (a2[:, None] + b2[None, :])
    for i, j in zip(*np.nonzero(d2 <= tol)):
        diff = A[i] - B[j]
        d2[i, j] = diff @ diff
    return d2


def ridge_objective(G, S, T, c_reg: float, W) -> float:
    """Value of the weighted ridge objective at W (diagnostic helper)."""
    G, S, T, c_reg = _check_ridge_args(G, S, T, c_reg)
    W = as_matrix(W, "W")
    resid = S[:, None] * (G @ W - T)
    return 0.5 * c_reg * float(np.sum(resid * resid)) + 0.5 * float(np.sum(W * W))
