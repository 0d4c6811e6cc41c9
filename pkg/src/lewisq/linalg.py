"""Dense kernels: thin QR, weighted Gram solves and exact leverage scores."""
from typing import NamedTuple

import numpy as np

from .errors import RankDeficient, SingularGram

# |R_ii| below this fraction of max |R_jj| means rank deficiency.
QR_RANK_TOL = 1e-12
# Singular values below this fraction of the largest are treated as zero.
PINV_RCOND = 1e-12
# Eigenvalues of a Gram matrix are squared singular values, and eigh has
# an absolute noise floor near eps * lambda_max, so the Gram cutoff is
# applied to eigenvalues directly rather than squared.
GRAM_RCOND = 1e-12


class QRFactors(NamedTuple):
    Q: np.ndarray
    R: np.ndarray


def as_matrix(A):
    """Return `A` as a finite 2-D float64 array, raising ValueError otherwise."""
    A = np.asarray(A, dtype=np.float64)
    if A.ndim == 1:
        A = A[:, None]
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise ValueError(f"expected a nonempty 2-D matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def thin_qr(A):
    """Householder thin QR of a tall full-column-rank matrix.

    Parameters
    ----------
    A : (n, d) array_like
        Requires n >= d.

    Returns
    -------
    QRFactors
        ``Q`` is n x d with orthonormal columns, ``R`` is d x d upper
        triangular with a nonnegative diagonal.

    Raises
    ------
    RankDeficient
        If some |R_ii| <= 1e-12 * max_j |R_jj|.
    """
    A = as_matrix(A)
    n, d = A.shape
    if n < d:
        raise RankDeficient(f"need n >= d for a thin QR, got {n} x {d}")
    # LAPACK geqrf/orgqr: Householder reflections.
    Q, R = np.linalg.qr(A, mode="reduced")
    diag = np.abs(np.diag(R))
    top = diag.max()
    if top == 0.0 or np.any(diag <= QR_RANK_TOL * top):
        k = int(np.argmin(diag))
        raise RankDeficient(f"column {k} is numerically dependent (|R_kk| = {diag[k]:.3e})")
    signs = np.where(np.diag(R) < 0, -1.0, 1.0)
    return QRFactors(Q * signs, R * signs[:, None])


def _svd_leverage(A):
    U, s, _ = np.linalg.svd(A, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        raise ValueError("leverage scores of the zero matrix are undefined")
    r = int(np.sum(s > PINV_RCOND * s[0]))
    return np.einsum("ij,ij->i", U[:, :r], U[:, :r])


def leverage_scores(A):
    """Leverage scores tau_i(A) = A_i^T (A^T A)^+ A_i for every row.

    Uses squared row norms of the thin-QR Q factor when A has full column
    rank, and of the left singular vectors (rank cut at 1e-12 relative)
    otherwise. The scores lie in [0, 1] and sum to rank(A).
    """
    A = as_matrix(A)
    if A.shape[0] >= A.shape[1]:
        try:
            Q, _ = thin_qr(A)
        except RankDeficient:
            pass
        else:
            return np.einsum("ij,ij->i", Q, Q)
    return _svd_leverage(A)


def numerical_rank(A):
    s = np.linalg.svd(as_matrix(A), compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > PINV_RCOND * s[0]))


def gram_solve(A, w, v, rcond=GRAM_RCOND, allow_singular=True):
    """Solve (A^T diag(w) A) x = v in the pseudo-inverse sense.

    `v` may be a vector of length d or a d x k matrix of right-hand sides.
    The component of `v` outside the row space of the weighted Gram matrix
    is discarded, so the result is G^+ v.

    Raises
    ------
    SingularGram
        If the Gram matrix is zero, or if ``allow_singular`` is False and
        any eigenvalue falls below ``rcond * lambda_max``.
    """
    A = as_matrix(A)
    w = np.asarray(w, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if w.shape != (A.shape[0],):
        raise ValueError(f"weights must have length {A.shape[0]}, got {w.shape}")
    if np.any(w < 0):
        raise ValueError("weights must be nonnegative")
    if v.shape[0] != A.shape[1]:
        raise ValueError(f"right-hand side must have leading dimension {A.shape[1]}")
    G = A.T @ (w[:, None] * A)
    G = 0.5 * (G + G.T)
    evals, evecs = np.linalg.eigh(G)
    top = evals[-1]
    if top <= 0.0:
        raise SingularGram("weighted Gram matrix is zero")
    keep = evals > rcond * top
    if not allow_singular and not np.all(keep):
        raise SingularGram(
            f"weighted Gram matrix has {int(np.sum(~keep))} eigenvalue(s) below {rcond:g} * max"
        )
    V = evecs[:, keep]
    return V @ ((V.T @ v) / (evals[keep] if v.ndim == 1 else evals[keep][:, None]))
