"""l_p Lewis weights by fixed-point iteration.

The l_p Lewis weights of A are the unique positive w with
``tau_i(W^{1/2 - 1/p} A) = w_i`` for every row i, where ``W = diag(w)``.
For p = 2 they are the leverage scores. They sum to rank(A) <= d.
"""
from dataclasses import dataclass

import numpy as np

from .errors import NoConvergence
from .linalg import as_matrix, gram_solve, leverage_scores

WEIGHT_FLOOR = 1e-300


@dataclass(frozen=True)
class LewisWeights:
    p: float
    weights: np.ndarray
    residual: float
    iterations: int

    @property
    def total(self):
        return float(self.weights.sum())


def _check_p(p):
    p = float(p)
    if not (1.0 <= p < 4.0):
        raise ValueError(f"Lewis weights are computed for 1 <= p < 4, got p={p}")
    return p


def _quadratic_forms(A, gram_weights):
    """Row quadratic forms A_i^T (A^T diag(gram_weights) A)^+ A_i."""
    X = gram_solve(A, gram_weights, A.T)
    return np.einsum("ij,ji->i", A, X)


def lewis_weights(A, p=1.0, tol=1e-8, max_iter=100):
    """Compute l_p Lewis weights of the rows of A.

    Iterates ``w_i <- (A_i^T (A^T W^{1-2/p} A)^+ A_i)^{p/2}`` from
    ``w_i = d/n``; the map is a contraction for p < 4. The defect
    ``max_i |tau_i(W^{1/2-1/p} A) - w_i| / w_i`` is evaluated before every
    update and the loop stops once it is at most ``tol / 2``.

    Zero rows get weight exactly 0 and take no part in the iteration.

    Parameters
    ----------
    A : (n, d) array_like
    p : float
        Norm parameter, 1 <= p < 4.
    tol : float
        Target relative fixed-point defect.
    max_iter : int
        Maximum number of updates.

    Returns
    -------
    LewisWeights

    Raises
    ------
    NoConvergence
        If the defect is still above ``tol`` after `max_iter` updates.
    """
    p = _check_p(p)
    A = as_matrix(A)
    n, d = A.shape
    nonzero = np.any(A != 0.0, axis=1)
    if not nonzero.any():
        raise ValueError("matrix has no nonzero rows")
    Anz = A[nonzero]
    w = np.full(Anz.shape[0], d / Anz.shape[0])
    expo = 1.0 - 2.0 / p

    defect = np.inf
    for it in range(max_iter + 1):
        q = _quadratic_forms(Anz, w**expo)
        lev = w**expo * q
        defect = float(np.max(np.abs(lev - w) / w))
        if defect <= 0.5 * tol:
            break
        if it == max_iter:
            break
        w = np.maximum(np.maximum(q, 0.0) ** (p / 2.0), WEIGHT_FLOOR)

    full = np.zeros(n)
    full[nonzero] = w
    result = LewisWeights(p=p, weights=full, residual=defect, iterations=it)
    if defect > tol:
        raise NoConvergence(
            f"Lewis iteration stalled at defect {defect:.3e} > {tol:g} after {it} updates",
            best=result,
        )
    return result


def verify_lewis(A, p, w):
    """Relative fixed-point defect of candidate weights `w`.

    Returns ``max_i |tau_i(W^{1/2-1/p} A) - w_i| / w_i`` over nonzero rows,
    with the leverage scores taken from an explicit row rescaling (QR or
    SVD), independent of the Gram-matrix route used by `lewis_weights`.
    """
    p = _check_p(p)
    A = as_matrix(A)
    w = np.asarray(w, dtype=np.float64)
    nonzero = np.any(A != 0.0, axis=1)
    wn = w[nonzero]
    if np.any(wn <= 0):
        raise ValueError("weights must be strictly positive on nonzero rows")
    scaled = A[nonzero] * (wn ** (0.5 - 1.0 / p))[:, None]
    lev = leverage_scores(scaled)
    return float(np.max(np.abs(lev - wn) / wn))


def lewis_weights_graph(G, p=1.0, tol=1e-8, max_iter=100):
    """Lewis weights of the edge-vertex incidence matrix of digraph `G`.

    Same contract as `lewis_weights` on ``incidence(G)``; this goes through
    the dense path, the incidence matrix having rank n minus the number of
    weakly connected components.
    """
    from .graph import incidence

    if G.edge_count == 0:
        raise ValueError("graph has no edges")
    return lewis_weights(incidence(G), p=p, tol=tol, max_iter=max_iter)
