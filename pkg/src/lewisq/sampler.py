"""Row sampling plans built on Lewis weights.

A plan assigns every row an expected sample count ``p_i`` with
``sum(p_i) = N``. Sampling draws N i.i.d. row indices with probabilities
``p_i / N``. Two estimators are supported:

* scaled rows, ``A_{i_k} / p_{i_k}``, for positively homogeneous losses
  such as ``phi(t) = a|t| + b t``;
* unscaled rows with weights ``1 / p_{i_k}``, for losses that are only
  comparable to ``|t|^p`` (evaluate with `weighted_loss_eval`).

Both are unbiased: for any fixed x the expected sampled loss equals the
full loss.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DegeneratePlan
from .lewis import LewisWeights, lewis_weights
from .linalg import as_matrix
from .loss import bound_B, rho_as_phi

log = logging.getLogger(__name__)

DEFAULT_C = 4.0
# Lewis weights here are exact; plans still inflate them by this factor,
# the slack allowed for approximate weights.
DEFAULT_APPROX_FACTOR = 2.0


@dataclass(frozen=True)
class SamplingPlan:
    values: np.ndarray
    N: int
    epsilon: Optional[float] = None
    coef_abs: Optional[float] = None
    bound_b: Optional[float] = None
    constant: Optional[float] = None
    weights: Optional[np.ndarray] = None

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def beta(self):
        return self.constant * (self.coef_abs * self.bound_b / self.epsilon) ** 2

    def floor(self):
        """Per-row lower bound ``C (a B / eps)^2 w_i log N``."""
        if self.weights is None or self.epsilon is None:
            raise ValueError("plan has no Lewis floor")
        return self.beta * self.weights * math.log(self.N)

    def floor_holds(self):
        return bool(np.all(self.values >= self.floor() * (1 - 1e-12)))


@dataclass(frozen=True)
class SampledMatrix:
    rows: np.ndarray
    source_indices: np.ndarray
    values: np.ndarray
    row_weights: Optional[np.ndarray] = None
    plan: Optional[SamplingPlan] = None

    @property
    def N(self):
        return self.rows.shape[0]


def _weights_array(w):
    if isinstance(w, LewisWeights):
        w = w.weights
    w = np.asarray(w, dtype=np.float64)
    if w.ndim != 1 or np.any(w < 0) or not np.all(np.isfinite(w)):
        raise ValueError("weights must be a finite nonnegative vector")
    return w


def solve_sample_size(x):
    """Smallest integer ``N >= max(x, 1)`` with ``N >= x log N``.

    N = 1 always satisfies the inequality trivially, so the search is kept
    on the upper branch ``N >= x``. Starts at ``x log(x + e)``, takes two
    refinements ``N <- x log N``, rounds up, steps up until the inequality
    holds and then down while it still holds.
    """
    if not (x > 0 and math.isfinite(x)):
        raise ValueError(f"x must be positive and finite, got {x}")
    lo = max(x, 1.0)
    N = x * math.log(x + math.e)
    for _ in range(2):
        N = x * math.log(max(N, 1.0))
    N = max(math.ceil(lo), math.ceil(N))
    for _ in range(1000):
        need = x * math.log(N)
        if N >= need:
            break
        N = max(N + 1, math.ceil(need))
    else:
        raise RuntimeError(f"sample-size iteration did not settle for x={x}")
    while N - 1 >= lo and N - 1 >= x * math.log(N - 1):
        N -= 1
    return N


def make_plan(w, phi, bound_b, epsilon, C=DEFAULT_C, approx_factor=DEFAULT_APPROX_FACTOR):
    """Sampling plan satisfying ``p_i >= C (a B / eps)^2 w_i log N``.

    Parameters
    ----------
    w : LewisWeights or array_like
        l_1 Lewis weights (possibly approximate from above).
    phi : PhiParams
        Loss ``a|t| + b t``; only ``a`` enters the plan.
    bound_b : float
        Constant with ``||Ax||_1 <= B phi(Ax)`` for all x.
    epsilon : float
        Target distortion in (0, 1).
    C : float
        Oversampling constant.
    approx_factor : float
        The weights are multiplied by this before planning.

    Raises
    ------
    DegeneratePlan
        If every weight is zero.
    """
    if not (0.0 < epsilon < 1.0):
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    if C <= 0:
        raise ValueError("C must be positive")
    if bound_b < 1.0:
        raise ValueError(f"bound_b must be >= 1, got {bound_b}")
    if approx_factor < 1.0:
        raise ValueError("approx_factor must be >= 1")
    wbar = approx_factor * _weights_array(w)
    total = float(wbar.sum())
    if total <= 0.0:
        raise DegeneratePlan("all Lewis weights are zero")
    beta = C * (phi.coef_abs * bound_b / epsilon) ** 2
    N = solve_sample_size(beta * total)
    values = wbar * (N / total)
    plan = SamplingPlan(
        values=values, N=N, epsilon=float(epsilon), coef_abs=phi.coef_abs,
        bound_b=float(bound_b), constant=float(C), weights=wbar,
    )
    assert abs(values.sum() - N) <= 1e-6 * N
    assert plan.floor_holds()
    return plan


def fixed_size_plan(w, N, phi=None, bound_b=None, epsilon=None, C=DEFAULT_C):
    """Plan proportional to `w` with a caller-chosen total N.

    When ``phi``, ``bound_b`` and ``epsilon`` are all given, a violated
    floor is logged (not raised).
    """
    w = _weights_array(w)
    N = int(N)
    if N < 1:
        raise ValueError("N must be >= 1")
    total = float(w.sum())
    if total <= 0.0:
        raise DegeneratePlan("all Lewis weights are zero")
    values = w * (N / total)
    if phi is None or bound_b is None or epsilon is None:
        return SamplingPlan(values=values, N=N, weights=w)
    plan = SamplingPlan(
        values=values, N=N, epsilon=float(epsilon), coef_abs=phi.coef_abs,
        bound_b=float(bound_b), constant=float(C), weights=w,
    )
    if not plan.floor_holds():
        log.warning("forced N=%d is below the sampling floor for eps=%g", N, epsilon)
    return plan


def uniform_plan(n, N):
    if n < 1 or N < 1:
        raise ValueError("n and N must be >= 1")
    return SamplingPlan(values=np.full(n, N / n), N=int(N))


def draw_indices(plan, seed):
    """N i.i.d. row indices with probabilities ``p_i / N`` via inverse CDF."""
    rng = np.random.default_rng(seed)
    probs = plan.values / plan.values.sum()
    cdf = np.cumsum(probs)
    u = rng.random(plan.N)
    idx = np.searchsorted(cdf, u, side="right")
    # Rounding can leave cdf[-1] a hair below 1.
    last = int(np.flatnonzero(plan.values > 0)[-1])
    return np.minimum(idx, last)


def sample_rows(A, plan, seed):
    """Draw ``A_{i_k} / p_{i_k}`` for k = 1..N."""
    A = as_matrix(A)
    if A.shape[0] != plan.n:
        raise ValueError(f"plan is for {plan.n} rows but A has {A.shape[0]}")
    idx = draw_indices(plan, seed)
    vals = plan.values[idx]
    return SampledMatrix(rows=A[idx] / vals[:, None], source_indices=idx, values=vals, plan=plan)


def sample_rows_weighted(A, plan, seed):
    """Draw unscaled rows ``A_{i_k}`` with weights ``1 / p_{i_k}``."""
    A = as_matrix(A)
    if A.shape[0] != plan.n:
        raise ValueError(f"plan is for {plan.n} rows but A has {A.shape[0]}")
    idx = draw_indices(plan, seed)
    vals = plan.values[idx]
    return SampledMatrix(rows=A[idx].copy(), source_indices=idx, values=vals,
                         row_weights=1.0 / vals, plan=plan)


def quantile_sample(A, tau, epsilon, seed, C=DEFAULT_C, approx_factor=DEFAULT_APPROX_FACTOR,
                    weights=None):
    """Sample rows of A so that ``rho_tau(A~ x)`` approximates ``rho_tau(A x)`` for all x.

    Uses l_1 Lewis weights with ``a = (1 + tau)/2`` and ``B = 1/tau``.
    Precomputed Lewis weights may be passed as `weights`.
    """
    A = as_matrix(A)
    if weights is None:
        weights = lewis_weights(A, p=1.0)
    plan = make_plan(weights, rho_as_phi(tau), bound_B(tau), epsilon, C=C,
                     approx_factor=approx_factor)
    return sample_rows(A, plan, seed)


def oversampling_factor(p, d, epsilon, C=DEFAULT_C):
    """Per-unit-weight oversampling f(p, d, eps) for weighted l_p-type sampling.

    p = 1:      C / eps^2 * log(d / eps)
    1 < p <= 2: C / eps^2 * log(d / eps) * log^2 log(d / eps)
    p > 2:      C / eps^2 * d^{p/2} * log^2 d * log(d / eps)
    """
    p = float(p)
    if not (0.0 < epsilon < 1.0):
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    if p < 1.0:
        raise ValueError("p must be >= 1")
    L = math.log(max(d, 1) / epsilon)
    if p == 1.0:
        return C / epsilon**2 * L
    if p <= 2.0:
        return C / epsilon**2 * L * math.log(max(L, math.e)) ** 2
    return C / epsilon**2 * d ** (p / 2.0) * math.log(max(d, 2)) ** 2 * L


def make_plan_lp(w, d, epsilon, C=DEFAULT_C):
    """Plan ``p_i >= f(p, d, eps) w_i`` from l_p Lewis weights `w`."""
    if not isinstance(w, LewisWeights):
        raise TypeError("make_plan_lp needs LewisWeights (it reads p)")
    wa = _weights_array(w)
    total = float(wa.sum())
    if total <= 0.0:
        raise DegeneratePlan("all Lewis weights are zero")
    f = oversampling_factor(w.p, d, epsilon, C)
    N = max(1, math.ceil(f * total))
    return SamplingPlan(values=wa * (N / total), N=N, epsilon=float(epsilon),
                        constant=float(C), weights=wa)


def weighted_loss_eval(phi, weights, y):
    """``sum_k weights_k * phi(y_k)`` for a vectorized scalar loss `phi`."""
    weights = np.asarray(weights, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if weights.shape != y.shape:
        raise ValueError("weights and y must have the same shape")
    if np.any(weights < 0):
        raise ValueError("weights must be nonnegative")
    return float(np.sum(weights * np.asarray(phi(y), dtype=np.float64)))


def collapse_duplicates(A, sampled):
    """Merge repeated draws of a scaled-row sample into one row per source.

    Returns ``(sources, counts, rows)`` where ``rows[j] = counts[j] *
    A[sources[j]] / p[sources[j]]``. For a positively homogeneous loss the
    merged matrix gives exactly the same loss as ``sampled.rows``.
    """
    A = as_matrix(A)
    sources, first, counts = np.unique(sampled.source_indices, return_index=True,
                                       return_counts=True)
    vals = sampled.values[first]
    return sources, counts, A[sources] * (counts / vals)[:, None]
