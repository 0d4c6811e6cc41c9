"""Quantile regression by Lewis-weight sampling, QR preconditioning and Katyusha.

Solves ``min_x rho_tau(A x - b)`` to within a factor ``1 + eps``:

1. l_1 Lewis weights of ``[A b]``;
2. sample rows of ``[A b]`` giving ``[A~ b~]``;
3. thin QR ``A~ = Q R``;
4. minimize ``rho_tau(Q x - b~)`` from ``x0 = Q^T b~`` with an accelerated
   variance-reduced stochastic method;
5. map back, ``x* = R^{-1} x_bar``.

`exact_small` is an enumeration oracle for tiny problems.
"""
import itertools
import math
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import sparse
from scipy.linalg import solve_triangular
from scipy.optimize import linprog

from . import _kernels
from .errors import Degenerate, DimensionMismatch, NoConvergence, RankDeficient, TooLarge
from .lewis import lewis_weights
from .linalg import PINV_RCOND, QRFactors, as_matrix, thin_qr
from .loss import QuantileParams, bound_B, rho_as_phi, rho_sum
from .sampler import DEFAULT_APPROX_FACTOR, DEFAULT_C, make_plan, sample_rows


@dataclass(frozen=True)
class QuantileProblem:
    A: np.ndarray
    b: np.ndarray
    tau: float

    def __post_init__(self):
        A = as_matrix(self.A)
        b = np.asarray(self.b, dtype=np.float64).ravel()
        if b.shape[0] != A.shape[0]:
            raise DimensionMismatch(f"A has {A.shape[0]} rows but b has length {b.shape[0]}")
        if not np.all(np.isfinite(b)):
            raise ValueError("b has non-finite entries")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "tau", QuantileParams(self.tau).tau)

    @property
    def n(self):
        return self.A.shape[0]

    @property
    def d(self):
        return self.A.shape[1]

    def objective(self, x):
        return rho_sum(self.tau, self.A @ np.asarray(x, dtype=np.float64) - self.b)


@dataclass
class SolverReport:
    solution: np.ndarray
    objective: float
    sampled_rows: int
    sgd_iterations: int
    initial_distance: float
    seed: Optional[int]
    wall_time: float
    degraded: bool = False
    leverage_flatness: float = float("nan")
    attempts: int = 1
    extra: dict = field(default_factory=dict)


@dataclass
class SolveInfo:
    objective: float
    initial_objective: float
    epochs: int
    iterations: int
    converged: bool
    history: list


def init_point(qr, b_tilde):
    """Least-squares start ``Q^T b~`` (Q has orthonormal columns)."""
    Q = qr.Q if isinstance(qr, QRFactors) else np.asarray(qr)
    b_tilde = np.asarray(b_tilde, dtype=np.float64)
    if Q.shape[0] != b_tilde.shape[0]:
        raise DimensionMismatch("Q and b~ have different row counts")
    return Q.T @ b_tilde


def _draw(rng, cdf, m, last):
    idx = np.searchsorted(cdf, rng.random(m), side="right")
    return np.minimum(idx, last)


def accelerated_subgradient(Q, b_tilde, tau, x0, target_gap=1e-2, seed=0, max_epochs=80,
                            epochs_per_stage=3, full_output=False):
    """Minimize ``sum_i rho_tau(<Q_i, x> - b~_i)`` for Q with orthonormal columns.

    Runs Katyusha (non-strongly-convex variant, negative momentum through the
    snapshot, snapshot = average of the epoch's iterates) on the Moreau
    smoothing of rho_tau, halving the smoothing width every
    `epochs_per_stage` epochs until the smoothing bias is below
    ``target_gap / 2`` of the best objective, then stopping when the best
    objective stops moving. Rows are drawn proportionally to ``||Q_i||^2``.

    The returned point is the best snapshot (or `x0`) by the exact objective.

    Raises
    ------
    NoConvergence
        If no snapshot improves on `x0` and the plateau test never passed.
    """
    Q = as_matrix(Q)
    b = np.ascontiguousarray(b_tilde, dtype=np.float64)
    tau = QuantileParams(tau).tau
    N, d = Q.shape
    x0 = np.asarray(x0, dtype=np.float64).copy()
    rng = np.random.default_rng(seed)

    def f(x):
        return rho_sum(tau, Q @ x - b)

    f0 = f(x0)
    best, fbest = x0, f0
    history = [f0]
    lev = np.einsum("ij,ij->i", Q, Q)
    total = float(lev.sum())
    if f0 == 0.0 or total == 0.0:
        info = SolveInfo(f0, f0, 0, 0, True, history)
        return (x0, info) if full_output else x0
    prob = lev / total
    cdf = np.cumsum(prob)
    last = int(np.flatnonzero(prob > 0)[-1])
    Qc = np.ascontiguousarray(Q)
    m = 2 * N

    mu = f0 / N
    epochs = 0
    converged = False
    while epochs < max_epochs:
        L = total / mu
        snap = best.copy()
        y = best.copy()
        z = best.copy()
        for s in range(epochs_per_stage):
            if epochs >= max_epochs:
                break
            tau1 = 2.0 / (s + 4.0)
            alpha = 1.0 / (3.0 * tau1 * L)
            eta = 1.0 / (3.0 * L)
            slopes = _kernels.smoothed_slopes(Qc @ snap - b, tau, mu)
            full_grad = Qc.T @ slopes
            idx = _draw(rng, cdf, m, last)
            snap = _kernels.katyusha_epoch(Qc, b, tau, mu, idx, prob, snap, slopes, full_grad,
                                           y, z, tau1, 0.5, alpha, eta)
            epochs += 1
            fs = f(snap)
            if fs < fbest:
                best, fbest = snap.copy(), fs
            history.append(fbest)
        mu_floor = 0.5 * target_gap * fbest / N
        if mu <= mu_floor * (1 + 1e-9):
            window = history[-(epochs_per_stage + 1):]
            if window[0] - window[-1] <= 0.25 * target_gap * fbest:
                converged = True
                break
        mu = max(0.5 * mu, mu_floor)
        if fbest == 0.0:
            converged = True
            break

    info = SolveInfo(fbest, f0, epochs, epochs * m, converged, history)
    if not converged and fbest >= f0:
        raise NoConvergence("objective did not improve on the starting point", best=(best, info))
    return (best, info) if full_output else best


def precondition(A):
    """Orthonormal basis for range(A) and the map back to x-space.

    Returns ``(Q, back)`` with ``A @ back(u) == Q @ u``. Uses the thin QR when A
    has full column rank and the thin SVD (minimum-norm back map) otherwise.
    """
    A = as_matrix(A)
    try:
        Q, R = thin_qr(A)
    except RankDeficient:
        U, s, Vt = np.linalg.svd(A, full_matrices=False)
        r = int(np.sum(s > PINV_RCOND * s[0])) if s[0] > 0 else 0
        if r == 0:
            raise
        U, s, V = U[:, :r], s[:r], Vt[:r].T
        return U, lambda u: V @ (u / s)
    return Q, lambda u: solve_triangular(R, u, lower=False)


def solve_quantile(A, b, tau, target_gap=1e-3, seed=0, max_epochs=200, full_output=False):
    """Directly minimize ``rho_tau(A x - b)`` (no sampling), tolerating rank deficiency."""
    A = as_matrix(A)
    b = np.asarray(b, dtype=np.float64)
    Q, back = precondition(A)
    u0 = Q.T @ b
    try:
        u, info = accelerated_subgradient(Q, b, tau, u0, target_gap=target_gap, seed=seed,
                                          max_epochs=max_epochs, full_output=True)
    except NoConvergence as exc:
        u, info = exc.best
    x = back(u)
    return (x, info) if full_output else x


def solve_lp(A, b, tau):
    """Exact minimizer of ``rho_tau(A x - b)`` as a linear program (HiGHS).

    Splits ``A x - b = u - v`` with ``u, v >= 0`` and minimizes
    ``sum(u) + tau * sum(v)``. Returns a vertex solution.
    """
    A = as_matrix(A)
    b = np.asarray(b, dtype=np.float64)
    n, d = A.shape
    tau = QuantileParams(tau).tau if not isinstance(tau, QuantileParams) else tau.tau
    eye = sparse.identity(n, format="csr")
    A_eq = sparse.hstack([sparse.csr_matrix(A), -eye, eye], format="csr")
    cost = np.concatenate([np.zeros(d), np.ones(n), np.full(n, tau)])
    bounds = [(None, None)] * d + [(0, None)] * (2 * n)
    res = linprog(cost, A_eq=A_eq, b_eq=b, bounds=bounds, method="highs")
    if res.status != 0:
        raise NoConvergence(f"linear program failed: {res.message}")
    return res.x[:d]


def fit(problem, epsilon, seed=0, C=DEFAULT_C, approx_factor=DEFAULT_APPROX_FACTOR,
        max_epochs=80, retries=3, repeats=1):
    """(1 + eps)-approximate quantile regression through row sampling.

    Parameters
    ----------
    problem : QuantileProblem
    epsilon : float
        Accuracy in (0, 1).
    seed : int
        Root seed; every attempt and repetition derives its own stream.
    retries : int
        Fresh samples to try when the sampled matrix is rank deficient.
    repeats : int
        Independent repetitions; the lowest full objective wins.

    Returns
    -------
    SolverReport
    """
    if not (0.0 < epsilon < 1.0):
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    t_start = time.perf_counter()
    A, b, tau = problem.A, problem.b, problem.tau
    d = problem.d
    M = np.column_stack([A, b])
    weights = lewis_weights(M, p=1.0)
    plan = make_plan(weights, rho_as_phi(tau), bound_B(tau), epsilon, C=C,
                     approx_factor=approx_factor)

    best_report = None
    streams = np.random.SeedSequence(seed).spawn(repeats)
    for rep in range(repeats):
        report = _fit_once(problem, plan, streams[rep], epsilon, max_epochs, retries, d, M)
        if best_report is None or report.objective < best_report.objective:
            best_report = report
    best_report.seed = seed
    best_report.wall_time = time.perf_counter() - t_start
    best_report.extra["repeats"] = repeats
    return best_report


def _fit_once(problem, plan, stream, epsilon, max_epochs, retries, d, M):
    tau = problem.tau
    attempts = stream.spawn(retries + 1)
    for attempt, child in enumerate(attempts, start=1):
        sample_seq, solver_seq = child.spawn(2)
        sampled = sample_rows(M, plan, sample_seq)
        A_t, b_t = sampled.rows[:, :d], sampled.rows[:, d]
        try:
            qr = thin_qr(A_t)
        except RankDeficient:
            continue
        x0 = init_point(qr, b_t)
        degraded = False
        try:
            xbar, info = accelerated_subgradient(qr.Q, b_t, tau, x0, target_gap=epsilon / 10,
                                                 seed=solver_seq, max_epochs=max_epochs,
                                                 full_output=True)
        except NoConvergence as exc:
            xbar, info = exc.best
            degraded = True
        degraded = degraded or not info.converged
        x = solve_triangular(qr.R, xbar, lower=False)
        lev = np.einsum("ij,ij->i", qr.Q, qr.Q)
        return SolverReport(
            solution=x,
            objective=problem.objective(x),
            sampled_rows=plan.N,
            sgd_iterations=info.iterations,
            initial_distance=float(np.linalg.norm(xbar - x0)),
            seed=None,
            wall_time=0.0,
            degraded=degraded,
            leverage_flatness=float(lev.max() * plan.N / d),
            attempts=attempt,
            extra={"sampled_objective": info.objective, "epochs": info.epochs},
        )
    raise RankDeficient(f"sampled matrix rank deficient in {retries + 1} attempts")


EXACT_MAX_ROWS = 80
EXACT_MAX_COLS = 4
_CHUNK = 20000


def exact_small(problem):
    """Exact minimizer of ``rho_tau(A x - b)`` by enumerating basic solutions.

    Every d-subset S of rows with nonsingular ``A_S`` gives a candidate
    ``x = A_S^{-1} b_S``; some optimum is among them when A has full column
    rank. Ties go to the lexicographically smallest subset.

    Returns
    -------
    (x_opt, objective)

    Raises
    ------
    TooLarge
        If n > 80 or d > 4.
    Degenerate
        If every d-subset is singular.
    """
    A, b, tau = problem.A, problem.b, problem.tau
    n, d = A.shape
    if n > EXACT_MAX_ROWS or d > EXACT_MAX_COLS:
        raise TooLarge(f"exact_small handles n <= {EXACT_MAX_ROWS}, d <= {EXACT_MAX_COLS}; "
                       f"got {n} x {d}")
    scale = np.linalg.norm(A, axis=1)
    best_obj = math.inf
    best_x = None
    combos = itertools.combinations(range(n), d)
    while True:
        chunk = np.array(list(itertools.islice(combos, _CHUNK)), dtype=np.intp)
        if chunk.size == 0:
            break
        chunk = chunk.reshape(-1, d)
        M = A[chunk]
        det = np.abs(np.linalg.det(M))
        ok = det > 1e-10 * np.prod(scale[chunk], axis=1)
        if not ok.any():
            continue
        M, rhs = M[ok], b[chunk[ok]]
        X = np.linalg.solve(M, rhs[..., None])[..., 0]
        R = X @ A.T - b
        obj = np.where(R >= 0, R, -tau * R).sum(axis=1)
        lo = obj.min()
        if lo < best_obj * (1 - 1e-12) - 1e-300:
            j = int(np.flatnonzero(obj <= lo * (1 + 1e-12) + 1e-300)[0])
            best_obj, best_x = float(obj[j]), X[j]
    if best_x is None:
        raise Degenerate("every d-subset of rows is singular")
    return best_x, problem.objective(best_x)
