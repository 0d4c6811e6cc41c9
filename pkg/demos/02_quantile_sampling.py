"""
Row sampling for the quantile loss
==================================

Sampling rows proportionally to l_1 Lewis weights of A and rescaling them
gives a much shorter matrix A~ with rho_tau(A~ x) close to rho_tau(A x)
simultaneously for every x.
"""
import numpy as np

from lewisq import lewis_weights, quantile_sample, rho_sum
from lewisq.sampler import sample_rows, uniform_plan

rng = np.random.default_rng(1)
n, d, tau, eps = 20_000, 5, 0.5, 0.5

# Imbalanced design: a few rows in rare directions carry most of the signal
A = rng.standard_normal((n, d))
A[:, 4] *= np.where(rng.random(n) < 0.005, 50.0, 0.01)

w = lewis_weights(A)
S = quantile_sample(A, tau, eps, seed=0, weights=w)
print(f"{n} rows -> {S.N} draws ({np.unique(S.source_indices).size} distinct rows)")

# Distortion over random directions, against uniform sampling of the same size
X = rng.standard_normal((d, 500))
X[4] *= 20.0
full = np.array([rho_sum(tau, A @ x) for x in X.T])
lew = np.array([rho_sum(tau, S.rows @ x) for x in X.T]) / full
U = sample_rows(A, uniform_plan(n, S.N), seed=0)
uni = np.array([rho_sum(tau, U.rows @ x) for x in X.T]) / full
print(f"Lewis   ratio range [{lew.min():.3f}, {lew.max():.3f}]")
print(f"uniform ratio range [{uni.min():.3f}, {uni.max():.3f}]")
