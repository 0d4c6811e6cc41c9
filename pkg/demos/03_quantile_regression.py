"""
Sampled quantile regression
===========================

`fit` samples rows of [A b] by Lewis weights, preconditions the sample with
a thin QR and runs an accelerated variance-reduced stochastic method. The
result is checked against an exact LP solve of the full problem.
"""
import numpy as np

from lewisq import QuantileProblem, fit
from lewisq.loss import h_to_rho_tau
from lewisq.regression import solve_lp

rng = np.random.default_rng(2)
n, d = 20_000, 6
A = np.column_stack([np.ones(n), rng.standard_normal((n, d - 1))])
x_true = rng.standard_normal(d)
b = A @ x_true + rng.standard_t(df=2, size=n)

# The pinball level tau_h = 0.75 corresponds to rho with tau = 1/3
tau = h_to_rho_tau(0.75)
P = QuantileProblem(A, b, tau)

rep = fit(P, epsilon=0.3, seed=0)
opt = P.objective(solve_lp(A, b, tau))
print(f"sampled {rep.sampled_rows} rows, {rep.sgd_iterations} stochastic steps, "
      f"{rep.wall_time:.2f}s")
print(f"objective {rep.objective:.2f} vs optimum {opt:.2f} (ratio {rep.objective / opt:.5f})")
print(f"max sampled leverage x N / d = {rep.leverage_flatness:.2f}")
