"""
l_1 Lewis weights
=================

Lewis weights generalize leverage scores: for p = 2 they are the leverage
scores, for p = 1 they are the fixed point of ``w_i = tau_i(W^{-1/2} A)``.
Rows with unusual direction or scale get large weights.
"""
import numpy as np

from lewisq import leverage_scores, lewis_weights, verify_lewis

rng = np.random.default_rng(0)

# A tall matrix whose rows have very uneven scales
A = rng.standard_normal((200, 4)) * rng.exponential(size=(200, 1)) ** 2
A[0] = [40.0, 0.0, 0.0, 0.0]  # one dominant row

lev = leverage_scores(A)
res = lewis_weights(A, p=1.0)
print(f"leverage scores sum to {lev.sum():.6f} (rank 4)")
print(f"l1 Lewis weights sum to {res.total:.6f} after {res.iterations} iterations")
print(f"independent fixed-point check: defect {verify_lewis(A, 1.0, res.weights):.2e}")

# Both measures flag the dominant row, but Lewis weights spread mass
# more evenly over the remaining rows than leverage scores do.
print(f"row 0: leverage {lev[0]:.3f}, Lewis {res.weights[0]:.3f}")
spread = lambda w: w[1:].max() / np.median(w[1:])  # noqa: E731
print(f"max/median over the other rows: leverage {spread(lev):.1f}, Lewis {spread(res.weights):.1f}")

# p = 2 reproduces the leverage scores
w2 = lewis_weights(A, p=2.0).weights
print("p = 2 equals leverage:", np.allclose(w2, lev, atol=1e-10))
