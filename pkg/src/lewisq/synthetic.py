"""Imbalanced synthetic quantile-regression data.

Rows of A are canonical basis vectors; e_j appears c_j times with
``c_j = q c_{j-1}``. Responses are ``b* = A x*`` plus Laplacian noise scaled
to ``||nu||_1 / ||b*||_1 = noise_ratio``; with probability `outlier_prob`
an entry is replaced by ``outlier_scale * nu_i``.
"""
from dataclasses import dataclass

import numpy as np

from .errors import InvalidSpec
from .regression import QuantileProblem


@dataclass(frozen=True)
class SyntheticSpec:
    n: int
    d: int
    q: float
    seed: int = 0
    noise_ratio: float = 0.2
    outlier_prob: float = 0.001
    outlier_scale: float = 500.0

    def multiplicities(self):
        n, d, q = self.n, self.d, self.q
        if d < 1 or n < d:
            raise InvalidSpec(f"need n >= d >= 1, got n={n}, d={d}")
        if not (1.0 < q <= 2.0):
            raise InvalidSpec(f"q must lie in (1, 2], got {q}")
        if d == 1:
            return np.array([n], dtype=np.int64)
        first = n * (q - 1.0) / (q**d - 1.0)
        c = np.rint(first * q ** np.arange(d - 1)).astype(np.int64)
        c = np.append(c, n - c.sum())
        if np.any(c < 1):
            raise InvalidSpec(f"n={n} too small for d={d}, q={q}: some block would be empty")
        return c


@dataclass(frozen=True)
class SyntheticData:
    A: np.ndarray
    b: np.ndarray
    x_true: np.ndarray
    counts: np.ndarray
    outliers: np.ndarray
    spec: SyntheticSpec

    def problem(self, tau):
        return QuantileProblem(self.A, self.b, tau)


def gen_synthetic(spec):
    counts = spec.multiplicities()
    rng = np.random.default_rng(spec.seed)
    x_true = rng.standard_normal(spec.d)
    cols = np.repeat(np.arange(spec.d), counts)
    A = np.zeros((spec.n, spec.d))
    A[np.arange(spec.n), cols] = 1.0
    b_star = A @ x_true
    nu = rng.laplace(size=spec.n)
    nu *= spec.noise_ratio * np.abs(b_star).sum() / np.abs(nu).sum()
    outlier = rng.random(spec.n) < spec.outlier_prob
    b = np.where(outlier, spec.outlier_scale * nu, b_star + nu)
    return SyntheticData(A=A, b=b, x_true=x_true, counts=counts, outliers=outlier, spec=spec)
