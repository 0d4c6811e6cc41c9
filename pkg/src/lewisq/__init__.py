"""Lewis-weight row sampling for quantile losses.

Submodules
----------
linalg      thin QR, weighted Gram solves, leverage scores
loss        rho_tau, pinball loss, phi(t) = a|t| + bt
lewis       l_p Lewis weights
sampler     sampling plans and row sampling
regression  sampled quantile regression and an exact small-instance oracle
graph       balanced digraphs, cuts, sparsification
io          Matrix Market, CSV and edge-list files
synthetic   imbalanced synthetic regression data
experiment  sampling-scheme comparison harness
"""
__version__ = "0.1.0"

from .errors import (  # noqa: F401
    Degenerate, DegeneratePlan, DimensionMismatch, InvalidCut, InvalidSpec, LewisqError,
    NoConvergence, NotStronglyConnected, ParseError, RankDeficient, SingularGram, TooLarge,
)
from .lewis import LewisWeights, lewis_weights, verify_lewis  # noqa: F401
from .linalg import gram_solve, leverage_scores, thin_qr  # noqa: F401
from .loss import PhiParams, QuantileParams, rho, rho_sum  # noqa: F401
from .regression import QuantileProblem, exact_small, fit  # noqa: F401
from .sampler import make_plan, quantile_sample, sample_rows  # noqa: F401
