"""Quantile loss family.

``rho(tau, t)`` is ``t`` for ``t >= 0`` and ``-tau * t`` otherwise, with
``0 < tau <= 1``; ``tau = 1`` is the absolute value. The statistics
convention ``h_loss`` (pinball loss) relates to it by
``h_{tau}(t) = tau * rho_{(1 - tau) / tau}(t)``. Both are instances of
the two-parameter form ``phi(t) = a|t| + b t`` with ``0 <= b <= a``, which
also covers ``rho_0(t) = max(t, 0)`` used for directed cuts.

Scalar functions accept numpy arrays and act elementwise; the ``*_sum``
variants add over the entries of a vector.
"""
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class QuantileParams:
    tau: float

    def __post_init__(self):
        tau = float(self.tau)
        if not (0.0 < tau <= 1.0):
            raise ValueError(f"tau must lie in (0, 1], got {self.tau!r}")
        object.__setattr__(self, "tau", tau)


@dataclass(frozen=True)
class PhiParams:
    coef_abs: float
    coef_lin: float

    def __post_init__(self):
        a, b = float(self.coef_abs), float(self.coef_lin)
        if not (0.0 <= b <= a):
            raise ValueError(f"need 0 <= coef_lin <= coef_abs, got a={a}, b={b}")
        object.__setattr__(self, "coef_abs", a)
        object.__setattr__(self, "coef_lin", b)


# rho_0(t) = max(t, 0): the directed-cut loss.
RHO_ZERO = PhiParams(0.5, 0.5)


def _tau(params):
    if isinstance(params, QuantileParams):
        return params.tau
    return QuantileParams(params).tau


def rho(params, t):
    tau = _tau(params)
    t = np.asarray(t, dtype=np.float64)
    out = np.where(t >= 0, t, -tau * t)
    return out[()] if out.ndim == 0 else out


def rho_sum(params, y):
    return float(np.sum(rho(params, y)))


def h_loss(tau_h, t):
    """Pinball loss: ``tau_h * t`` for ``t >= 0`` and ``(tau_h - 1) * t`` for ``t < 0``."""
    tau_h = float(tau_h)
    if not (0.0 < tau_h < 1.0):
        raise ValueError(f"tau_h must lie in (0, 1), got {tau_h}")
    t = np.asarray(t, dtype=np.float64)
    out = np.where(t >= 0, tau_h * t, (tau_h - 1.0) * t)
    return out[()] if out.ndim == 0 else out


def h_to_rho_tau(tau_h):
    """The rho parameter matching pinball level `tau_h`, i.e. ``(1 - tau_h) / tau_h``.

    Only levels ``tau_h >= 1/2`` land in the supported range ``(0, 1]``.
    """
    tau_h = float(tau_h)
    if not (0.0 < tau_h < 1.0):
        raise ValueError(f"tau_h must lie in (0, 1), got {tau_h}")
    return (1.0 - tau_h) / tau_h


def rho_as_phi(params):
    tau = _tau(params)
    return PhiParams((1.0 + tau) / 2.0, (1.0 - tau) / 2.0)


def phi_eval(params, t):
    t = np.asarray(t, dtype=np.float64)
    out = params.coef_abs * np.abs(t) + params.coef_lin * t
    return out[()] if out.ndim == 0 else out


def phi_sum(params, y):
    return float(np.sum(phi_eval(params, y)))


def bound_B(params):
    """Constant B with ``||y||_1 <= B * rho_sum(tau, y)`` for every y; B = 1/tau."""
    return 1.0 / _tau(params)


def subgradient(params, row, b_i, x, scale=1.0):
    """Subgradient of ``scale * rho(<row, x> - b_i)`` with respect to x.

    Zero at a zero residual.
    """
    tau = _tau(params)
    row = np.asarray(row, dtype=np.float64)
    r = float(row @ np.asarray(x, dtype=np.float64)) - float(b_i)
    if r > 0:
        return scale * row
    if r < 0:
        return -scale * tau * row
    return np.zeros_like(row)


def dual_norm_bound(A, y, params):
    """Both sides of ``||A^T y||_2 <= rho_sum(tau, y) / tau * max_i ||A_i||_2``.

    Returns ``(lhs, rhs)``; lhs <= rhs always holds.
    """
    A = np.asarray(A, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if A.shape[0] != y.shape[0]:
        raise ValueError(f"A has {A.shape[0]} rows but y has length {y.shape[0]}")
    lhs = float(np.linalg.norm(A.T @ y))
    rhs = rho_sum(params, y) / _tau(params) * float(np.max(np.linalg.norm(A, axis=1)))
    return lhs, rhs
