"""Compiled inner loops."""
import numba
import numpy as np


@numba.njit(cache=True)
def smoothed_slopes(r, tau, mu):
    """Derivative of the Moreau envelope of rho_tau: clip(r / mu, -tau, 1)."""
    out = np.empty_like(r)
    for i in range(r.shape[0]):
        s = r[i] / mu
        if s > 1.0:
            s = 1.0
        elif s < -tau:
            s = -tau
        out[i] = s
    return out


@numba.njit(cache=True)
def katyusha_epoch(Q, b, tau, mu, idx, prob, snap, snap_slopes, full_grad,
                   y, z, tau1, tau2, alpha, eta):
    """One epoch of Katyusha on sum_i rho^mu(<Q_i, x> - b_i).

    Row i is drawn with probability prob[i] (indices given in `idx`).
    Updates `y` and `z` in place and returns the average of the y iterates.
    """
    d = Q.shape[1]
    m = idx.shape[0]
    x = np.empty(d)
    ysum = np.zeros(d)
    keep = 1.0 - tau1 - tau2
    for k in range(m):
        i = idx[k]
        r = -b[i]
        for j in range(d):
            x[j] = tau1 * z[j] + tau2 * snap[j] + keep * y[j]
            r += Q[i, j] * x[j]
        s = r / mu
        if s > 1.0:
            s = 1.0
        elif s < -tau:
            s = -tau
        c = (s - snap_slopes[i]) / prob[i]
        for j in range(d):
            g = full_grad[j] + c * Q[i, j]
            z[j] -= alpha * g
            y[j] = x[j] - eta * g
            ysum[j] += y[j]
    return ysum / m
